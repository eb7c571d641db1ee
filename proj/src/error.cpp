// Copyright 2026 The Puda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "puda/error.hpp"

namespace puda {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidCapture: return "InvalidCapture";
    case Errc::InvalidScopeString: return "InvalidScopeString";
    case Errc::InvalidUserId: return "InvalidUserId";
    case Errc::DuplicatePath: return "DuplicatePath";
    case Errc::OrphanPath: return "OrphanPath";
    case Errc::EmptyTaxonomy: return "EmptyTaxonomy";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyAllowedList: return "EmptyAllowedList";
    case Errc::Timeout: return "Timeout";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::TransportError: return "TransportError";
    case Errc::StorageFull: return "StorageFull";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::IoError: return "IoError";
    case Errc::InvalidRedirectURI: return "InvalidRedirectURI";
    case Errc::UnknownClient: return "UnknownClient";
    case Errc::RedirectMismatch: return "RedirectMismatch";
    case Errc::InvalidScope: return "InvalidScope";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::AccessDenied: return "AccessDenied";
    case Errc::InvalidCode: return "InvalidCode";
    case Errc::CodeReplay: return "CodeReplay";
    case Errc::PKCEMismatch: return "PKCEMismatch";
    case Errc::ClientAuthFailed: return "ClientAuthFailed";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::BadSignature: return "BadSignature";
    case Errc::Expired: return "Expired";
    case Errc::RevokedGrant: return "RevokedGrant";
    case Errc::AudienceMismatch: return "AudienceMismatch";
    case Errc::UnknownGrant: return "UnknownGrant";
    case Errc::InsufficientScope: return "InsufficientScope";
    case Errc::NoDatasetBuilt: return "NoDatasetBuilt";
    case Errc::MissingProfile: return "MissingProfile";
    case Errc::RebuildInProgress: return "RebuildInProgress";
    case Errc::MissingDataset: return "MissingDataset";
    case Errc::ServerSpawnFailure: return "ServerSpawnFailure";
    case Errc::FlowStepFailed: return "FlowStepFailed";
  }
  return "Unknown";
}

}  // namespace puda
