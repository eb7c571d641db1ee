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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace puda {

/// Every failure the library reports carries one of these codes. HTTP
/// front ends map them onto status codes and OAuth error strings.
enum class Errc {
  // model / input validation
  InvalidArgument,
  InvalidCapture,
  InvalidScopeString,
  InvalidUserId,
  // taxonomy loading
  DuplicatePath,
  OrphanPath,
  EmptyTaxonomy,
  MalformedLine,
  // backends
  EmptyInput,
  EmptyAllowedList,
  Timeout,
  MalformedResponse,
  TransportError,
  // store
  StorageFull,
  CorruptLog,
  IoError,
  // authorization server
  InvalidRedirectURI,
  UnknownClient,
  RedirectMismatch,
  InvalidScope,
  InvalidRequest,
  AccessDenied,
  InvalidCode,
  CodeReplay,
  PKCEMismatch,
  ClientAuthFailed,
  Unauthorized,
  BadSignature,
  Expired,
  RevokedGrant,
  AudienceMismatch,
  UnknownGrant,
  // provision service / harness
  InsufficientScope,
  NoDatasetBuilt,
  MissingProfile,
  RebuildInProgress,
  MissingDataset,
  ServerSpawnFailure,
  FlowStepFailed,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace puda
