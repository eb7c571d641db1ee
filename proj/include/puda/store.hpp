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

// Per-user durable storage under <data_dir>/<user_id>/:
//
//   events.jsonl   append-only event log, one record per line:
//                  <canonical JSON> <8 hex digit CRC32 of the JSON>\n
//   dataset.json   latest dataset snapshot
//   grants.json    latest access-grant snapshot
//   profile.json   the user's static profile
//
// Snapshots are replaced atomically (write, fsync, rename). Nothing is
// encrypted at rest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "puda/codec.hpp"
#include "puda/model.hpp"

namespace puda {

enum class EventKind { Capture, DatasetBuilt, GrantCreated, GrantRevoked, TokenIssued };

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct EventRecord {
  std::uint64_t offset = 0;
  EventKind kind = EventKind::Capture;
  Json payload;
  Timestamp recorded_at;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Names the first record that failed to decode.
class CorruptLogError : public Error {
 public:
  CorruptLogError(std::uint64_t offset, const std::string& reason)
      : Error(Errc::CorruptLog, "first bad record at offset " + std::to_string(offset) +
                                    ": " + reason),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// One log line including its trailing newline.
std::string encode_event_line(const EventRecord& event);

/// Decodes a complete log image. A record is accepted only if its line is
/// newline-terminated, its checksum matches, it parses, and its offset is
/// the next expected one. Throws CorruptLogError at the first record that
/// fails any of these.
std::vector<EventRecord> decode_event_log(std::string_view bytes);

/// Replaces `path` with `content` via a temporary file, fsync and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::optional<std::string> read_file(const std::filesystem::path& path);

class Store {
 public:
  explicit Store(std::filesystem::path data_dir, Clock clock = system_clock());

  const std::filesystem::path& data_dir() const noexcept { return data_dir_; }
  /// Throws InvalidUserId for ids that are not path-safe.
  std::filesystem::path user_dir(std::string_view user_id) const;

  /// Durably appends (fsync before returning). Throws StorageFull,
  /// CorruptLog (the existing log is damaged) or IoError.
  std::uint64_t append(std::string_view user_id, EventKind kind, const Json& payload);

  struct CaptureAppend {
    std::uint64_t offset;
    bool duplicate;  // an identical (url, captured_at) was already logged
  };
  /// Appends a capture unless one with the same url and captured_at exists.
  CaptureAppend append_capture(const PageCapture& capture);

  std::vector<EventRecord> read_events(std::string_view user_id) const;
  /// Capture events in offset order; [] for unknown users.
  std::vector<PageCapture> load_captures(std::string_view user_id) const;

  /// Last-writer-wins snapshot; also logs a dataset_built event.
  void put_dataset(std::string_view user_id, const UserDataset& dataset);
  std::optional<UserDataset> get_dataset(std::string_view user_id) const;

  void put_profile(std::string_view user_id, const Profile& profile);
  std::optional<Profile> get_profile(std::string_view user_id) const;

  void put_snapshot(std::string_view user_id, std::string_view file, const Json& value);
  std::optional<Json> get_snapshot(std::string_view user_id, std::string_view file) const;

  /// Users with a directory under data_dir.
  std::vector<std::string> users() const;

 private:
  struct UserLog {
    std::mutex mutex;
    bool loaded = false;
    std::uint64_t next_offset = 0;
    std::uintmax_t known_size = 0;
    std::map<std::pair<std::string, Timestamp>, std::uint64_t> capture_index;
  };

  UserLog& user_log(std::string_view user_id);
  // Caller holds log.mutex and the file lock.
  void refresh(std::string_view user_id, UserLog& log);
  std::uint64_t append_locked(std::string_view user_id, UserLog& log, EventKind kind,
                              const Json& payload);

  std::filesystem::path data_dir_;
  Clock clock_;
  std::mutex logs_mutex_;
  std::map<std::string, std::unique_ptr<UserLog>, std::less<>> logs_;
};

}  // namespace puda
