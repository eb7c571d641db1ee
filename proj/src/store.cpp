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

#include "puda/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "puda/crypto.hpp"
#include "puda/pipeline.hpp"

namespace puda {

namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kDatasetFile = "dataset.json";
constexpr const char* kProfileFile = "profile.json";

[[noreturn]] void throw_errno(const std::string& what) {
  int err = errno;
  if (err == ENOSPC || err == EDQUOT || err == EFBIG) {
    throw Error(Errc::StorageFull, what + ": " + std::strerror(err));
  }
  throw Error(Errc::IoError, what + ": " + std::strerror(err));
}

// RAII file descriptor.
class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

// Exclusive advisory lock on <dir>/.lock; one writer per user across
// processes.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir)
      : fd_(::open((dir / ".lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600)) {
    if (fd_.get() < 0) throw_errno("open lock file");
    while (::flock(fd_.get(), LOCK_EX) != 0) {
      if (errno != EINTR) throw_errno("flock");
    }
  }
  ~DirLock() { ::flock(fd_.get(), LOCK_UN); }

 private:
  Fd fd_;
};

void write_all(int fd, std::string_view data, const std::string& what) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno(what);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const std::filesystem::path& dir) {
  Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (fd.get() >= 0) ::fsync(fd.get());
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600));
    if (fd.get() < 0) throw_errno("open " + tmp.string());
    write_all(fd.get(), content, "write " + tmp.string());
    if (::fsync(fd.get()) != 0) throw_errno("fsync " + tmp.string());
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) throw_errno("rename " + path.string());
  fsync_dir(path.parent_path());
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Capture: return "capture";
    case EventKind::DatasetBuilt: return "dataset_built";
    case EventKind::GrantCreated: return "grant_created";
    case EventKind::GrantRevoked: return "grant_revoked";
    case EventKind::TokenIssued: return "token_issued";
  }
  return "capture";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::Capture, EventKind::DatasetBuilt, EventKind::GrantCreated,
                 EventKind::GrantRevoked, EventKind::TokenIssued}) {
    if (event_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string encode_event_line(const EventRecord& event) {
  Json j{{"offset", event.offset},
         {"kind", event_kind_name(event.kind)},
         {"payload", event.payload},
         {"recorded_at", timestamp_json(event.recorded_at)}};
  std::string body = canonical_dump(j);
  char crc[16];
  std::snprintf(crc, sizeof(crc), " %08x\n", crypto::crc32(body));
  return body + crc;
}

std::vector<EventRecord> decode_event_log(std::string_view bytes) {
  std::vector<EventRecord> events;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::uint64_t expected = events.size();
    auto newline = bytes.find('\n', pos);
    if (newline == std::string_view::npos) {
      throw CorruptLogError(expected, "torn record (no line terminator)");
    }
    std::string_view line = bytes.substr(pos, newline - pos);
    pos = newline + 1;
    // " " + 8 hex digits
    if (line.size() < 10 || line[line.size() - 9] != ' ') {
      throw CorruptLogError(expected, "missing checksum");
    }
    std::string_view body = line.substr(0, line.size() - 9);
    std::string_view crc_text = line.substr(line.size() - 8);
    std::uint32_t stored = 0;
    for (char c : crc_text) {
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else throw CorruptLogError(expected, "malformed checksum");
      stored = (stored << 4) | static_cast<std::uint32_t>(d);
    }
    if (stored != crypto::crc32(body)) throw CorruptLogError(expected, "checksum mismatch");

    EventRecord event;
    try {
      Json j = Json::parse(body);
      event.offset = j.at("offset").get<std::uint64_t>();
      auto kind = parse_event_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::InvalidArgument, "unknown event kind");
      event.kind = *kind;
      event.payload = j.at("payload");
      event.recorded_at = timestamp_from_json(j.at("recorded_at"));
    } catch (const std::exception& e) {
      throw CorruptLogError(expected, std::string("undecodable record: ") + e.what());
    }
    if (event.offset != expected) {
      throw CorruptLogError(expected, "offset " + std::to_string(event.offset) +
                                          " out of sequence");
    }
    events.push_back(std::move(event));
  }
  return events;
}

// Store ---------------------------------------------------------------------

Store::Store(std::filesystem::path data_dir, Clock clock)
    : data_dir_(std::move(data_dir)), clock_(std::move(clock)) {
  std::filesystem::create_directories(data_dir_);
}

std::filesystem::path Store::user_dir(std::string_view user_id) const {
  if (!is_valid_user_id(user_id)) {
    throw Error(Errc::InvalidUserId, "invalid user id: " + std::string(user_id));
  }
  return data_dir_ / std::string(user_id);
}

Store::UserLog& Store::user_log(std::string_view user_id) {
  std::lock_guard lock(logs_mutex_);
  auto it = logs_.find(user_id);
  if (it == logs_.end()) {
    it = logs_.emplace(std::string(user_id), std::make_unique<UserLog>()).first;
  }
  return *it->second;
}

void Store::refresh(std::string_view user_id, UserLog& log) {
  auto path = user_dir(user_id) / kEventsFile;
  std::error_code ec;
  auto size = std::filesystem::exists(path, ec) ? std::filesystem::file_size(path, ec) : 0;
  if (log.loaded && size == log.known_size) return;
  auto events = decode_event_log(read_file(path).value_or(""));
  log.capture_index.clear();
  for (const auto& e : events) {
    if (e.kind != EventKind::Capture) continue;
    try {
      auto capture = e.payload.get<PageCapture>();
      log.capture_index.emplace(std::pair{capture.url, capture.captured_at}, e.offset);
    } catch (const std::exception& ex) {
      throw CorruptLogError(e.offset, std::string("bad capture payload: ") + ex.what());
    }
  }
  log.next_offset = events.size();
  log.known_size = size;
  log.loaded = true;
}

std::uint64_t Store::append_locked(std::string_view user_id, UserLog& log, EventKind kind,
                                   const Json& payload) {
  auto path = user_dir(user_id) / kEventsFile;
  EventRecord event{log.next_offset, kind, payload, clock_()};
  std::string line = encode_event_line(event);
  Fd fd(::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0600));
  if (fd.get() < 0) throw_errno("open " + path.string());
  try {
    write_all(fd.get(), line, "append " + path.string());
    if (::fsync(fd.get()) != 0) throw_errno("fsync " + path.string());
  } catch (const Error&) {
    // Drop any partial line so the log stays decodable.
    if (::ftruncate(fd.get(), static_cast<off_t>(log.known_size)) == 0) ::fsync(fd.get());
    throw;
  }
  log.next_offset++;
  log.known_size += line.size();
  return event.offset;
}

std::uint64_t Store::append(std::string_view user_id, EventKind kind, const Json& payload) {
  auto dir = user_dir(user_id);
  std::filesystem::create_directories(dir);
  UserLog& log = user_log(user_id);
  std::lock_guard guard(log.mutex);
  DirLock file_lock(dir);
  refresh(user_id, log);
  auto offset = append_locked(user_id, log, kind, payload);
  if (kind == EventKind::Capture) {
    auto capture = payload.get<PageCapture>();
    log.capture_index.emplace(std::pair{capture.url, capture.captured_at}, offset);
  }
  return offset;
}

Store::CaptureAppend Store::append_capture(const PageCapture& capture) {
  auto dir = user_dir(capture.user_id);
  std::filesystem::create_directories(dir);
  UserLog& log = user_log(capture.user_id);
  std::lock_guard guard(log.mutex);
  DirLock file_lock(dir);
  refresh(capture.user_id, log);
  auto key = std::pair{capture.url, capture.captured_at};
  if (auto it = log.capture_index.find(key); it != log.capture_index.end()) {
    return {it->second, true};
  }
  auto offset = append_locked(capture.user_id, log, EventKind::Capture, Json(capture));
  log.capture_index.emplace(std::move(key), offset);
  return {offset, false};
}

std::vector<EventRecord> Store::read_events(std::string_view user_id) const {
  auto path = user_dir(user_id) / kEventsFile;
  auto bytes = read_file(path);
  if (!bytes) return {};
  return decode_event_log(*bytes);
}

std::vector<PageCapture> Store::load_captures(std::string_view user_id) const {
  std::vector<PageCapture> captures;
  for (const auto& e : read_events(user_id)) {
    if (e.kind != EventKind::Capture) continue;
    try {
      captures.push_back(e.payload.get<PageCapture>());
    } catch (const std::exception& ex) {
      throw CorruptLogError(e.offset, std::string("bad capture payload: ") + ex.what());
    }
  }
  return captures;
}

void Store::put_dataset(std::string_view user_id, const UserDataset& dataset) {
  put_snapshot(user_id, kDatasetFile, Json(dataset));
  append(user_id, EventKind::DatasetBuilt,
         Json{{"dataset_version", dataset_version(dataset)},
              {"built_at", timestamp_json(dataset.built_at)},
              {"pipeline_version", dataset.pipeline_version}});
}

std::optional<UserDataset> Store::get_dataset(std::string_view user_id) const {
  auto j = get_snapshot(user_id, kDatasetFile);
  if (!j) return std::nullopt;
  try {
    return j->get<UserDataset>();
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptLog, std::string("dataset snapshot unreadable: ") + e.what());
  }
}

void Store::put_profile(std::string_view user_id, const Profile& profile) {
  validate_profile(profile);
  put_snapshot(user_id, kProfileFile, Json(profile));
}

std::optional<Profile> Store::get_profile(std::string_view user_id) const {
  auto j = get_snapshot(user_id, kProfileFile);
  if (!j) return std::nullopt;
  try {
    return j->get<Profile>();
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptLog, std::string("profile snapshot unreadable: ") + e.what());
  }
}

void Store::put_snapshot(std::string_view user_id, std::string_view file, const Json& value) {
  auto dir = user_dir(user_id);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / std::string(file), canonical_dump(value) + "\n");
}

std::optional<Json> Store::get_snapshot(std::string_view user_id, std::string_view file) const {
  auto bytes = read_file(user_dir(user_id) / std::string(file));
  if (!bytes) return std::nullopt;
  try {
    return Json::parse(*bytes);
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptLog, "snapshot " + std::string(file) + " unreadable: " + e.what());
  }
}

std::vector<std::string> Store::users() const {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir_, ec)) {
    if (entry.is_directory() && is_valid_user_id(entry.path().filename().string())) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace puda
