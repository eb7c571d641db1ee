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

// Thin wrappers over OpenSSL and zlib: digests, encodings, randomness and
// Ed25519 signing keys.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace puda::crypto {

std::array<std::uint8_t, 32> sha256(std::string_view data);
std::string sha256_hex(std::string_view data);

std::uint32_t crc32(std::string_view data);

std::string base64url_encode(std::string_view data);
/// Returns nullopt on characters outside the URL-safe alphabet.
std::optional<std::string> base64url_decode(std::string_view text);

std::string hex_encode(std::string_view data);

/// Cryptographically secure random bytes.
std::string random_bytes(std::size_t count);
std::string random_hex(std::size_t byte_count);

/// RFC 7636 S256 transform: BASE64URL(SHA256(verifier)).
std::string pkce_challenge(std::string_view verifier);

/// Constant-time comparison.
bool equal_secrets(std::string_view a, std::string_view b);

/// An Ed25519 key pair, or just the public half for verifiers.
class Ed25519Key {
 public:
  static Ed25519Key generate();
  static Ed25519Key from_private_pem(std::string_view pem);
  /// Raw 32-byte public key.
  static Ed25519Key from_public_raw(std::string_view raw);

  /// Loads a PEM private key from `path`, creating one (mode 0600) if the
  /// file does not exist.
  static Ed25519Key load_or_create(const std::filesystem::path& path);

  Ed25519Key(Ed25519Key&&) noexcept;
  Ed25519Key& operator=(Ed25519Key&&) noexcept;
  ~Ed25519Key();

  bool has_private() const noexcept { return has_private_; }
  std::string private_pem() const;
  std::string public_raw() const;
  /// RFC 7638 thumbprint, used as the key id.
  std::string thumbprint() const;

  std::string sign(std::string_view message) const;
  bool verify(std::string_view message, std::string_view signature) const;

 private:
  struct Impl;
  explicit Ed25519Key(std::unique_ptr<Impl> impl, bool has_private);
  std::unique_ptr<Impl> impl_;
  bool has_private_ = false;
};

}  // namespace puda::crypto
