// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hefl/ckks/context.hpp"
#include "hefl/ckks/scheme.hpp"

namespace hefl::ckks {

/**
 * Binary layout (all integers little-endian):
 *
 *   offset  size  field
 *   0       4     magic "HEFL"
 *   4       2     format version (1)
 *   6       1     object kind (1 ciphertext, 2 public key, 3 secret key)
 *   7       8     parameter fingerprint
 *   15      1     level
 *   16      8     scale, IEEE-754 binary64 (0 for keys)
 *   24      ...   polynomials, each (level + 1) residue arrays of N u64 words
 *
 * Ciphertexts store (c0, c1), public keys (b, a), secret keys (s). All
 * polynomials are written in the coefficient domain.
 */
enum class ObjectKind : std::uint8_t { ciphertext = 1, public_key = 2, secret_key = 3 };

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 24;

struct ObjectHeader {
  ObjectKind kind;
  std::uint64_t fingerprint;
  std::uint8_t level;
  double scale;
};

std::vector<std::uint8_t> serialize_ct(const CkksContext& ctx, const Ciphertext& ct);
Ciphertext deserialize_ct(const CkksContext& ctx, std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_public_key(const CkksContext& ctx, const PublicKey& pk);
PublicKey deserialize_public_key(const CkksContext& ctx, std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_secret_key(const CkksContext& ctx, const SecretKey& sk);
SecretKey deserialize_secret_key(const CkksContext& ctx, std::span<const std::uint8_t> bytes);

/// Parses only the fixed header; does not need a context.
ObjectHeader read_header(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace hefl::ckks
