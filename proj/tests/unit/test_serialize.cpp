// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include "doctest.h"
#include "hefl/ckks/ckks.hpp"

using namespace hefl::ckks;

namespace {

struct Setup {
  std::shared_ptr<const CkksContext> ctx = CkksContext::create(CkksParams::from_profile("test-small"));
  KeyPair keys = keygen(*ctx, 5);
  Ciphertext ct = encrypt(*ctx, encode(*ctx, std::vector<double>{1.5, -2.0, 0.25}), keys.public_key, 6);
};

}  // namespace

TEST_CASE("ciphertext roundtrip is bit identical") {
  Setup s;
  const auto bytes = serialize_ct(*s.ctx, s.ct);
  CHECK(bytes.size() == kHeaderSize + 2 * (s.ct.level() + 1) * s.ctx->ring_dim() * 8);
  const Ciphertext back = deserialize_ct(*s.ctx, bytes);
  CHECK(back.c0 == s.ct.c0);
  CHECK(back.c1 == s.ct.c1);
  CHECK(back.scale == s.ct.scale);
  CHECK(serialize_ct(*s.ctx, back) == bytes);

  const Ciphertext lowered = rescale(*s.ctx, he_mul_scalar(*s.ctx, s.ct, 0.5));
  const Ciphertext lowered_back = deserialize_ct(*s.ctx, serialize_ct(*s.ctx, lowered));
  CHECK(lowered_back.c0 == lowered.c0);
  CHECK(lowered_back.scale == lowered.scale);
}

TEST_CASE("header layout") {
  Setup s;
  const auto bytes = serialize_ct(*s.ctx, s.ct);
  CHECK(bytes[0] == 'H');
  CHECK(bytes[3] == 'L');
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);
  const ObjectHeader h = read_header(bytes);
  CHECK(h.kind == ObjectKind::ciphertext);
  CHECK(h.fingerprint == s.ctx->fingerprint());
  CHECK(h.level == s.ct.level());
  CHECK(h.scale == s.ct.scale);
}

TEST_CASE("truncated buffers report the failing offset") {
  Setup s;
  auto bytes = serialize_ct(*s.ctx, s.ct);
  try {
    deserialize_ct(*s.ctx, std::span(bytes).first(10));
    FAIL("expected parse error");
  } catch (const hefl::ParseError& e) {
    CHECK(e.offset() == 7);
  }
  bytes.pop_back();
  CHECK_THROWS_AS(deserialize_ct(*s.ctx, bytes), hefl::ParseError);
  CHECK_THROWS_AS(deserialize_ct(*s.ctx, std::span<const std::uint8_t>{}), hefl::ParseError);
}

TEST_CASE("bad magic, trailing bytes and unreduced residues are rejected") {
  Setup s;
  auto bytes = serialize_ct(*s.ctx, s.ct);
  auto corrupt = bytes;
  corrupt[0] = 'X';
  CHECK_THROWS_AS(deserialize_ct(*s.ctx, corrupt), hefl::ParseError);
  corrupt = bytes;
  corrupt.push_back(0);
  CHECK_THROWS_AS(deserialize_ct(*s.ctx, corrupt), hefl::ParseError);
  corrupt = bytes;
  for (std::size_t i = 0; i < 8; ++i) corrupt[kHeaderSize + i] = 0xff;
  try {
    deserialize_ct(*s.ctx, corrupt);
    FAIL("expected parse error");
  } catch (const hefl::ParseError& e) {
    CHECK(e.offset() == kHeaderSize);
  }
}

TEST_CASE("cross-parameter deserialization fails on the fingerprint") {
  Setup s;
  const auto bytes = serialize_ct(*s.ctx, s.ct);
  auto other = CkksContext::create(CkksParams::generate(1024, {40, 31, 40}, 30.0));
  try {
    deserialize_ct(*other, bytes);
    FAIL("expected parse error");
  } catch (const hefl::ParseError& e) {
    CHECK(e.offset() == 7);
  }
}

TEST_CASE("keys roundtrip and still decrypt") {
  Setup s;
  const auto pk_bytes = serialize_public_key(*s.ctx, s.keys.public_key);
  const auto sk_bytes = serialize_secret_key(*s.ctx, s.keys.secret_key);
  CHECK(read_header(pk_bytes).kind == ObjectKind::public_key);
  CHECK(read_header(sk_bytes).kind == ObjectKind::secret_key);
  const PublicKey pk = deserialize_public_key(*s.ctx, pk_bytes);
  const SecretKey sk = deserialize_secret_key(*s.ctx, sk_bytes);
  CHECK(pk.a == s.keys.public_key.a);
  CHECK(pk.b == s.keys.public_key.b);
  CHECK(sk.s == s.keys.secret_key.s);
  CHECK_THROWS_AS(deserialize_ct(*s.ctx, pk_bytes), hefl::ParseError);
  const auto out = decode(*s.ctx, decrypt(*s.ctx, s.ct, sk));
  CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-5));
}
