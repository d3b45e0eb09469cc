// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/ckks/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "hefl/common/error.hpp"

namespace hefl::ckks {

namespace {

constexpr char kMagic[4] = {'H', 'E', 'F', 'L'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void poly(const CkksContext& ctx, const RnsPoly& p) {
    const RnsPoly coeff = p.domain() == Domain::ntt ? ntt_inverse(ctx, p) : p;
    for (auto w : coeff.data()) u64(w);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(pos_, std::string("truncated buffer while reading ") + what);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return in_[pos_++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  RnsPoly poly(const CkksContext& ctx, std::size_t level) {
    RnsPoly p(ctx.ring_dim(), level, Domain::coefficient);
    for (std::size_t i = 0; i <= level; ++i) {
      const std::uint64_t q = ctx.modulus(i);
      for (auto& w : p.residue(i)) {
        const std::size_t at = pos_;
        w = u64("residue");
        if (w >= q) throw ParseError(at, "residue not reduced modulo prime " + std::to_string(i));
      }
    }
    return p;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, const CkksContext& ctx, ObjectKind kind, std::size_t level, double scale) {
  w.bytes(kMagic, sizeof kMagic);
  w.u16(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u64(ctx.fingerprint());
  w.u8(static_cast<std::uint8_t>(level));
  w.f64(scale);
}

ObjectHeader parse_header(Reader& r) {
  r.need(sizeof kMagic, "magic");
  for (char c : kMagic) {
    const std::size_t at = r.offset();
    if (r.u8("magic") != static_cast<std::uint8_t>(c)) throw ParseError(at, "bad magic, expected HEFL");
  }
  std::size_t at = r.offset();
  const std::uint16_t version = r.u16("version");
  if (version != kFormatVersion) throw ParseError(at, "unsupported format version " + std::to_string(version));
  at = r.offset();
  const std::uint8_t kind = r.u8("kind");
  if (kind < 1 || kind > 3) throw ParseError(at, "unknown object kind " + std::to_string(kind));
  ObjectHeader h;
  h.kind = static_cast<ObjectKind>(kind);
  h.fingerprint = r.u64("fingerprint");
  h.level = r.u8("level");
  h.scale = r.f64("scale");
  return h;
}

ObjectHeader expect_header(Reader& r, const CkksContext& ctx, ObjectKind kind, std::size_t polys) {
  const ObjectHeader h = parse_header(r);
  if (h.kind != kind) throw ParseError(6, "object kind mismatch");
  if (h.fingerprint != ctx.fingerprint()) throw ParseError(7, "parameter fingerprint mismatch");
  if (h.level > ctx.key_level()) throw ParseError(15, "level above the modulus chain");
  const std::size_t body = polys * (h.level + 1) * ctx.ring_dim() * 8;
  if (r.remaining() < body) throw ParseError(r.offset() + r.remaining(), "truncated polynomial data");
  if (r.remaining() > body) throw ParseError(r.offset() + body, "trailing bytes after object");
  return h;
}

}  // namespace

ObjectHeader read_header(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  return parse_header(r);
}

std::vector<std::uint8_t> serialize_ct(const CkksContext& ctx, const Ciphertext& ct) {
  Writer w;
  write_header(w, ctx, ObjectKind::ciphertext, ct.level(), ct.scale);
  w.poly(ctx, ct.c0);
  w.poly(ctx, ct.c1);
  return w.take();
}

Ciphertext deserialize_ct(const CkksContext& ctx, std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const ObjectHeader h = expect_header(r, ctx, ObjectKind::ciphertext, 2);
  if (!(h.scale > 0.0)) throw ParseError(16, "ciphertext scale must be positive");
  Ciphertext ct;
  ct.c0 = r.poly(ctx, h.level);
  ct.c1 = r.poly(ctx, h.level);
  ct.scale = h.scale;
  ct.noise_budget_bits = fresh_noise_budget(ctx, h.level, h.scale);
  return ct;
}

std::vector<std::uint8_t> serialize_public_key(const CkksContext& ctx, const PublicKey& pk) {
  Writer w;
  write_header(w, ctx, ObjectKind::public_key, pk.b.level(), 0.0);
  w.poly(ctx, pk.b);
  w.poly(ctx, pk.a);
  return w.take();
}

PublicKey deserialize_public_key(const CkksContext& ctx, std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const ObjectHeader h = expect_header(r, ctx, ObjectKind::public_key, 2);
  if (h.level != ctx.key_level()) throw ParseError(15, "public key must be at the key level");
  PublicKey pk;
  pk.b = ntt_forward(ctx, r.poly(ctx, h.level));
  pk.a = ntt_forward(ctx, r.poly(ctx, h.level));
  return pk;
}

std::vector<std::uint8_t> serialize_secret_key(const CkksContext& ctx, const SecretKey& sk) {
  Writer w;
  write_header(w, ctx, ObjectKind::secret_key, sk.s.level(), 0.0);
  w.poly(ctx, sk.s);
  return w.take();
}

SecretKey deserialize_secret_key(const CkksContext& ctx, std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const ObjectHeader h = expect_header(r, ctx, ObjectKind::secret_key, 1);
  if (h.level != ctx.key_level()) throw ParseError(15, "secret key must be at the key level");
  return SecretKey{ntt_forward(ctx, r.poly(ctx, h.level))};
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hefl::ckks
