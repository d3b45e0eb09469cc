// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/model/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hefl/common/error.hpp"

namespace hefl::model {

namespace {

constexpr const char* kFormat = "hefl-checkpoint";
constexpr int kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint blobs assume a little-endian host");

nlohmann::json layout_json(const Layout& layout) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : layout.slots) {
    out.push_back({{"name", s.name}, {"shape", s.shape}, {"offset", s.offset}, {"size", s.size}});
  }
  return out;
}

}  // namespace

const std::vector<double>* Checkpoint::blob(const std::string& name) const {
  for (const auto& [n, v] : blobs) {
    if (n == name) return &v;
  }
  return nullptr;
}

ModelState Checkpoint::model() const {
  const auto* w = blob("weights");
  if (!w) throw ConfigError("checkpoint has no weights blob");
  return ModelState(arch, *w);
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format"] = kFormat;
  header["version"] = kVersion;
  header["arch"] = ckpt.arch.name();
  header["input"] = {ckpt.arch.input.channels, ckpt.arch.input.height, ckpt.arch.input.width};
  header["classes"] = ckpt.arch.classes;
  header["layout"] = layout_json(layout_for(ckpt.arch));
  header["round"] = ckpt.round;
  nlohmann::json dir = nlohmann::json::array();
  for (const auto& [name, values] : ckpt.blobs) dir.push_back({{"name", name}, {"length", values.size()}});
  header["blobs"] = dir;
  header["meta"] = ckpt.meta;

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << header.dump() << '\n';
    for (const auto& [name, values] : ckpt.blobs) {
      out.write(reinterpret_cast<const char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
    }
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto nl = std::find(bytes.begin(), bytes.end(), '\n');
  if (nl == bytes.end()) throw ParseError(bytes.size(), "checkpoint header is not newline-terminated");
  const std::size_t header_len = static_cast<std::size_t>(nl - bytes.begin());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin(), nl);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte, std::string("checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    if (header.at("format") != kFormat || header.at("version") != kVersion) {
      throw ParseError(0, "not a version 1 hefl checkpoint");
    }
    const auto input = header.at("input").get<std::vector<std::size_t>>();
    if (input.size() != 3) throw ParseError(0, "checkpoint input shape must have three entries");
    ckpt.arch = Architecture::parse(header.at("arch").get<std::string>(), InputShape{input[0], input[1], input[2]},
                                    header.at("classes").get<std::size_t>());
    ckpt.round = header.at("round").get<std::size_t>();
    ckpt.meta = header.value("meta", nlohmann::json::object());
    if (header.at("layout") != layout_json(layout_for(ckpt.arch))) {
      throw ConfigError("checkpoint layout does not match architecture " + ckpt.arch.name());
    }
    std::size_t pos = header_len + 1;
    for (const auto& entry : header.at("blobs")) {
      const auto name = entry.at("name").get<std::string>();
      const auto len = entry.at("length").get<std::size_t>();
      if (bytes.size() - pos < len * sizeof(double)) throw ParseError(bytes.size(), "blob '" + name + "' truncated");
      std::vector<double> values(len);
      std::memcpy(values.data(), bytes.data() + pos, len * sizeof(double));
      pos += len * sizeof(double);
      ckpt.blobs.emplace_back(name, std::move(values));
    }
    if (pos != bytes.size()) throw ParseError(pos, "trailing bytes after checkpoint blobs");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("checkpoint header: ") + e.what());
  }
  const auto* w = ckpt.blob("weights");
  if (!w || w->size() != layout_for(ckpt.arch).total) {
    throw ConfigError("checkpoint weights blob is missing or has the wrong length");
  }
  return ckpt;
}

}  // namespace hefl::model
