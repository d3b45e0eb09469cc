// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/model/architecture.hpp"

#include <cmath>

#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"

namespace hefl::model {

namespace {

constexpr std::size_t kConvMaps = 4;
constexpr std::size_t kConvKernel = 5;

void add_slot(Layout& layout, std::string name, std::vector<std::size_t> shape, std::size_t fan_in) {
  std::size_t size = 1;
  for (auto d : shape) size *= d;
  layout.slots.push_back(LayerSlot{std::move(name), std::move(shape), layout.total, size, fan_in});
  layout.total += size;
}

}  // namespace

Architecture Architecture::parse(std::string_view name, InputShape input, std::size_t classes) {
  Architecture a;
  a.input = input;
  a.classes = classes;
  if (name == "linear") {
    a.kind = ArchKind::linear;
  } else if (name == "mlp2" || name == "MLP-2" || name == "mlp-2") {
    a.kind = ArchKind::mlp2;
  } else if (name == "conv-s" || name == "CONV-S" || name == "conv_s") {
    a.kind = ArchKind::conv_s;
    if (input.height % 2 != 0 || input.width % 2 != 0) {
      throw ConfigError("conv-s needs even input height and width");
    }
  } else {
    throw ConfigError("unknown architecture '" + std::string(name) + "' (expected linear, mlp2 or conv-s)");
  }
  if (classes < 2) throw ConfigError("need at least two classes");
  return a;
}

std::string Architecture::name() const {
  switch (kind) {
    case ArchKind::linear:
      return "linear";
    case ArchKind::mlp2:
      return "mlp2";
    case ArchKind::conv_s:
      return "conv-s";
  }
  return "unknown";
}

const LayerSlot& Layout::find(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return s;
  }
  throw UsageError("no layer named '" + std::string(name) + "'");
}

Layout layout_for(const Architecture& arch) {
  Layout l;
  const std::size_t in = arch.input.size();
  const std::size_t c = arch.classes;
  switch (arch.kind) {
    case ArchKind::linear:
      add_slot(l, "fc.weight", {c, in}, in);
      add_slot(l, "fc.bias", {c}, in);
      break;
    case ArchKind::mlp2:
      add_slot(l, "fc1.weight", {64, in}, in);
      add_slot(l, "fc1.bias", {64}, in);
      add_slot(l, "fc2.weight", {32, 64}, 64);
      add_slot(l, "fc2.bias", {32}, 64);
      add_slot(l, "fc3.weight", {c, 32}, 32);
      add_slot(l, "fc3.bias", {c}, 32);
      break;
    case ArchKind::conv_s: {
      const std::size_t k_fan = arch.input.channels * kConvKernel * kConvKernel;
      add_slot(l, "conv.weight", {kConvMaps, arch.input.channels, kConvKernel, kConvKernel}, k_fan);
      add_slot(l, "conv.bias", {kConvMaps}, k_fan);
      const std::size_t pooled = kConvMaps * (arch.input.height / 2) * (arch.input.width / 2);
      add_slot(l, "fc.weight", {c, pooled}, pooled);
      add_slot(l, "fc.bias", {c}, pooled);
      break;
    }
  }
  return l;
}

ModelState::ModelState(Architecture arch, std::vector<double> params)
    : arch_(arch), layout_(layout_for(arch)), params_(std::move(params)) {
  if (params_.size() != layout_.total) {
    throw UsageError("parameter vector has " + std::to_string(params_.size()) + " entries, layout needs " +
                     std::to_string(layout_.total));
  }
}

std::span<const double> ModelState::layer(std::string_view name) const {
  const LayerSlot& s = layout_.find(name);
  return std::span<const double>(params_).subspan(s.offset, s.size);
}

ModelState build_model(const Architecture& arch, std::uint64_t seed) {
  const Layout layout = layout_for(arch);
  std::vector<double> params(layout.total);
  Rng rng(seed);
  for (const auto& slot : layout.slots) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(slot.fan_in));
    for (std::size_t i = 0; i < slot.size; ++i) params[slot.offset + i] = rng.uniform(-bound, bound);
  }
  return ModelState(arch, std::move(params));
}

}  // namespace hefl::model
