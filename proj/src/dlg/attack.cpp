// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/dlg/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "hefl/common/error.hpp"
#include "hefl/common/parallel.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/fl/experiment.hpp"
#include "hefl/model/network.hpp"

namespace hefl::dlg {

namespace {

using model::Dual;

double mse(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

void softmax(std::span<const double> l, std::vector<double>& out) {
  out.resize(l.size());
  const double mx = *std::max_element(l.begin(), l.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) sum += out[k] = std::exp(l[k] - mx);
  for (auto& v : out) v /= sum;
}

// The matching problem for one intercepted update.
class Objective {
 public:
  enum class LabelMode { fixed, softmax, free };

  Objective(const model::ModelState& m, const fl::PlaintextView& observed) : m_(m) {
    if (observed.parameter_count != m.size()) {
      throw UsageError("observed update has " + std::to_string(observed.parameter_count) +
                       " parameters, model has " + std::to_string(m.size()));
    }
    for (const auto& [i, v] : observed.entries) {
      if (i >= m.size()) throw UsageError("observed index out of range");
      idx_.push_back(i);
      obs_.push_back(v);
    }
  }

  std::size_t visible() const { return idx_.size(); }

  // target distribution (or regression target) for the current label parameters
  void target(LabelMode mode, std::span<const double> fixed, std::span<const double> l, std::vector<double>& t) const {
    if (mode == LabelMode::fixed) {
      t.assign(fixed.begin(), fixed.end());
    } else if (mode == LabelMode::softmax) {
      softmax(l, t);
    } else {
      t.assign(l.begin(), l.end());
    }
  }

  double value(std::span<const double> x, std::span<const double> t) const {
    std::vector<double> g(m_.size(), 0.0);
    model::accumulate_example_gradient<double>(m_, x, t, g, 1.0);
    double d = 0.0;
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      const double r = g[idx_[k]] - obs_[k];
      d += r * r;
    }
    return d;
  }

  // D and its gradient with respect to x and the label parameters, one dual pass per coordinate.
  double value_and_gradient(std::span<const double> x, LabelMode mode, std::span<const double> fixed,
                            std::span<const double> l, std::vector<double>& gx, std::vector<double>& gl) const {
    std::vector<double> t;
    target(mode, fixed, l, t);
    std::vector<double> g(m_.size(), 0.0);
    model::accumulate_example_gradient<double>(m_, x, t, g, 1.0);
    std::vector<double> resid(idx_.size());
    double d = 0.0;
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      resid[k] = g[idx_[k]] - obs_[k];
      d += resid[k] * resid[k];
    }
    if (!std::isfinite(d)) return d;

    std::vector<Dual> xd(x.begin(), x.end());
    std::vector<Dual> td(t.begin(), t.end());
    std::vector<Dual> gd(m_.size());
    auto directional = [&]() {
      std::fill(gd.begin(), gd.end(), Dual());
      model::accumulate_example_gradient<Dual>(m_, xd, td, gd, 1.0);
      double s = 0.0;
      for (std::size_t k = 0; k < idx_.size(); ++k) s += resid[k] * gd[idx_[k]].d;
      return 2.0 * s;
    };
    gx.assign(x.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      xd[j].d = 1.0;
      gx[j] = directional();
      xd[j].d = 0.0;
    }
    gl.assign(l.size(), 0.0);
    if (mode != LabelMode::fixed) {
      for (std::size_t k = 0; k < l.size(); ++k) {
        for (std::size_t j = 0; j < t.size(); ++j) {
          td[j].d = mode == LabelMode::free ? (j == k ? 1.0 : 0.0) : t[j] * ((j == k ? 1.0 : 0.0) - t[k]);
        }
        gl[k] = directional();
      }
    }
    return d;
  }

 private:
  const model::ModelState& m_;
  std::vector<std::size_t> idx_;
  std::vector<double> obs_;
};

struct Adam {
  std::vector<double> m, v;
  std::size_t t = 0;

  void step(std::vector<double>& p, const std::vector<double>& g, const AttackConfig& c) {
    if (m.empty()) {
      m.assign(p.size(), 0.0);
      v.assign(p.size(), 0.0);
    }
    ++t;
    const double c1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      p[i] -= c.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + c.epsilon);
    }
  }
};

}  // namespace

void AttackConfig::validate() const {
  if (iterations < 1) throw ConfigError("attack iterations must be at least 1");
  if (restarts < 1) throw ConfigError("attack restarts must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("attack lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam betas must lie in [0, 1)");
  if (!(success_factor > 0.0)) throw ConfigError("success_factor must be positive");
}

AttackConfig AttackConfig::from_json(const nlohmann::json& j) {
  AttackConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "iterations") {
        c.iterations = v.get<std::size_t>();
      } else if (k == "restarts") {
        c.restarts = v.get<std::size_t>();
      } else if (k == "lr") {
        c.lr = v.get<double>();
      } else if (k == "beta1") {
        c.beta1 = v.get<double>();
      } else if (k == "beta2") {
        c.beta2 = v.get<double>();
      } else if (k == "epsilon") {
        c.epsilon = v.get<double>();
      } else if (k == "success_factor") {
        c.success_factor = v.get<double>();
      } else if (k == "threads") {
        c.threads = v.get<std::size_t>();
      } else {
        throw ConfigError("unknown attack key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("attack config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json AttackConfig::to_json() const {
  return {{"iterations", iterations}, {"restarts", restarts},     {"lr", lr},
          {"beta1", beta1},           {"beta2", beta2},           {"epsilon", epsilon},
          {"success_factor", success_factor}};
}

nlohmann::json ReconstructionReport::to_json() const {
  nlohmann::json restarts = nlohmann::json::array();
  for (const auto& r : per_restart) {
    restarts.push_back({{"index", r.index},
                        {"gradient_distance", r.gradient_distance},
                        {"input_mse", r.input_mse},
                        {"init_mse", r.init_mse},
                        {"diverged", r.diverged},
                        {"iterations_run", r.iterations_run}});
  }
  nlohmann::json j = {{"visible_count", visible_count},
                      {"best_restart", best_restart},
                      {"final_gradient_distance", final_gradient_distance},
                      {"input_mse", input_mse},
                      {"init_mse", init_mse},
                      {"target_variance", target_variance},
                      {"success", success},
                      {"per_restart", restarts}};
  j["psnr_db"] = std::isfinite(psnr_db) ? nlohmann::json(psnr_db) : nlohmann::json(nullptr);
  j["inferred_label"] = inferred_label ? nlohmann::json(*inferred_label) : nlohmann::json(nullptr);
  return j;
}

std::optional<int> label_infer(const fl::PlaintextView& observed, const model::ModelState& m) {
  if (m.arch().loss() != model::LossKind::cross_entropy) return std::nullopt;
  const auto& slots = m.layout().slots;
  const model::LayerSlot& w = slots[slots.size() - 2];
  const model::LayerSlot& b = slots.back();
  const std::size_t classes = m.arch().classes;
  const std::size_t row = w.size / classes;
  std::vector<double> sum(classes, 0.0);
  std::vector<std::size_t> count(classes, 0);
  for (const auto& [i, v] : observed.entries) {
    std::size_t k = classes;
    if (i >= w.offset && i < w.offset + w.size) k = (i - w.offset) / row;
    if (i >= b.offset && i < b.offset + b.size) k = i - b.offset;
    if (k < classes) {
      sum[k] += v;
      ++count[k];
    }
  }
  std::optional<int> label;
  for (std::size_t k = 0; k < classes; ++k) {
    if (count[k] > 0 && sum[k] < 0.0) {
      if (label) return std::nullopt;
      label = static_cast<int>(k);
    }
  }
  return label;
}

double gradient_distance(const model::ModelState& m, const fl::PlaintextView& observed, std::span<const double> x,
                         std::span<const double> target) {
  return Objective(m, observed).value(x, target);
}

ReconstructionReport dlg_reconstruct(const model::ModelState& m, const fl::PlaintextView& observed,
                                     const AttackConfig& cfg, std::uint64_t seed, std::span<const double> truth) {
  cfg.validate();
  const std::size_t dim = m.arch().input.size();
  const std::size_t classes = m.arch().classes;
  if (truth.size() != dim) throw UsageError("ground-truth example has the wrong length");
  const Objective obj(m, observed);

  ReconstructionReport rep;
  rep.visible_count = obj.visible();
  rep.inferred_label = label_infer(observed, m);
  rep.target_variance = variance(truth);

  Objective::LabelMode mode = Objective::LabelMode::fixed;
  std::vector<double> fixed;
  if (m.arch().loss() == model::LossKind::squared_error) {
    mode = Objective::LabelMode::free;
  } else if (rep.inferred_label) {
    fixed = model::one_hot(*rep.inferred_label, classes);
  } else {
    mode = Objective::LabelMode::softmax;
  }

  rep.per_restart.resize(cfg.restarts);
  const std::size_t workers = cfg.threads ? cfg.threads : default_worker_count();
  parallel_for(cfg.restarts, workers, [&](std::size_t r) {
    RestartResult& out = rep.per_restart[r];
    out.index = r;
    Rng rng(derive_seed(seed, "restart", {r}));
    std::vector<double> x(dim), l(mode == Objective::LabelMode::fixed ? 0 : classes);
    for (auto& v : x) v = rng.uniform01();
    for (auto& v : l) v = rng.normal();
    out.init_mse = mse(x, truth);

    std::vector<double> t;
    if (obj.visible() > 0) {
      Adam ax, al;
      std::vector<double> gx, gl, last_x = x;
      for (std::size_t it = 0; it < cfg.iterations; ++it) {
        double d;
        try {
          d = obj.value_and_gradient(x, mode, fixed, l, gx, gl);
        } catch (const NumericError&) {
          d = std::numeric_limits<double>::quiet_NaN();
        }
        if (!std::isfinite(d)) {
          out.diverged = true;
          x = last_x;
          break;
        }
        last_x = x;
        ax.step(x, gx, cfg);
        if (!l.empty()) al.step(l, gl, cfg);
        out.iterations_run = it + 1;
      }
    }
    obj.target(mode, fixed, l, t);
    try {
      out.gradient_distance = obj.value(x, t);
    } catch (const NumericError&) {
      out.gradient_distance = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(out.gradient_distance)) out.diverged = true;
    out.input_mse = mse(x, truth);
    out.reconstruction = std::move(x);
  });

  std::optional<std::size_t> best;
  for (const auto& r : rep.per_restart) {
    if (r.diverged) continue;
    if (!best || r.gradient_distance < rep.per_restart[*best].gradient_distance) best = r.index;
  }
  const RestartResult& chosen = rep.per_restart[best.value_or(0)];
  rep.best_restart = chosen.index;
  rep.final_gradient_distance = chosen.gradient_distance;
  rep.input_mse = chosen.input_mse;
  rep.init_mse = chosen.init_mse;
  rep.reconstruction = chosen.reconstruction;
  rep.psnr_db = rep.input_mse > 0.0 ? 10.0 * std::log10(1.0 / rep.input_mse) : std::numeric_limits<double>::infinity();
  rep.success = best.has_value() && rep.input_mse < cfg.success_factor * rep.target_variance;
  return rep;
}

std::vector<SweepRow> attack_sweep(std::span<const double> ratios, const fl::FlConfig& base,
                                   const AttackConfig& attack, std::span<const std::uint64_t> seeds) {
  std::vector<SweepRow> rows;
  for (double ratio : ratios) {
    SweepRow row;
    row.ratio = ratio;
    for (std::uint64_t s : seeds) {
      fl::FlConfig cfg = base;
      cfg.seed = s;
      cfg.single_step = true;
      cfg.batch_size = 1;
      cfg.encryption_ratios = {ratio};
      const fl::Federation fed = fl::make_federation(cfg, ratio);
      const auto mask = fl::round_mask(fed, 1);
      const auto local = fl::local_update(fed.global, fed.shards[0], cfg, 1, 0);
      const auto update = fl::seal_update(local.delta, mask, *fed.keys.ctx, fed.keys.keys.public_key, cfg.clip,
                                          derive_seed(s, "enc", {1, 0}));
      row.reports.push_back(
          dlg_reconstruct(fed.global, update.plaintext_sparse, attack, derive_seed(s, "attack"), local.batch[0].features));
    }
    const double n = seeds.empty() ? 1.0 : static_cast<double>(seeds.size());
    for (const auto& r : row.reports) {
      row.mean_input_mse += r.input_mse / n;
      row.mean_init_mse += r.init_mse / n;
      row.mean_gradient_distance += r.final_gradient_distance / n;
      row.mean_visible += static_cast<double>(r.visible_count) / n;
      row.success_rate += (r.success ? 1.0 : 0.0) / n;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_pgm(const std::filesystem::path& path, std::span<const double> pixels, const model::InputShape& shape) {
  if (pixels.size() != shape.size()) throw UsageError("pgm: pixel count does not match shape");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << shape.width << ' ' << shape.height << "\n255\n";
  const std::size_t plane = shape.height * shape.width;
  for (std::size_t p = 0; p < plane; ++p) {
    double v = 0.0;
    for (std::size_t c = 0; c < shape.channels; ++c) v += pixels[c * plane + p];
    v = std::clamp(v / static_cast<double>(shape.channels), 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace hefl::dlg
