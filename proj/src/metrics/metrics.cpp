// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hefl/common/error.hpp"

namespace hefl::metrics {

const RatioSummary& ExperimentSummary::at(double ratio) const {
  for (const auto& r : ratios) {
    if (r.ratio == ratio) return r;
  }
  throw ConfigError("experiment '" + profile + "' has no results for encryption ratio " + fl::ratio_tag(ratio));
}

ExperimentSummary summarize(const std::string& profile, std::span<const std::vector<fl::RoundRecord>> per_ratio) {
  if (per_ratio.empty()) throw ConfigError("no records to summarize");
  ExperimentSummary s;
  s.profile = profile;
  std::vector<std::size_t> order(per_ratio.size());
  for (std::size_t i = 0; i < per_ratio.size(); ++i) {
    if (per_ratio[i].empty()) throw ConfigError("empty record set for experiment '" + profile + "'");
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return per_ratio[a].front().encryption_ratio < per_ratio[b].front().encryption_ratio;
  });
  for (std::size_t i : order) {
    const auto& recs = per_ratio[i];
    RatioSummary r;
    r.ratio = recs.front().encryption_ratio;
    for (const auto& x : recs) {
      if (x.encryption_ratio != r.ratio) throw ConfigError("record group mixes encryption ratios");
    }
    if (!s.ratios.empty() && s.ratios.back().ratio == r.ratio) {
      throw ConfigError("duplicate results for encryption ratio " + fl::ratio_tag(r.ratio));
    }
    r.rounds = recs.size();
    r.train_acc = recs.back().train_accuracy;
    r.test_acc = recs.back().test_accuracy;
    double loss = 0.0;
    for (const auto& x : recs) {
      loss += x.avg_train_loss;
      r.stage_ms.train += x.times.train;
      r.stage_ms.encrypt += x.times.encrypt;
      r.stage_ms.aggregate_he += x.times.aggregate_he;
      r.stage_ms.aggregate_plain += x.times.aggregate_plain;
      r.stage_ms.decrypt += x.times.decrypt;
    }
    r.avg_loss = loss / static_cast<double>(recs.size());
    r.total_train_hours = r.stage_ms.total() / 3.6e6;
    s.ratios.push_back(r);
    s.records.push_back(recs);
  }
  return s;
}

NormalizationBounds compute_bounds(std::span<const ExperimentSummary> experiments) {
  NormalizationBounds b;
  bool first = true;
  for (const auto& e : experiments) {
    for (const auto& r : e.ratios) {
      const double t = r.total_train_hours, g = r.generalization_gap(), l = r.avg_loss;
      if (first) {
        b = {t, t, g, g, l, l};
        first = false;
        continue;
      }
      b.t_min = std::min(b.t_min, t);
      b.t_max = std::max(b.t_max, t);
      b.gap_min = std::min(b.gap_min, g);
      b.gap_max = std::max(b.gap_max, g);
      b.loss_min = std::min(b.loss_min, l);
      b.loss_max = std::max(b.loss_max, l);
    }
  }
  if (first) throw ConfigError("no experiments to bound");
  return b;
}

Metric normalized_inverse(double v, double lo, double hi) {
  if (!(hi > lo)) return {1.0, true};
  return {1.0 - (v - lo) / (hi - lo), false};
}

double accuracy_metric(const ExperimentSummary& s, double ratio) { return s.at(ratio).test_acc; }

Metric comp_efficiency(const ExperimentSummary& s, const NormalizationBounds& b, double ratio) {
  return normalized_inverse(s.at(ratio).total_train_hours, b.t_min, b.t_max);
}

Metric gen_efficiency(const ExperimentSummary& s, const NormalizationBounds& b, double ratio) {
  return normalized_inverse(s.at(ratio).generalization_gap(), b.gap_min, b.gap_max);
}

Metric loss_efficiency(const ExperimentSummary& s, const NormalizationBounds& b, double ratio) {
  return normalized_inverse(s.at(ratio).avg_loss, b.loss_min, b.loss_max);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // Avoid "-0.000000" so equal-looking values compare equal as text.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(text.size(), "unterminated quoted CSV field");
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hefl::metrics
