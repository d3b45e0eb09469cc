// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/fl/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hefl/common/error.hpp"
#include "hefl/common/parallel.hpp"
#include "hefl/common/rng.hpp"
#include "hefl/model/checkpoint.hpp"
#include "hefl/model/training.hpp"

namespace hefl::fl {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

model::Dataset head(const model::Dataset& d, std::size_t n) {
  model::Dataset out = d;
  if (out.examples.size() > n) out.examples.resize(n);
  return out;
}

json example_json(const model::Example& ex) { return json{{"features", ex.features}, {"label", ex.label}}; }

}  // namespace

json record_to_json(const RoundRecord& r) {
  return json{{"round", r.round},
              {"encryption_ratio", r.encryption_ratio},
              {"train_accuracy", r.train_accuracy},
              {"test_accuracy", r.test_accuracy},
              {"avg_train_loss", r.avg_train_loss},
              {"test_loss", r.test_loss},
              {"encrypted_count", r.encrypted_count},
              {"parameter_count", r.parameter_count},
              {"mask_fingerprint", hex64(r.mask_fingerprint)},
              {"times_ms",
               {{"train", r.times.train},
                {"encrypt", r.times.encrypt},
                {"aggregate_he", r.times.aggregate_he},
                {"aggregate_plain", r.times.aggregate_plain},
                {"decrypt", r.times.decrypt}}}};
}

RoundRecord record_from_json(const json& j) {
  RoundRecord r;
  r.round = j.at("round").get<std::size_t>();
  r.encryption_ratio = j.at("encryption_ratio").get<double>();
  r.train_accuracy = j.at("train_accuracy").get<double>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  r.avg_train_loss = j.at("avg_train_loss").get<double>();
  r.test_loss = j.at("test_loss").get<double>();
  r.encrypted_count = j.at("encrypted_count").get<std::size_t>();
  r.parameter_count = j.at("parameter_count").get<std::size_t>();
  r.mask_fingerprint = parse_hex64(j.at("mask_fingerprint").get<std::string>());
  const auto& t = j.at("times_ms");
  r.times.train = t.at("train").get<double>();
  r.times.encrypt = t.at("encrypt").get<double>();
  r.times.aggregate_he = t.at("aggregate_he").get<double>();
  r.times.aggregate_plain = t.at("aggregate_plain").get<double>();
  r.times.decrypt = t.at("decrypt").get<double>();
  return r;
}

std::vector<RoundRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file " + path.string());
  std::vector<RoundRecord> out;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      try {
        out.push_back(record_from_json(json::parse(line)));
      } catch (const json::exception& e) {
        throw ParseError(offset, path.string() + ": bad record line: " + e.what());
      }
    }
    offset += line.size() + 1;
  }
  return out;
}

Federation make_federation(const FlConfig& cfg, double ratio) {
  cfg.validate();
  model::Dataset train, test;
  if (cfg.dataset == "toy-vision") {
    const std::uint64_t templates = derive_seed(cfg.seed, "templates");
    train = model::make_toy_vision(cfg.train_size, templates, derive_seed(cfg.seed, "train"));
    test = model::make_toy_vision(cfg.test_size, templates, derive_seed(cfg.seed, "test"));
  } else {
    const std::filesystem::path dir = cfg.dataset.substr(std::string("cifar10:").size());
    train = head(model::load_cifar10(dir, true), cfg.train_size);
    test = head(model::load_cifar10(dir, false), cfg.test_size);
  }
  auto shards = model::partition_iid(train, cfg.clients, derive_seed(cfg.seed, "partition"));
  auto keys = generate_keys(cfg.ckks_profile, cfg.seed);
  const auto arch = model::Architecture::parse(cfg.arch, train.shape, train.class_count);
  auto global = model::build_model(arch, derive_seed(cfg.seed, "init"));
  return Federation{cfg, ratio, std::move(train), std::move(test), std::move(shards), std::move(keys),
                    std::move(global), {}, 0, {}};
}

sensitivity::SelectionMask round_mask(const Federation& fed, std::size_t round) {
  sensitivity::SensitivityMap s;
  if (fed.config.sensitivity_method == sensitivity::Method::jacobian) {
    std::vector<std::vector<model::Example>> batches;
    const auto& ex = fed.test.examples;
    for (std::size_t b = 0; b < fed.config.calibration_batches; ++b) {
      const std::size_t start = b * fed.config.batch_size;
      if (start >= ex.size()) break;
      const std::size_t end = std::min(ex.size(), start + fed.config.batch_size);
      batches.emplace_back(ex.begin() + static_cast<std::ptrdiff_t>(start), ex.begin() + static_cast<std::ptrdiff_t>(end));
    }
    if (batches.empty()) throw ConfigError("jacobian sensitivity needs a non-empty test set for calibration");
    s = sensitivity::jacobian_map(fed.global, batches);
  } else if (fed.last_aggregate.empty()) {
    s = sensitivity::magnitude_map(fed.global);
  } else {
    s = sensitivity::magnitude_map(fed.last_aggregate);
  }
  s.source_round = round;
  return sensitivity::select_top_r(s, fed.ratio);
}

RoundRecord run_round(Federation& fed) {
  const FlConfig& cfg = fed.config;
  const std::size_t t = fed.completed_rounds + 1;
  const auto mask = round_mask(fed, t);

  std::vector<ClientUpdate> updates(cfg.clients);
  std::vector<LocalResult> captured(cfg.clients);
  const std::size_t workers = cfg.threads ? cfg.threads : default_worker_count();
  parallel_for(cfg.clients, workers, [&](std::size_t i) {
    try {
      LocalResult local = local_update(fed.global, fed.shards[i], cfg, t, i);
      ClientUpdate u = seal_update(local.delta, mask, *fed.keys.ctx, fed.keys.keys.public_key, cfg.clip,
                                   derive_seed(cfg.seed, "enc", {t, i}));
      u.round = t;
      u.client_id = i;
      u.train_loss = local.loss;
      u.train_ms = local.train_ms;
      updates[i] = std::move(u);
      if (cfg.capture_round == t && cfg.capture_client == i) captured[i] = std::move(local);
    } catch (Error& e) {
      e.add_context("round " + std::to_string(t) + " client " + std::to_string(i));
      throw;
    }
  });

  if (!fed.capture_dir.empty() && cfg.capture_round == t) {
    const std::size_t i = cfg.capture_client;
    CapturedUpdate c;
    c.round = t;
    c.client_id = i;
    c.encryption_ratio = fed.ratio;
    c.arch = fed.global.arch();
    c.global_weights.assign(fed.global.flat().begin(), fed.global.flat().end());
    c.plaintext = updates[i].plaintext_sparse;
    c.encrypted_count = updates[i].encrypted_count;
    c.encrypted_chunks = updates[i].encrypted_chunks.size();
    if (captured[i].batch.size() == 1) c.target = captured[i].batch.front();
    write_capture(fed.capture_dir / ("update_r" + ratio_tag(fed.ratio) + "_t" + std::to_string(t) + "_c" +
                                     std::to_string(i) + ".json"),
                  c);
  }

  AggregateResult agg;
  try {
    agg = aggregate(updates, mask, *fed.keys.ctx, fed.keys.keys.secret_key);
  } catch (Error& e) {
    e.add_context("round " + std::to_string(t) + " aggregation");
    throw;
  }
  const double eta = cfg.single_step ? cfg.optimizer.lr : cfg.server_lr;
  apply_global_update(fed.global, agg.gradient, eta);
  fed.last_aggregate = std::move(agg.gradient.values);
  fed.completed_rounds = t;

  RoundRecord r;
  r.round = t;
  r.encryption_ratio = fed.ratio;
  r.encrypted_count = mask.size();
  r.parameter_count = mask.parameter_count;
  r.mask_fingerprint = mask.fingerprint();
  double loss_sum = 0.0;
  for (const auto& u : updates) {
    loss_sum += u.train_loss;
    r.times.train += u.train_ms;
    r.times.encrypt += u.encrypt_ms;
  }
  r.avg_train_loss = loss_sum / static_cast<double>(updates.size());
  r.times.aggregate_he = agg.aggregate_he_ms;
  r.times.aggregate_plain = agg.aggregate_plain_ms;
  r.times.decrypt = agg.decrypt_ms;
  const auto train_eval = model::evaluate(fed.global, fed.train);
  const auto test_eval = model::evaluate(fed.global, fed.test);
  r.train_accuracy = train_eval.accuracy;
  r.test_accuracy = test_eval.accuracy;
  r.test_loss = test_eval.avg_loss;
  return r;
}

std::string ratio_tag(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ratio);
  return buf;
}

std::filesystem::path records_path(const std::filesystem::path& out_dir, double ratio) {
  return out_dir / ("records_r" + ratio_tag(ratio) + ".jsonl");
}

std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, double ratio) {
  return out_dir / ("checkpoint_r" + ratio_tag(ratio) + ".ckpt");
}

ExperimentResult run_experiment(const FlConfig& cfg, double ratio, const std::filesystem::path& out_dir,
                                const std::optional<std::filesystem::path>& resume) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  Federation fed = make_federation(cfg, ratio);
  fed.capture_dir = out_dir;
  const auto rec_path = records_path(out_dir, ratio);
  const auto ckpt_path = checkpoint_path(out_dir, ratio);
  ExperimentResult result{ratio, {}, fed.global};

  if (resume) {
    const auto ckpt = model::load_checkpoint(*resume);
    const auto& meta = ckpt.meta;
    if (meta.value("transcript", std::string()) != hex64(cfg.transcript_fingerprint()) ||
        meta.value("encryption_ratio", -1.0) != ratio || !(ckpt.arch == fed.global.arch())) {
      throw ConfigError("checkpoint " + resume->string() + " was written by a different configuration");
    }
    if (ckpt.round > cfg.rounds) throw ConfigError("checkpoint round is past the configured round count");
    fed.global = ckpt.model();
    if (const auto* agg = ckpt.blob("last_aggregate")) fed.last_aggregate = *agg;
    fed.completed_rounds = ckpt.round;
    if (std::filesystem::exists(rec_path)) {
      for (auto& r : read_records(rec_path)) {
        if (r.round <= ckpt.round) result.records.push_back(r);
      }
    }
    if (result.records.size() != ckpt.round) {
      throw ConfigError("records file " + rec_path.string() + " does not cover the checkpointed rounds");
    }
  }

  std::ofstream records(rec_path, std::ios::trunc);
  if (!records) throw IoError("cannot write " + rec_path.string());
  for (const auto& r : result.records) records << record_to_json(r).dump() << '\n';

  while (fed.completed_rounds < cfg.rounds) {
    const RoundRecord r = run_round(fed);
    records << record_to_json(r).dump() << '\n';
    records.flush();
    if (!records) throw IoError("short write to " + rec_path.string());
    result.records.push_back(r);
    if (r.round % cfg.checkpoint_every == 0 || r.round == cfg.rounds) {
      model::Checkpoint ckpt;
      ckpt.arch = fed.global.arch();
      ckpt.round = r.round;
      ckpt.blobs.emplace_back("weights", std::vector<double>(fed.global.flat().begin(), fed.global.flat().end()));
      ckpt.blobs.emplace_back("last_aggregate", fed.last_aggregate);
      ckpt.meta = {{"transcript", hex64(cfg.transcript_fingerprint())}, {"encryption_ratio", ratio}};
      model::save_checkpoint(ckpt_path, ckpt);
    }
  }
  result.final_model = fed.global;
  return result;
}

std::vector<ExperimentResult> run_sweep(const FlConfig& cfg, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  {
    std::ofstream out(out_dir / "config.json", std::ios::trunc);
    if (!out) throw IoError("cannot write " + (out_dir / "config.json").string());
    out << cfg.to_json().dump(2) << '\n';
  }
  std::vector<ExperimentResult> results;
  for (double r : cfg.encryption_ratios) results.push_back(run_experiment(cfg, r, out_dir));
  return results;
}

void write_capture(const std::filesystem::path& path, const CapturedUpdate& c) {
  json j;
  j["round"] = c.round;
  j["client_id"] = c.client_id;
  j["encryption_ratio"] = c.encryption_ratio;
  j["arch"] = c.arch.name();
  j["input"] = {c.arch.input.channels, c.arch.input.height, c.arch.input.width};
  j["classes"] = c.arch.classes;
  j["global_weights"] = c.global_weights;
  std::vector<std::size_t> idx;
  std::vector<double> val;
  for (const auto& [i, v] : c.plaintext.entries) {
    idx.push_back(i);
    val.push_back(v);
  }
  j["plaintext"] = {{"parameter_count", c.plaintext.parameter_count}, {"indices", idx}, {"values", val}};
  j["encrypted_count"] = c.encrypted_count;
  j["encrypted_chunks"] = c.encrypted_chunks;
  if (c.target) j["target"] = example_json(*c.target);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump() << '\n';
}

CapturedUpdate read_capture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open captured update " + path.string());
  CapturedUpdate c;
  try {
    const json j = json::parse(in);
    c.round = j.at("round").get<std::size_t>();
    c.client_id = j.at("client_id").get<std::size_t>();
    c.encryption_ratio = j.at("encryption_ratio").get<double>();
    const auto input = j.at("input").get<std::vector<std::size_t>>();
    if (input.size() != 3) throw ConfigError("captured update: input shape must have three entries");
    c.arch = model::Architecture::parse(j.at("arch").get<std::string>(), {input[0], input[1], input[2]},
                                        j.at("classes").get<std::size_t>());
    c.global_weights = j.at("global_weights").get<std::vector<double>>();
    const auto& p = j.at("plaintext");
    c.plaintext.parameter_count = p.at("parameter_count").get<std::size_t>();
    const auto idx = p.at("indices").get<std::vector<std::size_t>>();
    const auto val = p.at("values").get<std::vector<double>>();
    if (idx.size() != val.size()) throw ConfigError("captured update: index and value lists differ in length");
    for (std::size_t k = 0; k < idx.size(); ++k) c.plaintext.entries.emplace_back(idx[k], val[k]);
    c.encrypted_count = j.at("encrypted_count").get<std::size_t>();
    c.encrypted_chunks = j.at("encrypted_chunks").get<std::size_t>();
    if (j.contains("target")) {
      model::Example ex;
      ex.features = j["target"].at("features").get<std::vector<double>>();
      ex.label = j["target"].at("label").get<int>();
      c.target = ex;
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return c;
}

}  // namespace hefl::fl
