// Copyright 2026 The hefl Authors.
// SPDX-License-Identifier: Apache-2.0

#include "hefl/fl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hefl/ckks/params.hpp"
#include "hefl/common/error.hpp"
#include "hefl/common/rng.hpp"

namespace hefl::fl {

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer, got " + v.dump());
  }
  return v.get<std::size_t>();
}

std::vector<double> get_ratios(const json& v) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) return parse_ratio_list(v.get<std::string>());
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("encryption_ratio list must contain numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  throw ConfigError("encryption_ratio must be a number or a list of numbers");
}

void apply_key(FlConfig& c, const std::string& key, const json& v) {
  if (key == "profile") {
    // Already consumed when choosing the defaults.
  } else if (key == "clients") {
    c.clients = get_count(v, key);
  } else if (key == "rounds") {
    c.rounds = get_count(v, key);
  } else if (key == "encryption_ratio") {
    c.encryption_ratios = get_ratios(v);
  } else if (key == "sensitivity_method") {
    c.sensitivity_method = sensitivity::parse_method(get_as<std::string>(v, key));
  } else if (key == "local_epochs") {
    c.local_epochs = get_count(v, key);
  } else if (key == "batch_size") {
    c.batch_size = get_count(v, key);
  } else if (key == "ckks_profile") {
    c.ckks_profile = get_as<std::string>(v, key);
  } else if (key == "seed") {
    c.seed = get_count(v, key);
  } else if (key == "dataset") {
    c.dataset = get_as<std::string>(v, key);
  } else if (key == "arch") {
    c.arch = get_as<std::string>(v, key);
  } else if (key == "lr") {
    c.optimizer.lr = get_as<double>(v, key);
  } else if (key == "momentum") {
    c.optimizer.momentum = get_as<double>(v, key);
  } else if (key == "weight_decay") {
    c.optimizer.weight_decay = get_as<double>(v, key);
  } else if (key == "lr_step") {
    c.optimizer.step_size = get_count(v, key);
  } else if (key == "lr_gamma") {
    c.optimizer.gamma = get_as<double>(v, key);
  } else if (key == "server_lr") {
    c.server_lr = get_as<double>(v, key);
  } else if (key == "clip") {
    c.clip = get_as<double>(v, key);
  } else if (key == "checkpoint_every") {
    c.checkpoint_every = get_count(v, key);
  } else if (key == "single_step") {
    c.single_step = get_as<bool>(v, key);
  } else if (key == "train_size") {
    c.train_size = get_count(v, key);
  } else if (key == "test_size") {
    c.test_size = get_count(v, key);
  } else if (key == "calibration_batches") {
    c.calibration_batches = get_count(v, key);
  } else if (key == "threads") {
    c.threads = get_count(v, key);
  } else if (key == "capture_round") {
    c.capture_round = get_count(v, key);
  } else if (key == "capture_client") {
    c.capture_client = get_count(v, key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace

FlConfig profile_defaults(const std::string& profile) {
  FlConfig c;
  c.profile = profile;
  if (profile == "paper") return c;
  if (profile == "desk") {
    c.rounds = 10;
    c.batch_size = 8;
    c.local_epochs = 2;
    c.optimizer.lr = 0.1;
    return c;
  }
  throw ConfigError("unknown run profile '" + profile + "' (expected paper or desk)");
}

FlConfig make_config(const json& file, const json& overrides) {
  if (!file.is_object()) throw ConfigError("config must be a JSON object");
  if (!overrides.is_object()) throw ConfigError("overrides must be a JSON object");
  std::string profile = "paper";
  if (file.contains("profile")) profile = get_as<std::string>(file["profile"], "profile");
  if (overrides.contains("profile")) profile = get_as<std::string>(overrides["profile"], "profile");
  FlConfig c = profile_defaults(profile);
  for (const auto& [k, v] : file.items()) apply_key(c, k, v);
  for (const auto& [k, v] : overrides.items()) apply_key(c, k, v);
  c.validate();
  return c;
}

FlConfig load_config(const std::filesystem::path& path, const json& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json file;
  try {
    file = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return make_config(file, overrides);
  } catch (Error& e) {
    e.add_context(path.string());
    throw;
  }
}

void FlConfig::validate() const {
  if (clients < 1) throw ConfigError("clients must be at least 1");
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (encryption_ratios.empty()) throw ConfigError("encryption_ratio list is empty");
  for (double r : encryption_ratios) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("encryption_ratio must lie in [0, 1], got " + std::to_string(r));
  }
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(server_lr > 0.0)) throw ConfigError("server_lr must be positive");
  if (!(clip > 0.0)) throw ConfigError("clip must be positive");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be at least 1");
  if (train_size < clients) throw ConfigError("train_size must be at least the number of clients");
  if (capture_round > 0 && capture_client >= clients) throw ConfigError("capture_client out of range");
  bool known = false;
  for (const auto& n : ckks::CkksParams::profile_names()) known = known || n == ckks_profile;
  if (!known) throw ConfigError("unknown ckks_profile '" + ckks_profile + "'");
  if (dataset != "toy-vision" && dataset.rfind("cifar10:", 0) != 0) {
    throw ConfigError("dataset must be toy-vision or cifar10:<dir>, got '" + dataset + "'");
  }
  optimizer.validate();
}

double FlConfig::ratio() const {
  if (encryption_ratios.size() != 1) throw ConfigError("expected a single encryption_ratio, got a sweep");
  return encryption_ratios.front();
}

json FlConfig::to_json() const {
  return json{{"profile", profile},
              {"clients", clients},
              {"rounds", rounds},
              {"encryption_ratio", encryption_ratios},
              {"sensitivity_method", sensitivity::to_string(sensitivity_method)},
              {"local_epochs", local_epochs},
              {"batch_size", batch_size},
              {"ckks_profile", ckks_profile},
              {"seed", seed},
              {"dataset", dataset},
              {"arch", arch},
              {"lr", optimizer.lr},
              {"momentum", optimizer.momentum},
              {"weight_decay", optimizer.weight_decay},
              {"lr_step", optimizer.step_size},
              {"lr_gamma", optimizer.gamma},
              {"server_lr", server_lr},
              {"clip", clip},
              {"checkpoint_every", checkpoint_every},
              {"single_step", single_step},
              {"train_size", train_size},
              {"test_size", test_size},
              {"calibration_batches", calibration_batches},
              {"threads", threads},
              {"capture_round", capture_round},
              {"capture_client", capture_client}};
}

std::uint64_t FlConfig::transcript_fingerprint() const {
  json j = to_json();
  for (const char* k : {"rounds", "encryption_ratio", "checkpoint_every", "threads", "capture_round", "capture_client"}) {
    j.erase(k);
  }
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::pair<std::string, json> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("override must look like key=value, got '" + text + "'");
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded() || parsed.is_object()) parsed = value;
  return {key, parsed};
}

std::vector<double> parse_ratio_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse encryption ratio '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty encryption ratio list");
  return out;
}

}  // namespace hefl::fl
