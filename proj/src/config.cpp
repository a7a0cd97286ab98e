// Copyright 2026 The DAGC Authors. All Rights Reserved.
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
// =============================================================================

#include "dagc/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "dagc/error.hpp"

namespace dagc::config {
namespace {

using train::TrainConfig;

struct Number {
  std::string text;
  double value;
};
using Value = std::variant<Number, std::string, std::vector<double>>;

struct Entry {
  Value value;
  std::size_t line;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& why) {
  throw ConfigError("line " + std::to_string(line) + ": " + why);
}

double parse_double(const std::string& text, std::size_t line) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || errno == ERANGE) fail(line, "invalid number '" + text + "'");
  return v;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

Value parse_value(const std::string& raw, std::size_t line) {
  if (raw.empty()) fail(line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
      out.push_back(raw[i]);
    }
    return out;
  }
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated list");
    std::vector<double> values;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      values.push_back(parse_double(item, line));
    }
    return values;
  }
  return Number{raw, parse_double(raw, line)};
}

std::string type_error(const std::string& key, const char* expected) {
  return "field '" + key + "' must be " + expected;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  double real(const std::string& key) const {
    const Entry& e = entries_.at(key);
    if (const auto* n = std::get_if<Number>(&e.value)) return n->value;
    fail(e.line, type_error(key, "a number"));
  }

  std::size_t count(const std::string& key) const {
    const std::uint64_t v = integer(key);
    return static_cast<std::size_t>(v);
  }

  std::uint64_t integer(const std::string& key) const {
    const Entry& e = entries_.at(key);
    const auto* n = std::get_if<Number>(&e.value);
    if (!n) fail(e.line, type_error(key, "a non-negative integer"));
    if (n->text.empty() || n->text.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("field '" + key + "' = " + n->text + " out of range: must be a non-negative integer");
    }
    errno = 0;
    const auto v = std::strtoull(n->text.c_str(), nullptr, 10);
    if (errno == ERANGE) fail(e.line, "field '" + key + "' overflows 64 bits");
    return v;
  }

  std::string text(const std::string& key) const {
    const Entry& e = entries_.at(key);
    if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
    fail(e.line, type_error(key, "a quoted string"));
  }

  std::vector<double> list(const std::string& key) const {
    const Entry& e = entries_.at(key);
    if (const auto* l = std::get_if<std::vector<double>>(&e.value)) return *l;
    fail(e.line, type_error(key, "a list like [0.5, 0.5]"));
  }

 private:
  std::map<std::string, Entry> entries_;
};

using Setter = std::function<void(const Reader&, const std::string&, TrainConfig&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset.kind", [](const Reader& r, const std::string& k, TrainConfig& c) {
         c.dataset.kind = train::dataset_kind_from_string(r.text(k));
       }},
      {"dataset.samples", [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.samples = r.count(k); }},
      {"dataset.test_samples",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.test_samples = r.count(k); }},
      {"dataset.features", [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.features = r.count(k); }},
      {"dataset.classes", [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.classes = r.count(k); }},
      {"dataset.centroid_scale",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.centroid_scale = r.real(k); }},
      {"dataset.seed", [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.seed = r.integer(k); }},
      {"dataset.train_images",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.train_images = r.text(k); }},
      {"dataset.train_labels",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.train_labels = r.text(k); }},
      {"dataset.test_images",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.test_images = r.text(k); }},
      {"dataset.test_labels",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.dataset.test_labels = r.text(k); }},

      {"partition.workers", [](const Reader& r, const std::string& k, TrainConfig& c) { c.workers = r.count(k); }},
      {"partition.weights", [](const Reader& r, const std::string& k, TrainConfig& c) {
         c.weight_source = train::weight_source_from_string(r.text(k));
       }},
      {"partition.skew_ratio", [](const Reader& r, const std::string& k, TrainConfig& c) { c.skew_ratio = r.real(k); }},
      {"partition.p_large", [](const Reader& r, const std::string& k, TrainConfig& c) { c.p_large = r.real(k); }},
      {"partition.explicit",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.explicit_weights = r.list(k); }},
      {"partition.alpha", [](const Reader& r, const std::string& k, TrainConfig& c) { c.alpha = r.real(k); }},

      {"compression.strategy", [](const Reader& r, const std::string& k, TrainConfig& c) {
         c.strategy = train::strategy_from_string(r.text(k));
       }},
      {"compression.mean_ratio", [](const Reader& r, const std::string& k, TrainConfig& c) { c.mean_ratio = r.real(k); }},
      {"compression.mean_threshold",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.mean_threshold = r.real(k); }},
      {"compression.ratios", [](const Reader& r, const std::string& k, TrainConfig& c) { c.manual_ratios = r.list(k); }},
      {"compression.thresholds",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.manual_thresholds = r.list(k); }},
      {"compression.relative_compressor", [](const Reader& r, const std::string& k, TrainConfig& c) {
         c.relative_compressor = train::relative_compressor_from_string(r.text(k));
       }},
      {"compression.rounding", [](const Reader& r, const std::string& k, TrainConfig& c) {
         c.rounding = train::rounding_from_string(r.text(k));
       }},
      {"compression.accordion_switch",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.accordion_switch = r.real(k); }},
      {"compression.accordion_epoch",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.accordion_epoch = r.count(k); }},

      {"model.arch", [](const Reader& r, const std::string& k, TrainConfig& c) {
         try {
           c.arch = model::architecture_from_string(r.text(k));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"model.hidden", [](const Reader& r, const std::string& k, TrainConfig& c) { c.hidden = r.count(k); }},

      {"train.lr", [](const Reader& r, const std::string& k, TrainConfig& c) { c.lr = r.real(k); }},
      {"train.batch", [](const Reader& r, const std::string& k, TrainConfig& c) { c.batch = r.count(k); }},
      {"train.iterations", [](const Reader& r, const std::string& k, TrainConfig& c) { c.iterations = r.count(k); }},
      {"train.eval_interval",
       [](const Reader& r, const std::string& k, TrainConfig& c) { c.eval_interval = r.count(k); }},
      {"train.seed", [](const Reader& r, const std::string& k, TrainConfig& c) { c.seed = r.integer(k); }},
      {"train.threads", [](const Reader& r, const std::string& k, TrainConfig& c) { c.threads = r.count(k); }},
      {"train.trace", [](const Reader& r, const std::string& k, TrainConfig& c) { c.trace_path = r.text(k); }},
  };
  return table;
}

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out + "\"";
}

std::string list_text(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + real_text(values[i]);
  return out + "]";
}

}  // namespace

TrainConfig parse_config_text(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::stringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  static const std::set<std::string> sections = {"dataset", "partition", "compression", "model", "train"};
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) fail(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (section.empty()) fail(line_no, "key '" + key + "' appears before any [section]");
    const std::string full = section + "." + key;
    if (!setters().count(full)) fail(line_no, "unknown key '" + full + "'");
    if (entries.count(full)) fail(line_no, "duplicate key '" + full + "'");
    entries.emplace(full, Entry{parse_value(trim(line.substr(eq + 1)), line_no), line_no});
  }

  TrainConfig config;
  std::vector<std::string> keys;
  for (const auto& [key, entry] : entries) keys.push_back(key);
  const Reader reader(std::move(entries));
  for (const auto& key : keys) setters().at(key)(reader, key, config);
  config.validate();
  return config;
}

TrainConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string to_toml(const TrainConfig& c) {
  std::ostringstream out;
  out << "[dataset]\n";
  out << "kind = " << quoted(train::to_string(c.dataset.kind)) << '\n';
  out << "samples = " << c.dataset.samples << '\n';
  out << "test_samples = " << c.dataset.test_samples << '\n';
  out << "features = " << c.dataset.features << '\n';
  out << "classes = " << c.dataset.classes << '\n';
  out << "centroid_scale = " << real_text(c.dataset.centroid_scale) << '\n';
  if (c.dataset.seed) out << "seed = " << *c.dataset.seed << '\n';
  if (!c.dataset.train_images.empty()) out << "train_images = " << quoted(c.dataset.train_images) << '\n';
  if (!c.dataset.train_labels.empty()) out << "train_labels = " << quoted(c.dataset.train_labels) << '\n';
  if (!c.dataset.test_images.empty()) out << "test_images = " << quoted(c.dataset.test_images) << '\n';
  if (!c.dataset.test_labels.empty()) out << "test_labels = " << quoted(c.dataset.test_labels) << '\n';

  out << "\n[partition]\n";
  out << "workers = " << c.workers << '\n';
  out << "weights = " << quoted(train::to_string(c.weight_source)) << '\n';
  out << "skew_ratio = " << real_text(c.skew_ratio) << '\n';
  out << "p_large = " << real_text(c.p_large) << '\n';
  if (!c.explicit_weights.empty()) out << "explicit = " << list_text(c.explicit_weights) << '\n';
  out << "alpha = " << real_text(c.alpha) << '\n';

  out << "\n[compression]\n";
  out << "strategy = " << quoted(train::to_string(c.strategy)) << '\n';
  if (c.mean_ratio) out << "mean_ratio = " << real_text(*c.mean_ratio) << '\n';
  if (c.mean_threshold) out << "mean_threshold = " << real_text(*c.mean_threshold) << '\n';
  if (!c.manual_ratios.empty()) out << "ratios = " << list_text(c.manual_ratios) << '\n';
  if (!c.manual_thresholds.empty()) out << "thresholds = " << list_text(c.manual_thresholds) << '\n';
  out << "relative_compressor = " << quoted(train::to_string(c.relative_compressor)) << '\n';
  out << "rounding = " << quoted(train::to_string(c.rounding)) << '\n';
  out << "accordion_switch = " << real_text(c.accordion_switch) << '\n';
  out << "accordion_epoch = " << c.accordion_epoch << '\n';

  out << "\n[model]\n";
  out << "arch = " << quoted(model::to_string(c.arch)) << '\n';
  out << "hidden = " << c.hidden << '\n';

  out << "\n[train]\n";
  out << "lr = " << real_text(c.lr) << '\n';
  out << "batch = " << c.batch << '\n';
  out << "iterations = " << c.iterations << '\n';
  out << "eval_interval = " << c.eval_interval << '\n';
  out << "seed = " << c.seed << '\n';
  out << "threads = " << c.threads << '\n';
  if (!c.trace_path.empty()) out << "trace = " << quoted(c.trace_path) << '\n';
  return out.str();
}

}  // namespace dagc::config
