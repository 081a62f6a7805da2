// Copyright 2026 The itabnet Authors. All Rights Reserved.
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


#include "itabnet/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "itabnet/errors.hpp"
#include "json.hpp"

namespace itabnet {
namespace {

constexpr const char* kMagic = "itabnet-checkpoint 1";

std::string JoinInts(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> SplitInts(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

nlohmann::json SchemaToJson(const Dataset& schema) {
  nlohmann::json j;
  j["target"] = schema.target_name;
  j["class_labels"] = schema.class_labels;
  j["features"] = nlohmann::json::array();
  for (std::size_t f = 0; f < schema.feature_names.size(); ++f) {
    nlohmann::json fj;
    fj["name"] = schema.feature_names[f];
    if (f < schema.categorical.size() && schema.categorical[f]) {
      fj["categories"] = schema.categorical[f]->values;
    }
    j["features"].push_back(fj);
  }
  return j;
}

Dataset SchemaFromJson(const nlohmann::json& j) {
  Dataset ds;
  ds.target_name = j.at("target").get<std::string>();
  ds.class_labels = j.at("class_labels").get<std::vector<std::string>>();
  for (const auto& fj : j.at("features")) {
    ds.feature_names.push_back(fj.at("name").get<std::string>());
    if (fj.contains("categories")) {
      CategoricalMap map;
      for (const auto& v : fj.at("categories")) map.encode_or_insert(v.get<std::string>());
      ds.categorical.emplace_back(std::move(map));
    } else {
      ds.categorical.emplace_back(std::nullopt);
    }
  }
  ds.X = Matrix(0, ds.feature_names.size());
  return ds;
}

}  // namespace

Dataset dataset_schema(const Dataset& ds) {
  Dataset s;
  s.X = Matrix(0, ds.n_features());
  s.feature_names = ds.feature_names;
  s.categorical = ds.categorical;
  s.class_labels = ds.class_labels;
  s.target_name = ds.target_name;
  return s;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const Dataset& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  const ModelConfig& c = model.config();
  out << kMagic << "\n[config]\n";
  out << "n_d=" << c.n_d << "\nn_a=" << c.n_a << "\nn_steps=" << c.n_steps
      << "\nuse_prior_scale=" << (c.use_prior_scale ? 1 : 0);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", c.gamma);
  out << "\ngamma=" << buf;
  std::snprintf(buf, sizeof(buf), "%.17g", c.tau);
  out << "\ntau=" << buf << "\nn_features=" << c.n_features << "\nn_classes=" << c.n_classes
      << "\nn_shared=" << c.n_shared << "\nn_independent=" << c.n_independent
      << "\nmlp_hidden=" << c.mlp_hidden
      << "\ncategorical_cardinalities=" << JoinInts(c.categorical_cardinalities)
      << "\nseed=" << c.seed << "\n";
  out << "[schema]\n" << SchemaToJson(schema).dump() << "\n";
  out << "[tensors]\n";
  for (const auto& p : model.params()) {
    out << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", p.value.data()[i]);
      if (i) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string line;
  std::size_t line_no = 1;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("checkpoint " + path.string() + ": " + what, line_no, "");
  };
  if (!std::getline(in, line) || line != kMagic) throw fail("bad header");
  if (!std::getline(in, line) || line != "[config]") throw fail("missing [config]");

  std::map<std::string, std::string> kv;
  for (++line_no; std::getline(in, line); ++line_no) {
    if (line == "[schema]") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw fail("config key '" + key + "' missing");
    return it->second;
  };
  ModelConfig c;
  try {
    c.n_d = std::stoi(get("n_d"));
    c.n_a = std::stoi(get("n_a"));
    c.n_steps = std::stoi(get("n_steps"));
    c.use_prior_scale = get("use_prior_scale") == "1";
    c.gamma = std::stod(get("gamma"));
    c.tau = std::stod(get("tau"));
    c.n_features = std::stoi(get("n_features"));
    c.n_classes = std::stoi(get("n_classes"));
    c.n_shared = std::stoi(get("n_shared"));
    c.n_independent = std::stoi(get("n_independent"));
    c.mlp_hidden = std::stoi(get("mlp_hidden"));
    c.categorical_cardinalities = SplitInts(get("categorical_cardinalities"));
    c.seed = std::stoull(get("seed"));
  } catch (const std::logic_error&) {
    throw fail("malformed config value");
  }

  if (!std::getline(in, line)) throw fail("missing schema");
  ++line_no;
  Dataset schema;
  try {
    schema = SchemaFromJson(nlohmann::json::parse(line));
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("bad schema: ") + e.what());
  }
  if (schema.feature_names.size() != static_cast<std::size_t>(c.n_features)) {
    throw ShapeError("checkpoint schema and config disagree on the feature count");
  }

  Model model(c);
  if (!std::getline(in, line) || line != "[tensors]") throw fail("missing [tensors]");
  ++line_no;
  for (auto& p : model.params()) {
    if (!std::getline(in, line)) throw fail("missing tensor " + p.name);
    ++line_no;
    std::istringstream hs(line);
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(hs >> name >> rows >> cols)) throw fail("bad tensor header");
    if (name != p.name) throw ShapeError("checkpoint tensor '" + name + "' where '" + p.name +
                                         "' was expected");
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw ShapeError("checkpoint tensor " + name + " has shape " + std::to_string(rows) + "x" +
                       std::to_string(cols) + ", config implies " +
                       std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()));
    }
    if (!std::getline(in, line)) throw fail("missing values for " + name);
    ++line_no;
    const char* s = line.c_str();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(s, &end);
      if (end == s) throw fail("too few values for " + name);
      p.value.data()[i] = v;
      s = end;
    }
    while (*s == ' ') ++s;
    if (*s) throw fail("too many values for " + name);
  }
  if (std::getline(in, line) && !line.empty()) throw fail("unexpected trailing content");
  return {std::move(model), std::move(schema)};
}

}  // namespace itabnet
