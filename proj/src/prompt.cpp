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


#include "itabnet/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "itabnet/errors.hpp"

namespace itabnet {
namespace {

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string StepSentence(std::size_t k, const std::vector<SalientFeature>& features, bool last) {
  std::string s = (last ? "Lastly, at the " : "At the ") + ordinal(static_cast<int>(k)) +
                  " step of feature selection, we observe mask " + std::to_string(k);
  if (features.empty()) return s + " with no main features highlighted.";
  std::vector<std::string> idx, names;
  for (const auto& f : features) {
    if (f.name.empty()) throw InputError("salient feature " + std::to_string(f.index) + " has no name");
    idx.push_back(std::to_string(f.index));
    names.push_back(f.name);
  }
  const bool one = features.size() == 1;
  s += one ? " with the main feature highlighted as " : " with the main features highlighted as ";
  s += join_list(idx);
  s += one ? " which is " : " which are ";
  s += join_list(names);
  s += '.';
  return s;
}

}  // namespace

std::string ordinal(int n) {
  const int mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1:
        suffix = "st";
        break;
      case 2:
        suffix = "nd";
        break;
      case 3:
        suffix = "rd";
        break;
      default:
        break;
    }
  }
  return std::to_string(n) + suffix;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) s += i + 1 == items.size() ? " and " : ", ";
    s += items[i];
  }
  return s;
}

std::string describe_masks(const SalientSummary& summary) {
  if (summary.per_step.empty()) throw InputError("salient summary has no steps");
  const std::size_t k = summary.per_step.size();
  std::string out;
  for (std::size_t s = 0; s < k; ++s) {
    if (s) out += ' ';
    out += StepSentence(s, summary.per_step[s], k > 1 && s + 1 == k);
  }
  return out;
}

PromptBundle compile_prompt(const DatasetMeta& meta, const SalientSummary& summary,
                            const std::vector<IclExample>& examples,
                            const std::optional<std::string>& persona,
                            const std::string& instruction) {
  if (examples.size() > 2) throw ConfigError("at most two in-context examples are supported");
  PromptBundle b;
  b.persona_prefix = persona;
  b.output_instruction = instruction;
  b.dataset_description = Trim(meta.description) + " There are " + std::to_string(meta.n_test) +
                          " test samples and " + std::to_string(meta.n_features) + " features.";
  b.mask_description = describe_masks(summary);
  b.in_context_examples = examples;
  for (std::size_t k = 0; k < summary.per_step.size(); ++k) {
    b.expected_schema.push_back("Mask " + std::to_string(k));
  }
  b.expected_schema.push_back("Aggregate");

  std::string& t = b.text;
  if (persona && !Trim(*persona).empty()) t = Trim(*persona) + " ";
  t += instruction;
  t += "\n\n" + b.dataset_description;
  t += "\n\n" + b.mask_description;
  if (!examples.empty()) {
    t += "\n\n";
    t += kExamplesHeader;
    for (const auto& ex : examples) {
      t += "\n\n" + Trim(ex.prompt) + "\n\nOutput: " + Trim(ex.output);
    }
  }
  return b;
}

std::vector<IclExample> load_icl_corpus(const std::filesystem::path& dir) {
  std::istringstream index(ReadText(dir / "corpus.txt"));
  std::vector<IclExample> corpus;
  std::string name;
  while (std::getline(index, name)) {
    name = Trim(name);
    if (name.empty() || name[0] == '#') continue;
    corpus.push_back({name, Trim(ReadText(dir / (name + ".prompt.txt"))),
                      Trim(ReadText(dir / (name + ".output.txt")))});
  }
  return corpus;
}

std::vector<IclExample> select_icl_examples(const std::vector<IclExample>& corpus,
                                            const std::string& target, int count, int rotation) {
  if (count < 0 || count > 2) throw ConfigError("in-context example count must be 0, 1 or 2");
  std::vector<IclExample> rest;
  for (const auto& ex : corpus) {
    if (ex.name != target) rest.push_back(ex);
  }
  if (rest.empty() || count == 0) return {};
  if (static_cast<std::size_t>(count) > rest.size()) {
    throw ConfigError("not enough in-context examples in the corpus");
  }
  const auto n = static_cast<int>(rest.size());
  const int shift = ((rotation % n) + n) % n;
  std::rotate(rest.begin(), rest.begin() + shift, rest.end());
  rest.resize(static_cast<std::size_t>(count));
  return rest;
}

std::map<std::string, std::string> load_display_names(const std::filesystem::path& path) {
  std::istringstream in(ReadText(path));
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("display name line without '=': " + line);
    out[Trim(line.substr(0, eq))] = Trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<std::string> apply_display_names(const std::vector<std::string>& names,
                                             const std::map<std::string, std::string>& mapping) {
  std::vector<std::string> out;
  for (const auto& n : names) {
    auto it = mapping.find(n);
    out.push_back(it == mapping.end() ? n : it->second);
  }
  return out;
}

}  // namespace itabnet
