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


#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itabnet/masks.hpp"

namespace itabnet {

inline constexpr const char* kDefaultInstruction =
    "Conduct aggregate analysis on the description of the following feature mask. Please output "
    "ONLY a dictionary and no other natural language generation when generating the sentence as "
    "shown in the in-context example below. Please use single-word classification that "
    "encapsulates the meaning of the features if possible.";

inline constexpr const char* kExamplesHeader = "Here are in-context examples for few-shot learning.";

struct DatasetMeta {
  std::string name;
  std::string description;  // one or more sentences, no trailing space
  std::size_t n_test = 0;
  std::size_t n_features = 0;
};

struct IclExample {
  std::string name;
  std::string prompt;  // dataset and mask description paragraphs
  std::string output;  // the JSON reply
};

struct PromptBundle {
  std::string text;
  std::optional<std::string> persona_prefix;
  std::string output_instruction;
  std::string dataset_description;
  std::string mask_description;
  std::vector<IclExample> in_context_examples;
  // "Mask 0" .. "Mask K-1", "Aggregate".
  std::vector<std::string> expected_schema;
};

// 0th, 1st, 2nd, 3rd, 4th, ..., 11th, 12th, 13th, 21st, ...
std::string ordinal(int n);
// "a", "a and b", "a, b and c".
std::string join_list(const std::vector<std::string>& items);

// One sentence per step; the last one (K > 1) opens with "Lastly, ".
std::string describe_masks(const SalientSummary& summary);

// Sections joined by blank lines: [persona ]instruction, dataset sentence,
// mask sentences, then (when examples are given) the examples header and
// each example as "<prompt>\n\nOutput: <output>". Throws InputError for an
// empty summary or a salient feature without a name; ConfigError for more
// than two examples.
PromptBundle compile_prompt(const DatasetMeta& meta, const SalientSummary& summary,
                            const std::vector<IclExample>& examples,
                            const std::optional<std::string>& persona = std::nullopt,
                            const std::string& instruction = kDefaultInstruction);

// corpus.txt lists example names in order; each has <name>.prompt.txt and
// <name>.output.txt. Throws IoError.
std::vector<IclExample> load_icl_corpus(const std::filesystem::path& dir);

// Drops `target` from the corpus order, rotates the rest by `rotation`, and
// keeps the first `count`.
std::vector<IclExample> select_icl_examples(const std::vector<IclExample>& corpus,
                                            const std::string& target, int count,
                                            int rotation = 0);

// key=value lines mapping raw column names to the names used in prompts.
std::map<std::string, std::string> load_display_names(const std::filesystem::path& path);
std::vector<std::string> apply_display_names(const std::vector<std::string>& names,
                                             const std::map<std::string, std::string>& mapping);

}  // namespace itabnet
