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

#include "itabnet/dataset.hpp"
#include "itabnet/model.hpp"

namespace itabnet {

// Column names, categorical maps and class labels of the training data,
// held as a zero-row Dataset so it can seed load_csv_like().
Dataset dataset_schema(const Dataset& ds);

struct Checkpoint {
  Model model;
  Dataset schema;
};

// Text archive: a [config] section of key=value lines, a [schema] JSON line,
// then [tensors] with "name rows cols" headers each followed by one line of
// %.17g values. Loading rebuilds the model from the config and rejects any
// tensor whose name or shape disagrees. Throws IoError / ParseError /
// ShapeError.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const Dataset& schema);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace itabnet
