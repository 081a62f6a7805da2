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

#include <span>
#include <vector>

#include "itabnet/matrix.hpp"

namespace itabnet {

// Fraction of rows whose argmax (first index on ties) equals the label.
double accuracy(const Matrix& scores, std::span<const int> y);

// Rank-based ROC AUC of class-1 scores; tied scores share their average
// rank. Throws InputError unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> y);

double mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> values);

}  // namespace itabnet
