/*
   Copyright 2026 The Anytime SMC Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anytime/rng.hpp"

namespace anytime {

/// Raised when a numerical procedure cannot continue (every weight zero,
/// integrator step underflow, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ResampleScheme { multinomial, systematic, stratified, residual };

ResampleScheme parse_resample_scheme(std::string_view name);
std::string to_string(ResampleScheme scheme);

/// Draws `count` ancestor indices from normalized weights. Every scheme is
/// unbiased (E[offspring_i] = count * w_i) and returns indices in ascending
/// order, so offspring of one parent are adjacent.
std::vector<std::size_t> resample(std::span<const double> weights, std::size_t count,
                                  ResampleScheme scheme, Stream& rng);

/// Offspring counts per parent from an ancestor vector.
std::vector<std::size_t> offspring_counts(std::span<const std::size_t> ancestors, std::size_t parents);

/// log(sum(exp(x))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// Normalized weights from log-weights. Throws NumericalError if every
/// weight is zero.
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

/// Effective sample size 1 / sum(w^2) of normalized weights.
double effective_sample_size(std::span<const double> weights);

}  // namespace anytime
