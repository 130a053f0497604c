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
#include <cstdint>
#include <vector>

#include "anytime/core.hpp"
#include "anytime/diagnostics.hpp"
#include "anytime/parallel.hpp"
#include "anytime/rng.hpp"

namespace anytime::gamma_study {

/// Gamma(k, theta) target explored by a Gaussian-copula chain, with virtual
/// hold times H | x ~ Gamma(x^p / theta, theta) so that E[H | x] = x^p.
struct Config {
    double shape = 2.0;
    double scale = 0.5;
    double rho = 0.5;
    std::vector<int> degrees{0, 1, 2, 3};
    std::size_t replicates = std::size_t{1} << 14;
    int horizon = 200;
    std::vector<std::size_t> ensemble_sizes{2, 4, 8, 16, 32};
    std::uint64_t seed = 1;
    Execution exec = Execution::parallel;
};

/// Shape used in place of x^p / theta when that underflows (x = 0, p > 0).
inline constexpr double kShapeFloor = 1e-12;

/// One Gaussian-copula transition; leaves Gamma(shape, scale) invariant.
double copula_kernel_step(double x, double shape, double scale, double rho, Stream& rng);

/// H | x ~ Gamma(x^p / scale, scale).
double polynomial_hold_sample(double x, int degree, double scale, Stream& rng);

/// Copula kernel joined with the polynomial hold model for degree p.
JointKernel<double> make_kernel(const Config& config, int degree);

/// pi = Gamma(k, theta).
ReferenceCdf target(const Config& config);
/// alpha = Gamma(k + p, theta), the length-biased law under E[H | x] = x^p.
ReferenceCdf anytime_law(const Config& config, int degree);
/// E_pi[H] = E_pi[X^p] = theta^p Gamma(k + p) / Gamma(k).
double expected_hold(const Config& config, int degree);

struct AnytimeRow {
    int degree;
    int t;
    std::size_t n_samples;
    double w1_alpha;
};

struct MultichainRow {
    int degree;
    std::size_t ensemble_size;  // K + 1
    int t;
    std::size_t n_samples;      // uncorrected sample count
    double w1_uncorrected;
    double w1_corrected;
};

/// Single chains started from pi, queried at t = 1..horizon; W1 to alpha.
std::vector<AnytimeRow> run_anytime_validation(const Config& config);

/// K+1 rotating chains, replicates / (K+1) ensembles per size; W1 to pi with
/// and without the extra chain.
std::vector<MultichainRow> run_multichain_validation(const Config& config);

/// Per-replicate (state, lag) of single chains at the horizon.
struct LagSample {
    double state;
    double lag;
};
std::vector<LagSample> terminal_states(const Config& config, int degree);

/// States of every single chain at every integer time, row-major [t - 1][r].
std::vector<double> single_chain_paths(const Config& config, int degree);

/// Mean W1 between `draws` iid samples of size n from `law` and `law` itself.
/// Sampling goes through std::gamma_distribution / std::normal_distribution,
/// not the copula machinery.
double iid_w1_floor(const ReferenceCdf& law, std::size_t n, std::size_t draws, std::uint64_t seed);

/// Grid W1 between Gamma(k1, theta) and Gamma(k2, theta) on
/// [0, q(1 - 1e-6)] of the heavier one, 2^12 nodes. `tail_bound` receives an
/// upper bound on the mass of |F1 - F2| beyond the grid.
double gamma_pair_w1(double k1, double k2, double scale, double* tail_bound = nullptr,
                     std::size_t points = 4096);

struct PlateauRow {
    int degree;
    std::size_t ensemble_size;
    double mean_w1_uncorrected;  // averaged over t in [horizon / 2, horizon]
    double predicted;            // d1(alpha, pi) / (K + 1)
    double relative_error;
};
std::vector<PlateauRow> plateau_table(const Config& config, const std::vector<MultichainRow>& rows);

}  // namespace anytime::gamma_study
