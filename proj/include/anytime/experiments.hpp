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

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

// Batch experiments behind the command-line runner. Every run writes
// config.json holding the fully resolved parameters; feeding that file back
// through replay() regenerates byte-identical CSV output.
namespace anytime::experiments {

using json = nlohmann::json;

/// Bad flags or parameter combinations (exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ValidateAnytime {
    std::uint64_t seed = 1;
    std::string preset = "desk";
    std::vector<int> degrees{0, 1, 2, 3};
    std::size_t chains = 0;  // 0: preset default (desk 2^14, paper 2^18)
    int horizon = 200;
    double shape = 2.0;
    double scale = 0.5;
    double rho = 0.5;
    std::size_t floor_draws = 8;
};

struct ValidateMultichain {
    std::uint64_t seed = 1;
    std::string preset = "desk";
    std::vector<int> degrees{0, 1, 2, 3};
    std::vector<std::size_t> ensemble_sizes{2, 4, 8, 16, 32};
    std::size_t chains = 0;
    int horizon = 200;
    double shape = 2.0;
    double scale = 0.5;
    double rho = 0.5;
    std::size_t floor_draws = 8;
};

/// Shared by `smc` and `dist`; `dist` also reads the processor fields.
struct SmcRun {
    std::uint64_t seed = 1;
    std::uint64_t data_seed = 1;       // synthetic data set, kept apart from the sampler seed
    std::string preset = "desk";
    std::string model = "lgssm";       // lgssm | lorenz96
    std::string mode = "fixed";        // fixed | anytime
    std::size_t particles = 0;         // 0: model default (lgssm 512, lorenz96 64)
    std::size_t moves = 0;             // 0: model default (lgssm 10, lorenz96 3)
    double budget = 0.0;               // total move time; 0: matched to fixed-move work
    std::string schedule = "linear";   // uniform | linear
    double c = 0.0;
    std::string policy = "fresh";      // fresh | resume
    std::string scheme = "systematic";
    bool permute = false;
    std::size_t nested = 0;            // nested filter size; 0: exact weights (lgssm), 256 (lorenz96)
    double weight_cost = 1e-3;         // virtual seconds per particle
    double resample_cost = 1e-2;
    double init_cost = 0.0;
    bool serial = false;
    // lgssm
    std::size_t steps = 25;
    double a_true = 0.8;
    double q = 1.0;
    double r = 1.0;
    double hold_unit = 1e-3;
    double hold_shape = 4.0;
    double proposal_scale = 0.0;       // 0: model default
    // lorenz96
    std::size_t dimension = 8;
    double sigma2 = 0.0;               // 0: preset default
    double obs_var = 0.0;              // 0: preset default
    double F_true = 4.8801;
    std::size_t observations = 25;
    double stride = 0.4;
    double dt = 0.05;
    double step_cost = 1e-6;
    // distributed
    std::size_t processors = 1;
    std::vector<std::string> contend;  // "p:factor" or "p:factor:start:end", p 1-based
    std::vector<std::string> speeds;   // "p:multiplier"
};

struct LorenzData {
    std::uint64_t seed = 1;
    std::string preset = "desk";
    double F = 4.8801;
    double horizon = 10.0;
    std::size_t dimension = 8;
    double sigma2 = 0.0;
    double obs_var = 0.0;
    std::size_t observed = 4;
    double stride = 0.4;
    double dt = 0.05;
};

/// Lorenz '96 noise levels for a preset: paper {1e-4, 1e-6}; desk {1, 1}.
std::pair<double, double> lorenz_noise(const std::string& preset);

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ValidateAnytime, seed, preset, degrees, chains, horizon, shape, scale,
                                                rho, floor_draws)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ValidateMultichain, seed, preset, degrees, ensemble_sizes, chains,
                                                horizon, shape, scale, rho, floor_draws)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SmcRun, seed, data_seed, preset, model, mode, particles, moves, budget,
                                                schedule, c, policy, scheme, permute, nested, weight_cost,
                                                resample_cost, init_cost, serial, steps, a_true, q, r, hold_unit,
                                                hold_shape, proposal_scale, dimension, sigma2, obs_var, F_true,
                                                observations, stride, dt, step_cost, processors, contend, speeds)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LorenzData, seed, preset, F, horizon, dimension, sigma2, obs_var,
                                                observed, stride, dt)

/// Each returns the summary it also writes to out/summary.json.
json run_validate_anytime(ValidateAnytime p, const std::filesystem::path& out);
json run_validate_multichain(ValidateMultichain p, const std::filesystem::path& out);
json run_smc(SmcRun p, const std::filesystem::path& out);
json run_dist(SmcRun p, const std::filesystem::path& out);
json run_lorenz_data(LorenzData p, const std::filesystem::path& out);

/// Dispatches on config["command"] with config["params"].
json replay(const json& config, const std::filesystem::path& out);

}  // namespace anytime::experiments
