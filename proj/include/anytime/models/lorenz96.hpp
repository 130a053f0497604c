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
#include <vector>

#include "anytime/models/rk.hpp"
#include "anytime/rng.hpp"
#include "anytime/smc.hpp"

// Lorenz '96 SDE  dX_d = (X_{d-1}(X_{d+1} - X_{d-2}) - X_d + F) dt + sigma dW_d,
// cyclic in d, observed on the first few coordinates with Gaussian noise.
namespace anytime::lorenz96 {

struct Observation {
    double time = 0.0;
    std::vector<double> y;
};

struct Spec {
    std::size_t D = 8;
    double sigma2 = 1e-4;         // diffusion
    double obs_var = 1e-6;        // observation noise
    double stride = 0.4;          // time between observations
    std::size_t observed = 4;     // Y_{1:observed}
    double dt = 5e-2;             // splitting step
    Tolerances tol{};
    double prior_lo = 0.0;
    double prior_hi = 7.0;
    std::vector<Observation> data;

    std::size_t substeps() const;  // splitting steps per observation interval
    void validate() const;
};

/// Writes the drift into `out`; x and out must not alias.
void drift(std::span<const double> x, double F, std::span<double> out);

/// One splitting step: integrate the drift over dt, then add sigma dW.
/// Returns the integrator's step count (accepted + rejected), the
/// state-dependent compute proxy. `h` carries the step-size warm start.
std::size_t sde_step(std::vector<double>& x, double F, const Spec& spec, Stream& rng, double& h);

/// X_d(0) ~ N(0, sigma2).
std::vector<double> initial_state(const Spec& spec, Stream& rng);

/// Simulates one path up to `horizon` and returns noisy observations of the
/// first `observed` coordinates every `stride` time units.
std::vector<Observation> simulate_dataset(const Spec& spec, double F, double horizon, Stream& rng);

struct PfEstimate {
    double loglik = 0.0;
    std::size_t steps = 0;  // total integrator steps across particles
    bool collapsed = false;
};

/// Log-likelihood floor returned when every nested particle has zero weight.
inline constexpr double kCollapseFloor = -1e10;

/// Bootstrap particle filter over the first `count` observations.
PfEstimate pf_loglik(const Spec& spec, double F, std::size_t M, Stream& rng, std::size_t count);
PfEstimate pf_loglik(const Spec& spec, double F, std::size_t M, Stream& rng);

/// Nested filter carried by an outer parameter particle.
struct NestedFilter {
    std::vector<std::vector<double>> x;
    std::vector<double> h;   // per-particle step-size warm starts
    std::size_t step = 0;    // observations absorbed
    bool collapsed = false;
};

NestedFilter nested_init(const Spec& spec, std::size_t M, Stream& rng);
/// Absorbs the next observation; returns the log mean weight (or the floor)
/// and adds the integrator steps spent to `steps`.
double nested_update(NestedFilter& f, const Spec& spec, double F, Stream& rng, std::size_t& steps);

struct Particle {
    double F = 0.0;
    NestedFilter filter;
    double loglik = 0.0;
    double last_cost = 0.0;  // integrator steps of the most recent filter run
};

struct MoveOptions {
    double scale = 1.0;        // random-walk sd as a multiple of the cloud sd
    double floor = 1e-3;
    double step_cost = 1e-6;   // virtual seconds per integrator step
};

/// Data-tempered targets pi_v(F) = p(F | y_{1:v}) with particle-marginal MH
/// moves. A move's hold time is the integrator work of its filter run, so the
/// hold depends on the state (F) it starts from.
TargetSequence<Particle> smc2_targets(const Spec& spec, std::size_t M, MoveOptions opt = {});

}  // namespace anytime::lorenz96
