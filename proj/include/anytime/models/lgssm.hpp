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
#include <span>
#include <vector>

#include "anytime/rng.hpp"
#include "anytime/smc.hpp"

// Linear-Gaussian state-space model with one unknown parameter a:
//   z_0 ~ N(0, init_var),  z_t = a z_{t-1} + N(0, q),  y_t = z_t + N(0, r),
// a ~ U(prior_lo, prior_hi). Small enough to have an exact answer.
namespace anytime::lgssm {

struct Spec {
    double q = 1.0;
    double r = 1.0;
    double init_var = 1.0;
    double prior_lo = -1.0;
    double prior_hi = 1.0;
    std::vector<double> y;

    std::size_t horizon() const { return y.size(); }
    void validate() const;
};

std::vector<double> simulate(const Spec& spec, double a, std::size_t steps, Stream& rng);

/// Kalman filter moments of z_t given y_{1:t}.
struct Filter {
    double mean = 0.0;
    double var = 1.0;
};

/// Folds in y; returns log p(y | past).
double kalman_update(Filter& f, const Spec& spec, double a, double y);

/// Exact log p(y_{1:steps} | a); steps defaults to the whole record.
double kalman_loglik(const Spec& spec, double a, std::size_t steps);
double kalman_loglik(const Spec& spec, double a);

/// log p(y_{1:steps}) with a integrated out against the prior (composite
/// Simpson on a log-sum-exp scale).
double log_evidence(const Spec& spec, std::size_t steps, std::size_t nodes = 4001);

/// Posterior mean and variance of a given y_{1:steps}.
std::pair<double, double> posterior_moments(const Spec& spec, std::size_t steps, std::size_t nodes = 4001);

/// Bootstrap particle filter cloud, resampled (systematic) after every
/// observation so its weights are always uniform.
struct NestedFilter {
    std::vector<double> z;
    std::size_t step = 0;
};

NestedFilter nested_init(const Spec& spec, std::size_t M, Stream& rng);
/// Propagates, weights by y_{step+1}, resamples. Returns the log of the mean
/// weight, an unbiased estimate of p(y | past) once exponentiated.
double nested_update(NestedFilter& f, const Spec& spec, double a, Stream& rng);

/// Unbiased estimate (on the natural scale) of p(y_{1:steps} | a).
double bootstrap_pf_loglik(const Spec& spec, double a, std::size_t M, Stream& rng, std::size_t steps);
double bootstrap_pf_loglik(const Spec& spec, double a, std::size_t M, Stream& rng);

/// Virtual compute time of one move at step v: proportional to the filter
/// length and larger for |a| near 1, with Gamma(shape, 1/shape) noise.
struct HoldModel {
    double unit = 1e-3;
    double shape = 4.0;
    double mean(double a, std::size_t v) const { return unit * static_cast<double>(v) * (1.0 + a * a); }
    double sample(double a, std::size_t v, Stream& rng) const;
};

struct ExactParticle {
    double a = 0.0;
    Filter filter;
    double loglik = 0.0;
};

struct PseudoParticle {
    double a = 0.0;
    NestedFilter filter;
    double loglik = 0.0;  // estimate of log p(y_{1:step} | a)
};

struct MoveOptions {
    double scale = 1.0;  // random-walk sd as a multiple of the cloud sd
    double floor = 1e-3;
    HoldModel hold;
};

/// pi_v(a) = p(a | y_{1:v}) with exact Kalman weights and random-walk MH moves.
TargetSequence<ExactParticle> exact_targets(const Spec& spec, MoveOptions opt = {});

/// Same sequence, with nested M-particle filters supplying unbiased weights
/// and particle-marginal MH moves.
TargetSequence<PseudoParticle> pseudomarginal_targets(const Spec& spec, std::size_t M, MoveOptions opt = {});

/// Random-walk scale from a cloud of parameters.
double proposal_scale(std::span<const double> a, double multiple, double floor);

}  // namespace anytime::lgssm
