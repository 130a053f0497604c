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

#include "anytime/gamma_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "anytime/ensemble.hpp"
#include "anytime/special.hpp"

namespace anytime::gamma_study {

namespace {

void validate(const Config& c)
{
    if (!(c.shape > 0.0) || !(c.scale > 0.0))
        throw std::invalid_argument("gamma study: shape and scale must be positive");
    if (!(c.rho > -1.0 && c.rho < 1.0))
        throw std::invalid_argument("gamma study: rho must lie in (-1, 1)");
    if (c.horizon < 1)
        throw std::invalid_argument("gamma study: horizon must be at least 1");
    for (int p : c.degrees)
        if (p < 0)
            throw std::invalid_argument("gamma study: degrees must be non-negative");
}

double draw_gamma(double shape, double scale, Stream& rng)
{
    std::gamma_distribution<double> dist(shape, scale);
    return dist(rng);
}

}  // namespace

double copula_kernel_step(double x, double shape, double scale, double rho, Stream& rng)
{
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::invalid_argument("copula_kernel_step: rho must lie in [-1, 1]");
    // Map to the latent normal through whichever tail keeps precision.
    double z;
    if (x <= 0.0) {
        z = -std::numeric_limits<double>::infinity();
    } else {
        const double lower = gamma_cdf(x, shape, scale);
        if (lower < 0.5)
            z = normal_inv_cdf(std::max(lower, std::numeric_limits<double>::min()));
        else
            z = -normal_inv_cdf(std::max(gamma_sf(x, shape, scale), std::numeric_limits<double>::min()));
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    const double eps = noise(rng);
    const double z_next = std::isinf(z) ? (rho == 1.0 ? z : std::sqrt(1.0 - rho * rho) * eps)
                                        : rho * z + std::sqrt(1.0 - rho * rho) * eps;
    if (z_next < 0.0) {
        const double u = normal_cdf(z_next);
        return u > 0.0 ? gamma_inv_cdf(u, shape, scale) : 0.0;
    }
    const double q = normal_cdf(-z_next);
    return q > 0.0 ? gamma_inv_sf(q, shape, scale) : gamma_inv_sf(std::numeric_limits<double>::min(), shape, scale);
}

double polynomial_hold_sample(double x, int degree, double scale, Stream& rng)
{
    if (degree > 0 && !(x >= 0.0))
        throw std::domain_error("polynomial_hold_sample: state must be non-negative");
    const double mean = degree == 0 ? 1.0 : std::pow(x, degree);
    const double shape = std::max(mean / scale, kShapeFloor);
    // Small shapes can underflow to an exact zero; holds stay strictly positive.
    return std::max(draw_gamma(shape, scale, rng), std::numeric_limits<double>::min());
}

JointKernel<double> make_kernel(const Config& config, int degree)
{
    const double k = config.shape;
    const double theta = config.scale;
    const double rho = config.rho;
    MarkovKernel<double> kernel = [=](const double& x, Stream& rng) {
        return copula_kernel_step(x, k, theta, rho, rng);
    };
    HoldTimeModel<double> hold{
        [=](const double& x, Stream& rng) { return polynomial_hold_sample(x, degree, theta, rng); },
        [=](const double& x) { return degree == 0 ? 1.0 : std::pow(x, degree); }};
    return make_joint(std::move(kernel), std::move(hold));
}

ReferenceCdf target(const Config& config) { return ReferenceCdf::gamma(config.shape, config.scale); }

ReferenceCdf anytime_law(const Config& config, int degree)
{
    return ReferenceCdf::gamma(config.shape + degree, config.scale);
}

double expected_hold(const Config& config, int degree)
{
    return std::pow(config.scale, degree) *
           std::exp(std::lgamma(config.shape + degree) - std::lgamma(config.shape));
}

std::vector<double> single_chain_paths(const Config& config, int degree)
{
    validate(config);
    const std::size_t n = config.replicates;
    const auto steps = static_cast<std::size_t>(config.horizon);
    std::vector<double> paths(steps * n);
    const auto kernel = make_kernel(config, degree);
    for_each_index(n, config.exec, [&](std::size_t r) {
        Stream init = Stream::derive(config.seed, "anytime-init", degree, r);
        JumpProcess<double> process(draw_gamma(config.shape, config.scale, init), kernel,
                                    Stream::derive(config.seed, "anytime", degree, r));
        for (std::size_t t = 0; t < steps; ++t) {
            process.advance(1.0);
            paths[t * n + r] = process.state();
        }
    });
    return paths;
}

std::vector<AnytimeRow> run_anytime_validation(const Config& config)
{
    validate(config);
    if (config.replicates < (std::size_t{1} << 10))
        throw std::invalid_argument("run_anytime_validation: need at least 1024 replicates");
    const std::size_t n = config.replicates;
    const auto steps = static_cast<std::size_t>(config.horizon);
    std::vector<AnytimeRow> rows;
    for (int p : config.degrees) {
        const auto paths = single_chain_paths(config, p);
        const auto alpha = anytime_law(config, p);
        std::vector<double> w1(steps);
        for_each_index(steps, config.exec, [&](std::size_t t) {
            w1[t] = wasserstein1(std::span<const double>(paths).subspan(t * n, n), alpha);
        });
        for (std::size_t t = 0; t < steps; ++t)
            rows.push_back({p, static_cast<int>(t + 1), n, w1[t]});
    }
    return rows;
}

std::vector<MultichainRow> run_multichain_validation(const Config& config)
{
    validate(config);
    const std::size_t n = config.replicates;
    const auto steps = static_cast<std::size_t>(config.horizon);
    const auto pi = target(config);
    std::vector<MultichainRow> rows;
    for (int p : config.degrees) {
        const auto kernel = make_kernel(config, p);
        for (std::size_t m : config.ensemble_sizes) {
            if (m < 2 || n % m != 0)
                throw std::invalid_argument(
                    "run_multichain_validation: replicates must be divisible by each K+1 >= 2");
            const std::size_t ensembles = n / m;
            const std::size_t kept = ensembles * (m - 1);
            std::vector<double> uncorrected(steps * n);
            std::vector<double> corrected(steps * kept);
            for_each_index(ensembles, config.exec, [&](std::size_t e) {
                Stream init = Stream::derive(config.seed, "multichain-init", p, m, e);
                std::vector<double> states(m);
                for (auto& s : states)
                    s = draw_gamma(config.shape, config.scale, init);
                ChainEnsemble<double> ensemble(std::move(states), kernel,
                                               Stream::derive(config.seed, "multichain", p, m, e));
                for (std::size_t t = 0; t < steps; ++t) {
                    ensemble.advance(1.0);
                    for (std::size_t j = 1; j <= m; ++j) {
                        uncorrected[t * n + e * m + (j - 1)] = ensemble.position(j);
                        if (j < m)
                            corrected[t * kept + e * (m - 1) + (j - 1)] = ensemble.position(j);
                    }
                }
            });
            std::vector<double> w1u(steps), w1c(steps);
            for_each_index(steps, config.exec, [&](std::size_t t) {
                w1u[t] = wasserstein1(std::span<const double>(uncorrected).subspan(t * n, n), pi);
                w1c[t] = wasserstein1(std::span<const double>(corrected).subspan(t * kept, kept), pi);
            });
            for (std::size_t t = 0; t < steps; ++t)
                rows.push_back({p, m, static_cast<int>(t + 1), n, w1u[t], w1c[t]});
        }
    }
    return rows;
}

std::vector<LagSample> terminal_states(const Config& config, int degree)
{
    validate(config);
    std::vector<LagSample> out(config.replicates);
    const auto kernel = make_kernel(config, degree);
    for_each_index(config.replicates, config.exec, [&](std::size_t r) {
        Stream init = Stream::derive(config.seed, "lag-init", degree, r);
        JumpProcess<double> process(draw_gamma(config.shape, config.scale, init), kernel,
                                    Stream::derive(config.seed, "lag", degree, r));
        process.advance(static_cast<double>(config.horizon));
        out[r] = {process.state(), process.lag()};
    });
    return out;
}

double iid_w1_floor(const ReferenceCdf& law, std::size_t n, std::size_t draws, std::uint64_t seed)
{
    if (n == 0 || draws == 0)
        throw std::invalid_argument("iid_w1_floor: need n > 0 and draws > 0");
    double total = 0.0;
    std::vector<double> sample(n);
    for (std::size_t d = 0; d < draws; ++d) {
        Stream rng = Stream::derive(seed, "iid-floor", n, d);
        if (law.family() == ReferenceCdf::Family::gamma) {
            std::gamma_distribution<double> dist(law.param1(), law.param2());
            for (auto& s : sample)
                s = dist(rng);
        } else {
            std::normal_distribution<double> dist(law.param1(), law.param2());
            for (auto& s : sample)
                s = dist(rng);
        }
        total += wasserstein1(sample, law);
    }
    return total / static_cast<double>(draws);
}

double gamma_pair_w1(double k1, double k2, double scale, double* tail_bound, std::size_t points)
{
    const double heavy = std::max(k1, k2);
    const double upper = gamma_inv_sf(1e-6, heavy, scale);
    const auto a = ReferenceCdf::gamma(k1, scale);
    const auto b = ReferenceCdf::gamma(k2, scale);
    if (tail_bound) {
        const auto h = ReferenceCdf::gamma(heavy, scale);
        *tail_bound = h.mean() - upper + h.integrated_cdf(upper);
    }
    return wasserstein1(a, b, 0.0, upper, points);
}

std::vector<PlateauRow> plateau_table(const Config& config, const std::vector<MultichainRow>& rows)
{
    std::vector<PlateauRow> out;
    const double t_lo = 0.5 * config.horizon;
    for (int p : config.degrees) {
        const double d1 = gamma_pair_w1(config.shape, config.shape + p, config.scale);
        for (std::size_t m : config.ensemble_sizes) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& r : rows)
                if (r.degree == p && r.ensemble_size == m && r.t >= t_lo) {
                    sum += r.w1_uncorrected;
                    ++count;
                }
            if (count == 0)
                continue;
            const double mean = sum / static_cast<double>(count);
            const double predicted = d1 / static_cast<double>(m);
            const double rel = predicted > 0.0 ? std::abs(mean - predicted) / predicted
                                               : std::numeric_limits<double>::quiet_NaN();
            out.push_back({p, m, mean, predicted, rel});
        }
    }
    return out;
}

}  // namespace anytime::gamma_study
