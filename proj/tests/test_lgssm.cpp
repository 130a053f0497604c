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

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "anytime/models/lgssm.hpp"
#include "anytime/smc.hpp"
#include "doctest.h"

using namespace anytime;
using namespace anytime::lgssm;

namespace {

// log N(y; 0, Sigma) for the stacked observations, built from the joint
// covariance Cov(z_s, z_t) = a^{t-s} Var(z_s) and a dense Cholesky factor.
double dense_loglik(const Spec& s, double a, std::size_t V)
{
    std::vector<double> var(V + 1);
    var[0] = s.init_var;
    for (std::size_t t = 1; t <= V; ++t)
        var[t] = a * a * var[t - 1] + s.q;
    std::vector<double> S(V * V);
    for (std::size_t i = 0; i < V; ++i)
        for (std::size_t j = 0; j < V; ++j) {
            const std::size_t lo = std::min(i, j), hi = std::max(i, j);
            S[i * V + j] = std::pow(a, static_cast<double>(hi - lo)) * var[lo + 1] + (i == j ? s.r : 0.0);
        }
    std::vector<double> L(V * V, 0.0);
    for (std::size_t i = 0; i < V; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = S[i * V + j];
            for (std::size_t k = 0; k < j; ++k)
                sum -= L[i * V + k] * L[j * V + k];
            L[i * V + j] = i == j ? std::sqrt(sum) : sum / L[j * V + j];
        }
    std::vector<double> z(V);
    double logdet = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < V; ++i) {
        double sum = s.y[i];
        for (std::size_t k = 0; k < i; ++k)
            sum -= L[i * V + k] * z[k];
        z[i] = sum / L[i * V + i];
        logdet += 2.0 * std::log(L[i * V + i]);
        quad += z[i] * z[i];
    }
    return -0.5 * (static_cast<double>(V) * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

Spec make_spec(std::size_t V, std::uint64_t seed, double a = 0.8)
{
    Spec s;
    Stream rng(seed);
    s.y = simulate(s, a, V, rng);
    return s;
}

double mean(const std::vector<double>& x)
{
    double m = 0.0;
    for (double v : x)
        m += v;
    return m / static_cast<double>(x.size());
}

double sd(const std::vector<double>& x)
{
    const double m = mean(x);
    double s = 0.0;
    for (double v : x)
        s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

}  // namespace

TEST_CASE("kalman closed forms")
{
    Spec s;
    CHECK(kalman_loglik(s, 0.3) == 0.0);
    s.y = {0.0};
    CHECK(kalman_loglik(s, 0.0) == doctest::Approx(-0.5 * std::log(4.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("kalman agrees with the dense joint-Gaussian density")
{
    auto s = make_spec(25, 7);
    s.q = 0.7;
    s.r = 1.3;
    s.init_var = 2.0;
    for (double a : {-0.9, -0.2, 0.0, 0.5, 0.95})
        CHECK(kalman_loglik(s, a) == doctest::Approx(dense_loglik(s, a, 25)).epsilon(1e-11));
}

TEST_CASE("evidence quadrature agrees with adaptive Gauss-Kronrod over the dense oracle")
{
    auto s = make_spec(12, 8);
    for (std::size_t V : {1u, 5u, 12u}) {
        auto f = [&](double a) { return std::exp(dense_loglik(s, a, V)) / 2.0; };
        const double z = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -1.0, 1.0, 15, 1e-13);
        CHECK(log_evidence(s, V) == doctest::Approx(std::log(z)).epsilon(1e-9));
    }
    auto [m, v] = posterior_moments(s, 12);
    auto fm = [&](double a) { return a * std::exp(dense_loglik(s, a, 12)); };
    auto f0 = [&](double a) { return std::exp(dense_loglik(s, a, 12)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    CHECK(m == doctest::Approx(GK::integrate(fm, -1.0, 1.0, 15, 1e-13) / GK::integrate(f0, -1.0, 1.0, 15, 1e-13)).epsilon(1e-8));
    CHECK(v > 0.0);
}

TEST_CASE("bootstrap filter likelihood is unbiased")
{
    auto s = make_spec(10, 9);
    const double truth = kalman_loglik(s, 0.8);
    std::vector<double> ratio;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Stream rng = Stream::derive(seed, "pf");
        ratio.push_back(std::exp(bootstrap_pf_loglik(s, 0.8, 32, rng) - truth));
    }
    CHECK(std::abs(mean(ratio) - 1.0) <= 3.0 * sd(ratio) / std::sqrt(1000.0));

    // M = 1 is a valid (noisy) unbiased estimator too
    auto s3 = make_spec(3, 10);
    const double t3 = kalman_loglik(s3, 0.5);
    std::vector<double> r1;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        Stream rng = Stream::derive(seed, "pf1");
        r1.push_back(std::exp(bootstrap_pf_loglik(s3, 0.5, 1, rng) - t3));
    }
    CHECK(std::abs(mean(r1) - 1.0) <= 3.0 * sd(r1) / std::sqrt(10000.0));
}

TEST_CASE("log-likelihood estimator variance falls as M doubles")
{
    auto s = make_spec(25, 11);
    double prev = INFINITY;
    for (std::size_t M : {8u, 16u, 32u, 64u}) {
        std::vector<double> ll;
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            Stream rng = Stream::derive(seed, "var", M);
            ll.push_back(bootstrap_pf_loglik(s, 0.8, M, rng));
        }
        const double v = sd(ll);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("hold model")
{
    HoldModel h;
    CHECK(h.mean(0.0, 3) == doctest::Approx(3e-3));
    CHECK(h.mean(1.0, 3) == doctest::Approx(6e-3));
    Stream rng(2);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i)
        s += h.sample(0.5, 10, rng);
    CHECK(s / 100000 == doctest::Approx(h.mean(0.5, 10)).epsilon(0.01));
}

TEST_CASE("exact MH move leaves the step-v posterior invariant")
{
    auto s = make_spec(8, 12);
    const std::size_t v = 8;
    auto targets = exact_targets(s);
    // draw a ~ p(a | y_{1:v}) by inverting a fine grid CDF
    const std::size_t n = 20001;
    std::vector<double> grid(n), lp(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = -1.0 + 2.0 * static_cast<double>(i) / (n - 1);
        lp[i] = kalman_loglik(s, grid[i], v);
    }
    auto w = normalize_log_weights(lp);
    std::vector<double> cdf(n);
    std::partial_sum(w.begin(), w.end(), cdf.begin());
    Stream rng(13);
    std::vector<ExactParticle> cloud;
    for (int k = 0; k < 20000; ++k) {
        const double u = rng.uniform() * cdf.back();
        const double a = grid[std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()];
        ExactParticle p{a, {0.0, s.init_var}, 0.0};
        for (std::size_t t = 1; t <= v; ++t)
            targets.log_weight(p, t, rng);
        cloud.push_back(p);
    }
    auto kernel = targets.make_move(cloud, v);
    std::vector<double> after;
    for (auto& p : cloud) {
        for (int i = 0; i < 5; ++i)
            p = kernel(p, rng).next;
        after.push_back(p.a);
        CHECK(p.loglik == doctest::Approx(kalman_loglik(s, p.a, v)).epsilon(1e-10));
    }
    auto [m, var] = posterior_moments(s, v);
    CHECK(std::abs(mean(after) - m) < 4.0 * std::sqrt(var / 20000.0) * 3.0);  // chain correlation slack
    CHECK(sd(after) * sd(after) == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("one SMC weight step estimates the one-step evidence")
{
    auto s = make_spec(1, 14);
    auto targets = exact_targets(s);
    std::vector<double> incr;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto sys = initialize(targets, 2048, seed, Execution::serial);
        weight_step(sys, targets, seed, Execution::serial);
        incr.push_back(sys.log_normalizer);
    }
    CHECK(std::abs(mean(incr) - log_evidence(s, 1)) <= 3.0 * sd(incr) / std::sqrt(40.0) + 1e-4);
}
