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

#include "anytime/models/lgssm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace anytime::lgssm {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_normal_pdf(double x, double mean, double var)
{
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

bool in_prior(const Spec& s, double a) { return a >= s.prior_lo && a <= s.prior_hi; }

double log_prior(const Spec& s) { return -std::log(s.prior_hi - s.prior_lo); }

// Filter state and log-likelihood after `steps` observations.
std::pair<Filter, double> run_kalman(const Spec& spec, double a, std::size_t steps)
{
    Filter f{0.0, spec.init_var};
    double ll = 0.0;
    for (std::size_t t = 0; t < steps; ++t)
        ll += kalman_update(f, spec, a, spec.y[t]);
    return {f, ll};
}

// Simpson weights times log p(y_{1:steps} | a) on the prior interval.
template <class F>
void simpson_nodes(const Spec& spec, std::size_t steps, std::size_t nodes, F&& visit)
{
    if (nodes < 3 || nodes % 2 == 0)
        throw std::invalid_argument("lgssm: Simpson rule needs an odd node count >= 3");
    const double h = (spec.prior_hi - spec.prior_lo) / static_cast<double>(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double a = spec.prior_lo + h * static_cast<double>(i);
        const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        visit(a, std::log(w * h / 3.0) + kalman_loglik(spec, a, steps));
    }
}

double pmmh_log_u(Stream& rng) { return std::log(rng.uniform()); }

}  // namespace

void Spec::validate() const
{
    if (!(q > 0.0) || !(r > 0.0) || !(init_var > 0.0))
        throw std::invalid_argument("lgssm: variances must be positive");
    if (!(prior_hi > prior_lo))
        throw std::invalid_argument("lgssm: empty prior interval");
}

std::vector<double> simulate(const Spec& spec, double a, std::size_t steps, Stream& rng)
{
    spec.validate();
    std::normal_distribution<double> n01(0.0, 1.0);
    double z = std::sqrt(spec.init_var) * n01(rng);
    std::vector<double> y(steps);
    for (auto& obs : y) {
        z = a * z + std::sqrt(spec.q) * n01(rng);
        obs = z + std::sqrt(spec.r) * n01(rng);
    }
    return y;
}

double kalman_update(Filter& f, const Spec& spec, double a, double y)
{
    const double m = a * f.mean;
    const double p = a * a * f.var + spec.q;
    const double s = p + spec.r;
    const double ll = log_normal_pdf(y, m, s);
    const double gain = p / s;
    f.mean = m + gain * (y - m);
    f.var = (1.0 - gain) * p;
    return ll;
}

double kalman_loglik(const Spec& spec, double a, std::size_t steps)
{
    if (steps > spec.y.size())
        throw std::out_of_range("kalman_loglik: more steps than observations");
    return run_kalman(spec, a, steps).second;
}

double kalman_loglik(const Spec& spec, double a) { return kalman_loglik(spec, a, spec.y.size()); }

double log_evidence(const Spec& spec, std::size_t steps, std::size_t nodes)
{
    std::vector<double> terms;
    terms.reserve(nodes);
    simpson_nodes(spec, steps, nodes, [&](double, double lt) { terms.push_back(lt); });
    return log_sum_exp(terms) + log_prior(spec);
}

std::pair<double, double> posterior_moments(const Spec& spec, std::size_t steps, std::size_t nodes)
{
    std::vector<double> a, lt;
    simpson_nodes(spec, steps, nodes, [&](double x, double l) {
        a.push_back(x);
        lt.push_back(l);
    });
    auto w = normalize_log_weights(lt);
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m += w[i] * a[i];
        m2 += w[i] * a[i] * a[i];
    }
    return {m, m2 - m * m};
}

NestedFilter nested_init(const Spec& spec, std::size_t M, Stream& rng)
{
    if (M == 0)
        throw std::invalid_argument("nested filter needs at least one particle");
    std::normal_distribution<double> n01(0.0, 1.0);
    NestedFilter f;
    f.z.resize(M);
    const double sd = std::sqrt(spec.init_var);
    for (auto& z : f.z)
        z = sd * n01(rng);
    return f;
}

// Hot loop of the pseudomarginal moves: weights and systematic resampling are
// done in place on per-thread scratch rather than through resample().
double nested_update(NestedFilter& f, const Spec& spec, double a, Stream& rng)
{
    if (f.step >= spec.y.size())
        throw std::out_of_range("nested_update: no observation left");
    std::normal_distribution<double> n01(0.0, 1.0);
    const double y = spec.y[f.step];
    const double sq = std::sqrt(spec.q);
    const double half_prec = 0.5 / spec.r;
    const std::size_t M = f.z.size();
    thread_local std::vector<double> w, next;
    w.resize(M);
    next.resize(M);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < M; ++m) {
        f.z[m] = a * f.z[m] + sq * n01(rng);
        const double d = y - f.z[m];
        w[m] = -d * d * half_prec;
        top = std::max(top, w[m]);
    }
    ++f.step;
    if (!std::isfinite(top))
        throw NumericalError("nested filter: every weight is zero");
    double sum = 0.0;
    for (auto& x : w) {
        x = std::exp(x - top);
        sum += x;
    }
    const double step = sum / static_cast<double>(M);
    double u = rng.uniform() * step;
    double cumulative = w[0];
    std::size_t j = 0;
    for (std::size_t m = 0; m < M; ++m, u += step) {
        while (u >= cumulative && j + 1 < M) {
            ++j;
            cumulative += w[j];
        }
        next[m] = f.z[j];
    }
    f.z.swap(next);
    return top + std::log(step) - 0.5 * (kLog2Pi + std::log(spec.r));
}

double bootstrap_pf_loglik(const Spec& spec, double a, std::size_t M, Stream& rng, std::size_t steps)
{
    if (steps > spec.y.size())
        throw std::out_of_range("bootstrap_pf_loglik: more steps than observations");
    auto f = nested_init(spec, M, rng);
    double ll = 0.0;
    for (std::size_t t = 0; t < steps; ++t)
        ll += nested_update(f, spec, a, rng);
    return ll;
}

double bootstrap_pf_loglik(const Spec& spec, double a, std::size_t M, Stream& rng)
{
    return bootstrap_pf_loglik(spec, a, M, rng, spec.y.size());
}

double HoldModel::sample(double a, std::size_t v, Stream& rng) const
{
    std::gamma_distribution<double> g(shape, 1.0 / shape);
    return std::max(mean(a, v) * g(rng), std::numeric_limits<double>::min());
}

double proposal_scale(std::span<const double> a, double multiple, double floor)
{
    if (a.size() < 2)
        return floor;
    double m = 0.0;
    for (double x : a)
        m += x;
    m /= static_cast<double>(a.size());
    double ss = 0.0;
    for (double x : a)
        ss += (x - m) * (x - m);
    return std::max(multiple * std::sqrt(ss / static_cast<double>(a.size() - 1)), floor);
}

TargetSequence<ExactParticle> exact_targets(const Spec& spec, MoveOptions opt)
{
    spec.validate();
    TargetSequence<ExactParticle> t;
    t.steps = spec.horizon();
    t.sample_initial = [spec](Stream& rng) {
        std::uniform_real_distribution<double> u(spec.prior_lo, spec.prior_hi);
        return ExactParticle{u(rng), Filter{0.0, spec.init_var}, 0.0};
    };
    t.log_weight = [spec](ExactParticle& p, std::size_t v, Stream&) {
        const double l = kalman_update(p.filter, spec, p.a, spec.y[v - 1]);
        p.loglik += l;
        return l;
    };
    t.make_move = [spec, opt](std::span<const ExactParticle> cloud, std::size_t v) -> JointKernel<ExactParticle> {
        std::vector<double> a;
        a.reserve(cloud.size());
        for (const auto& p : cloud)
            a.push_back(p.a);
        const double s = proposal_scale(a, opt.scale, opt.floor);
        return [spec, opt, s, v](const ExactParticle& x, Stream& rng) {
            const double hold = opt.hold.sample(x.a, v, rng);
            std::normal_distribution<double> n01(0.0, 1.0);
            const double prop = x.a + s * n01(rng);
            const double log_u = pmmh_log_u(rng);
            if (!in_prior(spec, prop))
                return Transition<ExactParticle>{x, hold};
            auto [f, ll] = run_kalman(spec, prop, v);
            if (log_u < ll - x.loglik)
                return Transition<ExactParticle>{ExactParticle{prop, f, ll}, hold};
            return Transition<ExactParticle>{x, hold};
        };
    };
    return t;
}

TargetSequence<PseudoParticle> pseudomarginal_targets(const Spec& spec, std::size_t M, MoveOptions opt)
{
    spec.validate();
    if (M == 0)
        throw std::invalid_argument("pseudomarginal_targets: M must be positive");
    TargetSequence<PseudoParticle> t;
    t.steps = spec.horizon();
    t.sample_initial = [spec, M](Stream& rng) {
        std::uniform_real_distribution<double> u(spec.prior_lo, spec.prior_hi);
        const double a = u(rng);
        return PseudoParticle{a, nested_init(spec, M, rng), 0.0};
    };
    t.log_weight = [spec](PseudoParticle& p, std::size_t, Stream& rng) {
        const double l = nested_update(p.filter, spec, p.a, rng);
        p.loglik += l;
        return l;
    };
    t.make_move = [spec, M, opt](std::span<const PseudoParticle> cloud, std::size_t v) -> JointKernel<PseudoParticle> {
        std::vector<double> a;
        a.reserve(cloud.size());
        for (const auto& p : cloud)
            a.push_back(p.a);
        const double s = proposal_scale(a, opt.scale, opt.floor);
        return [spec, M, opt, s, v](const PseudoParticle& x, Stream& rng) {
            const double hold = opt.hold.sample(x.a, v, rng);
            std::normal_distribution<double> n01(0.0, 1.0);
            const double prop = x.a + s * n01(rng);
            const double log_u = pmmh_log_u(rng);
            if (!in_prior(spec, prop))
                return Transition<PseudoParticle>{x, hold};
            auto f = nested_init(spec, M, rng);
            double ll = 0.0;
            for (std::size_t i = 0; i < v; ++i)
                ll += nested_update(f, spec, prop, rng);
            if (log_u < ll - x.loglik)
                return Transition<PseudoParticle>{PseudoParticle{prop, std::move(f), ll}, hold};
            return Transition<PseudoParticle>{x, hold};
        };
    };
    return t;
}

}  // namespace anytime::lgssm
