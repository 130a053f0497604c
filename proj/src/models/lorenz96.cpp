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

#include "anytime/models/lorenz96.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace anytime::lorenz96 {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double obs_loglik(const Spec& spec, std::span<const double> x, std::span<const double> y)
{
    double ss = 0.0;
    for (std::size_t d = 0; d < y.size(); ++d) {
        const double e = y[d] - x[d];
        ss += e * e;
    }
    const double n = static_cast<double>(y.size());
    return -0.5 * (n * (kLog2Pi + std::log(spec.obs_var)) + ss / spec.obs_var);
}

}  // namespace

std::size_t Spec::substeps() const
{
    const double n = stride / dt;
    const double r = std::round(n);
    if (r < 1.0 || std::abs(n - r) > 1e-9 * r)
        throw std::invalid_argument("lorenz96: observation stride must be a whole number of splitting steps");
    return static_cast<std::size_t>(r);
}

void Spec::validate() const
{
    if (D < 4)
        throw std::invalid_argument("lorenz96: dimension must be at least 4");
    if (observed == 0 || observed > D)
        throw std::invalid_argument("lorenz96: observed coordinates must be in 1..D");
    if (!(sigma2 >= 0.0) || !(obs_var > 0.0))
        throw std::invalid_argument("lorenz96: invalid noise variances");
    if (!(dt > 0.0) || !(stride > 0.0))
        throw std::invalid_argument("lorenz96: time steps must be positive");
    if (!(prior_hi > prior_lo))
        throw std::invalid_argument("lorenz96: empty prior interval");
    substeps();
    for (const auto& o : data)
        if (o.y.size() != observed)
            throw std::invalid_argument("lorenz96: observation has the wrong number of coordinates");
}

void drift(std::span<const double> x, double F, std::span<double> out)
{
    const std::size_t D = x.size();
    if (D < 4 || out.size() != D)
        throw std::invalid_argument("lorenz96 drift: need D >= 4 and matching output");
    // wrap-around terms by hand; the interior loop stays branch-free
    out[0] = x[D - 1] * (x[1] - x[D - 2]) - x[0] + F;
    out[1] = x[0] * (x[2] - x[D - 1]) - x[1] + F;
    for (std::size_t d = 2; d + 1 < D; ++d)
        out[d] = x[d - 1] * (x[d + 1] - x[d - 2]) - x[d] + F;
    out[D - 1] = x[D - 2] * (x[0] - x[D - 3]) - x[D - 1] + F;
}

std::size_t sde_step(std::vector<double>& x, double F, const Spec& spec, Stream& rng, double& h)
{
    if (!(spec.dt > 0.0))
        throw std::invalid_argument("sde_step: dt must be positive");
    VectorField f = [F](double, std::span<const double> s, std::span<double> out) { drift(s, F, out); };
    const auto stats = integrate(f, x, 0.0, spec.dt, spec.tol, h);
    if (spec.sigma2 > 0.0) {
        std::normal_distribution<double> n01(0.0, 1.0);
        const double sd = std::sqrt(spec.sigma2 * spec.dt);
        for (auto& xd : x)
            xd += sd * n01(rng);
    }
    return stats.steps();
}

std::vector<double> initial_state(const Spec& spec, Stream& rng)
{
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> x(spec.D);
    const double sd = std::sqrt(spec.sigma2);
    for (auto& xd : x)
        xd = sd * n01(rng);
    return x;
}

std::vector<Observation> simulate_dataset(const Spec& spec, double F, double horizon, Stream& rng)
{
    spec.validate();
    const std::size_t sub = spec.substeps();
    const auto count = static_cast<std::size_t>(std::floor(horizon / spec.stride + 1e-9));
    auto x = initial_state(spec, rng);
    double h = 0.0;
    std::normal_distribution<double> n01(0.0, 1.0);
    const double sd = std::sqrt(spec.obs_var);
    std::vector<Observation> out;
    out.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        for (std::size_t s = 0; s < sub; ++s)
            sde_step(x, F, spec, rng, h);
        Observation o;
        o.time = static_cast<double>(i) * spec.stride;
        o.y.resize(spec.observed);
        for (std::size_t d = 0; d < spec.observed; ++d)
            o.y[d] = x[d] + sd * n01(rng);
        out.push_back(std::move(o));
    }
    return out;
}

NestedFilter nested_init(const Spec& spec, std::size_t M, Stream& rng)
{
    if (M == 0)
        throw std::invalid_argument("lorenz96: nested filter needs particles");
    NestedFilter f;
    f.x.reserve(M);
    for (std::size_t m = 0; m < M; ++m)
        f.x.push_back(initial_state(spec, rng));
    f.h.assign(M, 0.0);
    return f;
}

double nested_update(NestedFilter& f, const Spec& spec, double F, Stream& rng, std::size_t& steps)
{
    if (f.step >= spec.data.size())
        throw std::out_of_range("lorenz96: no observation left");
    const auto& obs = spec.data[f.step];
    ++f.step;
    if (f.collapsed)
        return 0.0;  // the floor was charged when it collapsed
    const std::size_t M = f.x.size();
    const std::size_t sub = spec.substeps();
    std::vector<double> lw(M);
    try {
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t s = 0; s < sub; ++s)
                steps += sde_step(f.x[m], F, spec, rng, f.h[m]);
            lw[m] = obs_loglik(spec, f.x[m], obs.y);
            if (std::isnan(lw[m]))
                lw[m] = -INFINITY;
        }
    } catch (const NumericalError&) {
        f.collapsed = true;  // blow-up: this F is implausible
        return kCollapseFloor;
    }
    const double lse = log_sum_exp(lw);
    if (!std::isfinite(lse)) {
        f.collapsed = true;
        return kCollapseFloor;
    }
    auto w = normalize_log_weights(lw);
    auto anc = resample(w, M, ResampleScheme::systematic, rng);
    std::vector<std::vector<double>> x(M);
    std::vector<double> h(M);
    for (std::size_t m = 0; m < M; ++m) {
        x[m] = f.x[anc[m]];
        h[m] = f.h[anc[m]];
    }
    f.x = std::move(x);
    f.h = std::move(h);
    return lse - std::log(static_cast<double>(M));
}

PfEstimate pf_loglik(const Spec& spec, double F, std::size_t M, Stream& rng, std::size_t count)
{
    if (count > spec.data.size())
        throw std::out_of_range("pf_loglik: more observations requested than available");
    PfEstimate est;
    auto f = nested_init(spec, M, rng);
    for (std::size_t i = 0; i < count; ++i)
        est.loglik += nested_update(f, spec, F, rng, est.steps);
    est.collapsed = f.collapsed;
    return est;
}

PfEstimate pf_loglik(const Spec& spec, double F, std::size_t M, Stream& rng)
{
    return pf_loglik(spec, F, M, rng, spec.data.size());
}

TargetSequence<Particle> smc2_targets(const Spec& spec, std::size_t M, MoveOptions opt)
{
    spec.validate();
    TargetSequence<Particle> t;
    t.steps = spec.data.size();
    t.sample_initial = [spec, M](Stream& rng) {
        std::uniform_real_distribution<double> u(spec.prior_lo, spec.prior_hi);
        const double F = u(rng);
        return Particle{F, nested_init(spec, M, rng), 0.0, 0.0};
    };
    t.log_weight = [spec](Particle& p, std::size_t, Stream& rng) {
        std::size_t steps = 0;
        const double l = nested_update(p.filter, spec, p.F, rng, steps);
        p.loglik += l;
        p.last_cost = static_cast<double>(steps);
        return l;
    };
    t.make_move = [spec, M, opt](std::span<const Particle> cloud, std::size_t v) -> JointKernel<Particle> {
        std::vector<double> F;
        F.reserve(cloud.size());
        for (const auto& p : cloud)
            F.push_back(p.F);
        double mean = 0.0, ss = 0.0;
        for (double x : F)
            mean += x;
        mean /= static_cast<double>(F.size());
        for (double x : F)
            ss += (x - mean) * (x - mean);
        const double sd = F.size() > 1 ? std::sqrt(ss / static_cast<double>(F.size() - 1)) : 0.0;
        const double s = std::max(opt.scale * sd, opt.floor);
        return [spec, M, opt, s, v](const Particle& x, Stream& rng) {
            std::normal_distribution<double> n01(0.0, 1.0);
            const double prop = x.F + s * n01(rng);
            const double log_u = std::log(rng.uniform());
            if (prop < spec.prior_lo || prop > spec.prior_hi)
                return Transition<Particle>{x, opt.step_cost};  // rejected before any simulation
            Particle y{prop, nested_init(spec, M, rng), 0.0, 0.0};
            std::size_t steps = 0;
            for (std::size_t i = 0; i < v; ++i)
                y.loglik += nested_update(y.filter, spec, prop, rng, steps);
            y.last_cost = static_cast<double>(steps);
            const double hold = std::max(1.0, static_cast<double>(steps)) * opt.step_cost;
            if (log_u < y.loglik - x.loglik)
                return Transition<Particle>{std::move(y), hold};
            return Transition<Particle>{x, hold};
        };
    };
    return t;
}

}  // namespace anytime::lorenz96
