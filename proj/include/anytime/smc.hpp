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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anytime/budget.hpp"
#include "anytime/core.hpp"
#include "anytime/ensemble.hpp"
#include "anytime/parallel.hpp"
#include "anytime/profile.hpp"
#include "anytime/resample.hpp"
#include "anytime/rng.hpp"

namespace anytime {

/// pi_0, ..., pi_V. `log_weight` returns log(pi_v / pi_{v-1}) at a particle,
/// or the log of an unbiased estimate; it may update per-particle caches
/// (a nested filter, say). `make_move` builds the step-v kernel, which leaves
/// pi_v invariant, and may tune it to the freshly resampled cloud.
template <class State>
struct TargetSequence {
    std::size_t steps = 0;
    std::function<State(Stream&)> sample_initial;
    std::function<double(State&, std::size_t v, Stream&)> log_weight;
    std::function<JointKernel<State>(std::span<const State> cloud, std::size_t v)> make_move;
};

template <class State>
struct ParticleSystem {
    std::vector<State> particles;
    std::vector<double> log_weights;
    double log_normalizer = 0.0;
    std::size_t step = 0;
};

enum class MoveKind { fixed, anytime };
enum class ExtraPolicy { fresh, resume };

MoveKind parse_move_kind(std::string_view name);
std::string to_string(MoveKind kind);
ExtraPolicy parse_extra_policy(std::string_view name);
std::string to_string(ExtraPolicy policy);

struct MoveConfig {
    MoveKind kind = MoveKind::fixed;
    std::size_t moves = 10;    // n_v, fixed mode
    BudgetSchedule schedule;   // anytime mode; one quota per step
    ExtraPolicy policy = ExtraPolicy::fresh;
};

/// Virtual durations of the non-move phases. Calibration knobs only.
struct PhaseCosts {
    double init_per_particle = 0.0;
    double weight_per_particle = 1e-3;
    double resample = 1e-2;
};

struct SmcConfig {
    std::size_t particles = 512;
    MoveConfig move;
    ResampleScheme scheme = ResampleScheme::systematic;
    std::uint64_t seed = 1;
    bool permute = false;
    PhaseCosts costs;
    Execution exec = Execution::parallel;
};

struct StepLog {
    std::size_t step = 0;
    double ess = 0.0;
    double log_normalizer = 0.0;
    double move_time = 0.0;
    std::uint64_t transitions = 0;
};

template <class State>
struct SmcResult {
    ParticleSystem<State> system;
    std::vector<StepLog> steps;
    std::vector<ProfileRecord> profile;
    double finish_time = 0.0;
};

template <class State>
ParticleSystem<State> initialize(const TargetSequence<State>& targets, std::size_t K,
                                 std::uint64_t seed, Execution exec)
{
    ParticleSystem<State> s;
    std::vector<std::optional<State>> tmp(K);
    for_each_index(K, exec, [&](std::size_t k) {
        auto rng = Stream::derive(seed, "init", k);
        tmp[k].emplace(targets.sample_initial(rng));
    });
    s.particles.reserve(K);
    for (auto& x : tmp)
        s.particles.push_back(std::move(*x));
    s.log_weights.assign(K, 0.0);
    return s;
}

/// Reweights from pi_{v-1} to pi_v (v = step + 1) and adds the log of the
/// weighted mean incremental weight to the normalizer. Returns the ESS.
template <class State>
double weight_step(ParticleSystem<State>& s, const TargetSequence<State>& targets,
                   std::uint64_t seed, Execution exec)
{
    const std::size_t v = s.step + 1;
    if (v > targets.steps)
        throw std::invalid_argument("weight_step: no target left");
    const std::size_t K = s.particles.size();
    std::vector<double> incr(K);
    for_each_index(K, exec, [&](std::size_t k) {
        auto rng = Stream::derive(seed, "weight", v, k);
        incr[k] = targets.log_weight(s.particles[k], v, rng);
    });
    for (double x : incr)
        if (std::isnan(x) || x == INFINITY)
            throw NumericalError("weight_step: incremental log-weight is not a number");
    const double before = log_sum_exp(s.log_weights);
    for (std::size_t k = 0; k < K; ++k)
        s.log_weights[k] += incr[k];
    const double after = log_sum_exp(s.log_weights);
    if (!std::isfinite(after))
        throw NumericalError("particle collapse: every weight is zero at step " + std::to_string(v));
    s.log_normalizer += after - before;
    s.step = v;
    return effective_sample_size(normalize_log_weights(s.log_weights));
}

/// `count` states drawn from the weighted cloud, in ancestor order,
/// optionally shuffled.
template <class State>
std::vector<State> resample_particles(const ParticleSystem<State>& s, std::size_t count,
                                      ResampleScheme scheme, std::uint64_t seed, bool permute)
{
    auto w = normalize_log_weights(s.log_weights);
    auto rng = Stream::derive(seed, "resample", s.step);
    auto ancestors = resample(w, count, scheme, rng);
    if (permute) {
        auto prng = Stream::derive(seed, "permute", s.step);
        std::shuffle(ancestors.begin(), ancestors.end(), prng);
    }
    std::vector<State> out;
    out.reserve(count);
    for (auto a : ancestors)
        out.push_back(s.particles[a]);
    return out;
}

/// Moves a uniformly chosen member of `block` to its end so it can serve as
/// the extra chain. An unbiased resample makes that member ~ the weighted
/// cloud, whereas the last ancestor of a sorted sample would not be.
template <class State>
void pick_extra(std::vector<State>& block, std::uint64_t seed, std::size_t v, std::size_t processor)
{
    auto rng = Stream::derive(seed, "extra", v, processor);
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(block.size()));
    std::swap(block[std::min(j, block.size() - 1)], block.back());
}

/// Applies the kernel n times to every particle; returns each particle's
/// hold times in order.
template <class State>
std::vector<std::vector<double>> move_fixed(std::vector<State>& particles, const JointKernel<State>& kernel,
                                            std::size_t n, std::uint64_t seed, std::size_t v, Execution exec)
{
    std::vector<std::vector<double>> holds(particles.size());
    for_each_index(particles.size(), exec, [&](std::size_t k) {
        auto rng = Stream::derive(seed, "move", v, k);
        holds[k].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto t = kernel(particles[k], rng);
            detail::check_hold(t.hold);
            particles[k] = std::move(t.next);
            holds[k].push_back(t.hold);
        }
    });
    return holds;
}

/// Completion time of a sequence of holds run back to back from `start`.
inline double serial_finish(double start, const TimeWarp& warp, std::span<const std::vector<double>> holds)
{
    double t = start;
    for (const auto& particle : holds)
        for (double h : particle)
            t = warp.finish(t, h);
    return t;
}

template <class State>
struct AnytimeMoveResult {
    std::vector<State> particles;
    Snapshot<State> snapshot;
    std::uint64_t transitions = 0;
};

/// Runs the K waiting particles plus the extra chain for `budget` virtual
/// time and returns the K corrected states.
template <class State>
AnytimeMoveResult<State> move_anytime(std::vector<State> waiting, Snapshot<State> extra,
                                      const JointKernel<State>& kernel, double budget, Stream rng,
                                      double start_time = 0.0, TimeWarp warp = {})
{
    if (!(budget > 0.0))
        throw std::invalid_argument("move_anytime: budget must be positive");
    typename ChainEnsemble<State>::Options opt{ClockMode::virtual_time, std::move(warp), start_time};
    auto e = ChainEnsemble<State>::restore(std::move(waiting), std::move(extra), kernel, rng, std::move(opt));
    e.advance(budget);
    return {e.query_corrected(), e.snapshot(), e.arrivals()};
}

namespace detail {

inline void check_move_config(const MoveConfig& m, std::size_t steps)
{
    if (m.kind == MoveKind::anytime && m.schedule.steps() != steps)
        throw std::invalid_argument("anytime moves need one budget quota per step");
}

}  // namespace detail

/// Resamples at every step; ESS is logged, never used as a trigger.
template <class State>
SmcResult<State> run_smc(const TargetSequence<State>& targets, const SmcConfig& cfg)
{
    if (cfg.particles < 2)
        throw std::invalid_argument("run_smc: need at least two particles");
    detail::check_move_config(cfg.move, targets.steps);
    const std::size_t K = cfg.particles;
    SmcResult<State> out;
    out.system = initialize(targets, K, cfg.seed, cfg.exec);
    auto& s = out.system;
    double t = record(out.profile, 0, 0, Phase::init, 0.0, cfg.costs.init_per_particle * K);
    std::optional<Snapshot<State>> carried;

    for (std::size_t v = 1; v <= targets.steps; ++v) {
        StepLog log;
        log.step = v;
        log.ess = weight_step(s, targets, cfg.seed, cfg.exec);
        log.log_normalizer = s.log_normalizer;
        t = record(out.profile, 0, v, Phase::weight, t, t + cfg.costs.weight_per_particle * K);

        const bool anytime = cfg.move.kind == MoveKind::anytime;
        const bool fresh = anytime && (cfg.move.policy == ExtraPolicy::fresh || !carried);
        auto next = resample_particles(s, K + (fresh ? 1 : 0), cfg.scheme, cfg.seed, cfg.permute);
        t = record(out.profile, 0, v, Phase::resample, t, t + cfg.costs.resample);

        Snapshot<State> extra;
        if (fresh) {
            pick_extra(next, cfg.seed, v, 0);
            extra.extra = std::move(next.back());
            next.pop_back();
        } else if (anytime) {
            extra = std::move(*carried);
            extra.in_flight.reset();  // the kernel has changed
        }
        auto kernel = targets.make_move(std::span<const State>(next), v);

        const double start = t;
        if (anytime) {
            auto r = move_anytime(std::move(next), std::move(extra), kernel, cfg.move.schedule.quota(v),
                                  Stream::derive(cfg.seed, "anytime", v, 0), start);
            next = std::move(r.particles);
            carried = std::move(r.snapshot);
            log.transitions = r.transitions;
            t = start + cfg.move.schedule.quota(v);
        } else {
            auto holds = move_fixed(next, kernel, cfg.move.moves, cfg.seed, v, cfg.exec);
            t = serial_finish(start, TimeWarp{}, holds);
            log.transitions = K * cfg.move.moves;
        }
        record(out.profile, 0, v, Phase::move, start, t);
        log.move_time = anytime ? cfg.move.schedule.quota(v) : t - start;

        s.particles = std::move(next);
        s.log_weights.assign(K, 0.0);
        out.steps.push_back(log);
    }
    out.finish_time = t;
    return out;
}

}  // namespace anytime
