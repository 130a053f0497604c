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
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "anytime/clock.hpp"
#include "anytime/profile.hpp"
#include "anytime/smc.hpp"

namespace anytime {

/// One simulated processor: its particle share, a hold-time multiplier
/// (2 = twice as slow) and contention windows in virtual time.
struct ProcessorConfig {
    std::size_t share = 0;
    double speed = 1.0;
    std::vector<ContentionWindow> contention;

    TimeWarp warp() const { return TimeWarp(speed, contention); }
};

/// `count` processors splitting K as evenly as possible (earlier ones get
/// the remainder).
std::vector<ProcessorConfig> equal_shares(std::size_t K, std::size_t count);

/// Resamples globally and deals the ancestors out in contiguous blocks of
/// K^p (plus one extra chain each when `extras`). The extra of each block is
/// a uniformly chosen member, moved to the block's end.
template <class State>
std::vector<std::vector<State>> collective_resample(const ParticleSystem<State>& s,
                                                    const std::vector<ProcessorConfig>& procs, bool extras,
                                                    ResampleScheme scheme, std::uint64_t seed, bool permute)
{
    const std::size_t add = extras ? 1 : 0;
    std::size_t total = 0;
    for (const auto& p : procs)
        total += p.share + add;
    auto all = resample_particles(s, total, scheme, seed, permute);
    std::vector<std::vector<State>> blocks(procs.size());
    std::size_t pos = 0;
    for (std::size_t p = 0; p < procs.size(); ++p) {
        const std::size_t n = procs[p].share + add;
        blocks[p].assign(std::make_move_iterator(all.begin() + pos), std::make_move_iterator(all.begin() + pos + n));
        pos += n;
        if (extras)
            pick_extra(blocks[p], seed, s.step, p);
    }
    return blocks;
}

template <class State>
struct DistResult {
    ParticleSystem<State> system;
    std::vector<StepLog> steps;
    std::vector<ProfileRecord> profile;
    double finish_time = 0.0;
};

/// Simulates the distributed sampler on per-processor virtual clocks:
/// local weighting, barrier, collective resampling, local moves, barrier.
/// `cfg.particles` is ignored; K is the sum of the shares.
template <class State>
DistResult<State> run_distributed(const TargetSequence<State>& targets, const std::vector<ProcessorConfig>& procs,
                                  const SmcConfig& cfg)
{
    if (procs.empty())
        throw std::invalid_argument("run_distributed: need at least one processor");
    std::size_t K = 0;
    std::vector<std::size_t> offset;
    std::vector<TimeWarp> warp;
    for (const auto& p : procs) {
        if (p.share == 0)
            throw std::invalid_argument("run_distributed: every processor needs at least one particle");
        offset.push_back(K);
        K += p.share;
        warp.push_back(p.warp());
    }
    if (K < 2)
        throw std::invalid_argument("run_distributed: need at least two particles");
    detail::check_move_config(cfg.move, targets.steps);
    const std::size_t P = procs.size();

    DistResult<State> out;
    out.system = initialize(targets, K, cfg.seed, cfg.exec);
    auto& s = out.system;
    std::vector<double> clock(P);
    std::vector<std::vector<ProfileRecord>> prof(P);
    for (std::size_t p = 0; p < P; ++p)
        clock[p] = record(prof[p], p, 0, Phase::init, 0.0,
                          warp[p].finish(0.0, cfg.costs.init_per_particle * procs[p].share));

    auto barrier = [&](std::size_t v) {
        const double release = *std::max_element(clock.begin(), clock.end());
        for (std::size_t p = 0; p < P; ++p)
            clock[p] = record(prof[p], p, v, Phase::wait, clock[p], release);
        return release;
    };

    std::vector<std::optional<Snapshot<State>>> carried(P);
    for (std::size_t v = 1; v <= targets.steps; ++v) {
        StepLog log;
        log.step = v;
        log.ess = weight_step(s, targets, cfg.seed, cfg.exec);
        log.log_normalizer = s.log_normalizer;
        for (std::size_t p = 0; p < P; ++p)
            clock[p] = record(prof[p], p, v, Phase::weight, clock[p],
                              warp[p].finish(clock[p], cfg.costs.weight_per_particle * procs[p].share));
        const double release = barrier(v);

        const bool anytime = cfg.move.kind == MoveKind::anytime;
        const bool fresh = anytime && (cfg.move.policy == ExtraPolicy::fresh || !carried[0]);
        auto blocks = collective_resample(s, procs, fresh, cfg.scheme, cfg.seed, cfg.permute);
        for (std::size_t p = 0; p < P; ++p)
            clock[p] = record(prof[p], p, v, Phase::resample, release, release + cfg.costs.resample);

        std::vector<Snapshot<State>> extra(P);
        std::vector<State> cloud;
        cloud.reserve(K);
        for (std::size_t p = 0; p < P; ++p) {
            if (fresh) {
                extra[p].extra = std::move(blocks[p].back());
                blocks[p].pop_back();
            } else if (anytime) {
                extra[p] = std::move(*carried[p]);
                extra[p].in_flight.reset();
            }
            std::move(blocks[p].begin(), blocks[p].end(), std::back_inserter(cloud));
        }
        auto kernel = targets.make_move(std::span<const State>(cloud), v);
        const double start = clock[0];  // every processor leaves the collective together

        if (anytime) {
            const double quota = cfg.move.schedule.quota(v);
            std::vector<std::uint64_t> transitions(P);
            for_each_index(P, cfg.exec, [&](std::size_t p) {
                std::vector<State> mine(cloud.begin() + offset[p], cloud.begin() + offset[p] + procs[p].share);
                auto r = move_anytime(std::move(mine), std::move(extra[p]), kernel, quota,
                                      Stream::derive(cfg.seed, "anytime", v, p), start, warp[p]);
                std::move(r.particles.begin(), r.particles.end(), cloud.begin() + offset[p]);
                carried[p] = std::move(r.snapshot);
                transitions[p] = r.transitions;
            });
            for (std::size_t p = 0; p < P; ++p) {
                clock[p] = record(prof[p], p, v, Phase::move, start, start + quota);
                log.transitions += transitions[p];
            }
        } else {
            auto holds = move_fixed(cloud, kernel, cfg.move.moves, cfg.seed, v, cfg.exec);
            std::span<const std::vector<double>> all(holds);
            for (std::size_t p = 0; p < P; ++p)
                clock[p] = record(prof[p], p, v, Phase::move, start,
                                  serial_finish(start, warp[p], all.subspan(offset[p], procs[p].share)));
            log.transitions = K * cfg.move.moves;
        }
        const double done = barrier(v);
        log.move_time = anytime ? cfg.move.schedule.quota(v) : done - start;

        s.particles = std::move(cloud);
        s.log_weights.assign(K, 0.0);
        out.steps.push_back(log);
    }

    out.finish_time = *std::max_element(clock.begin(), clock.end());
    for (auto& p : prof)
        out.profile.insert(out.profile.end(), p.begin(), p.end());
    return out;
}

}  // namespace anytime
