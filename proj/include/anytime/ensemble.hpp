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
#include <optional>
#include <stdexcept>
#include <vector>

#include "anytime/core.hpp"

namespace anytime {

/// Extra chain and lag carried between move steps. `in_flight` holds the
/// transition that was running when the ensemble stopped; it is only valid if
/// the kernel has not changed since.
template <class State>
struct Snapshot {
    State extra;
    double lag = 0.0;
    std::optional<Transition<State>> in_flight;
};

/// K waiting chains plus one simulating chain, run serially. Position K+1 is
/// always the one being simulated; on each arrival its new state moves to
/// position 1 and everything else shifts up one place. Querying positions
/// 1..K gives states free of length bias; position K+1 carries all of it.
template <class State>
class ChainEnsemble {
public:
    struct Options {
        ClockMode mode = ClockMode::virtual_time;
        TimeWarp warp = {};
        double start_time = 0.0;
    };

    /// `states` holds positions 1..K+1 in order; requires K >= 1.
    ChainEnsemble(std::vector<State> states, JointKernel<State> kernel, Stream rng,
                  Options options = {})
        : ChainEnsemble(std::move(states), std::move(kernel), rng, std::move(options), true)
    {
    }

    /// A lone chain (K = 0). Its state follows the length-biased law; used
    /// for diagnostics only.
    static ChainEnsemble single_chain(State state, JointKernel<State> kernel, Stream rng,
                                      Options options = {})
    {
        std::vector<State> states;
        states.push_back(std::move(state));
        return ChainEnsemble(std::move(states), std::move(kernel), rng, std::move(options), false);
    }

    /// Rebuilds an ensemble from K waiting states and a snapshot of the extra
    /// chain. Without an in-flight transition, a fresh one is drawn from the
    /// extra state on the next advance and the stored lag is credited
    /// against its hold; with one, the run continues exactly where it left off.
    static ChainEnsemble restore(std::vector<State> waiting, Snapshot<State> snapshot,
                                 JointKernel<State> kernel, Stream rng, Options options = {})
    {
        if (waiting.empty())
            throw std::invalid_argument("ChainEnsemble::restore: need at least one waiting state");
        if (!(snapshot.lag >= 0.0) || !std::isfinite(snapshot.lag))
            throw std::invalid_argument("ChainEnsemble::restore: lag must be non-negative");
        waiting.push_back(std::move(snapshot.extra));
        ChainEnsemble e(std::move(waiting), std::move(kernel), rng, std::move(options), true);
        e.last_arrival_ = e.now_ - snapshot.lag;
        if (snapshot.in_flight) {
            detail::check_hold(snapshot.in_flight->hold);
            e.pending_.emplace(Pending{std::move(snapshot.in_flight->next), snapshot.in_flight->hold,
                                       e.warp_.finish(e.last_arrival_, snapshot.in_flight->hold)});
        }
        return e;
    }

    void advance(double budget)
    {
        detail::check_budget(budget);
        if (clock_.mode() == ClockMode::wall) {
            advance_wall(budget);
            return;
        }
        const double deadline = now_ + budget;
        for (;;) {
            if (!pending_) {
                auto t = kernel_(position(size()), rng_);
                detail::check_hold(t.hold);
                const double arrival = warp_.finish(last_arrival_, t.hold);
                pending_.emplace(Pending{std::move(t.next), t.hold, arrival});
            }
            if (pending_->arrival > deadline)
                break;
            last_arrival_ = pending_->arrival;
            rotate_in(std::move(pending_->next));
            pending_.reset();
        }
        clock_.advance_to(deadline);
        now_ = deadline;
    }

    /// Positions 1..K.
    std::vector<State> query_corrected() const
    {
        std::vector<State> out;
        out.reserve(size() - 1);
        for (std::size_t k = 1; k < size(); ++k)
            out.push_back(position(k));
        return out;
    }

    /// Positions 1..K+1.
    std::vector<State> query_uncorrected() const
    {
        std::vector<State> out;
        out.reserve(size());
        for (std::size_t k = 1; k <= size(); ++k)
            out.push_back(position(k));
        return out;
    }

    Snapshot<State> snapshot() const
    {
        Snapshot<State> s{position(size()), lag(), std::nullopt};
        if (pending_)
            s.in_flight = Transition<State>{pending_->next, pending_->hold};
        return s;
    }

    /// 1-based position.
    const State& position(std::size_t k) const { return states_[(offset_ + k - 1) % size()]; }

    std::size_t size() const { return states_.size(); }
    std::size_t waiting() const { return states_.size() - 1; }
    double lag() const { return now_ - last_arrival_; }
    double now() const { return now_; }
    std::uint64_t arrivals() const { return arrivals_; }
    const Stream& stream() const { return rng_; }

private:
    struct Pending {
        State next;
        double hold;
        double arrival;
    };

    ChainEnsemble(std::vector<State> states, JointKernel<State> kernel, Stream rng,
                  Options options, bool require_waiting)
        : states_(std::move(states)),
          kernel_(std::move(kernel)),
          rng_(rng),
          clock_(options.mode, options.start_time),
          warp_(std::move(options.warp)),
          now_(options.start_time),
          last_arrival_(options.start_time)
    {
        if (states_.empty() || (require_waiting && states_.size() < 2))
            throw std::invalid_argument("ChainEnsemble: need K >= 1 waiting chains plus one extra");
    }

    // New state enters at position 1; the old position K+1 slot is reused.
    void rotate_in(State next)
    {
        const std::size_t slot = (offset_ + size() - 1) % size();
        states_[slot] = std::move(next);
        offset_ = slot;
        ++arrivals_;
    }

    void advance_wall(double budget)
    {
        const double deadline = clock_.now() + budget;
        while (clock_.now() < deadline) {
            auto t = kernel_(position(size()), rng_);
            const double done = clock_.now();
            if (done > deadline) {
                now_ = done;
                return;
            }
            last_arrival_ = done;
            rotate_in(std::move(t.next));
        }
        now_ = clock_.now();
    }

    std::vector<State> states_;
    std::size_t offset_ = 0;
    JointKernel<State> kernel_;
    Stream rng_;
    Clock clock_;
    TimeWarp warp_;
    std::optional<Pending> pending_;
    double now_;
    double last_arrival_;
    std::uint64_t arrivals_ = 0;
};

}  // namespace anytime
