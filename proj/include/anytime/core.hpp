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

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "anytime/clock.hpp"
#include "anytime/rng.hpp"

namespace anytime {

/// One completed kernel application: the new state and the compute time it
/// took (virtual units). In wall mode `hold` is ignored and measured instead.
template <class State>
struct Transition {
    State next;
    double hold;
};

/// Plain Markov kernel: (state, rng) -> new state.
template <class State>
using MarkovKernel = std::function<State(const State&, Stream&)>;

/// Kernel that reports its own compute time alongside the new state.
template <class State>
using JointKernel = std::function<Transition<State>(const State&, Stream&)>;

/// Distribution of the compute time of one transition, given the state the
/// transition starts from.
template <class State>
struct HoldTimeModel {
    std::function<double(const State&, Stream&)> sample;
    /// E[H | x], when known in closed form (diagnostics only).
    std::function<double(const State&)> conditional_mean;
};

/// Couples a kernel with a virtual hold model. The hold is drawn from the
/// pre-transition state before the kernel runs.
template <class State>
JointKernel<State> make_joint(MarkovKernel<State> kernel, HoldTimeModel<State> hold)
{
    return [kernel = std::move(kernel), hold = std::move(hold)](const State& x, Stream& rng) {
        const double h = hold.sample(x, rng);
        return Transition<State>{kernel(x, rng), h};
    };
}

namespace detail {

inline void check_budget(double budget)
{
    if (!(budget >= 0.0) || !std::isfinite(budget))
        throw std::invalid_argument("advance: budget must be finite and non-negative");
}

inline void check_hold(double h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::domain_error("hold time must be positive and finite");
}

}  // namespace detail

/// A Markov chain run in real time: (X, L)(t) with X the most recently
/// completed state and L the time since it arrived.
template <class State>
class JumpProcess {
public:
    JumpProcess(State initial, JointKernel<State> kernel, Stream rng,
                ClockMode mode = ClockMode::virtual_time, TimeWarp warp = {})
        : state_(std::move(initial)),
          kernel_(std::move(kernel)),
          rng_(rng),
          clock_(mode),
          warp_(std::move(warp))
    {
    }

    /// Runs the chain for `budget` more units of time. Virtual mode stops
    /// exactly at the budget; wall mode finishes the transition in flight at
    /// the deadline and discards its result.
    void advance(double budget)
    {
        detail::check_budget(budget);
        if (clock_.mode() == ClockMode::wall) {
            advance_wall(budget);
            return;
        }
        const double deadline = clock_.now() + budget;
        for (;;) {
            if (!pending_) {
                auto t = kernel_(state_, rng_);
                detail::check_hold(t.hold);
                const double arrival = warp_.finish(last_arrival_, t.hold);
                pending_.emplace(Pending{std::move(t.next), arrival});
            }
            if (pending_->arrival > deadline)
                break;
            state_ = std::move(pending_->next);
            last_arrival_ = pending_->arrival;
            ++arrivals_;
            pending_.reset();
        }
        clock_.advance_to(deadline);
        now_ = deadline;
    }

    /// (X(t), L(t)) at the current clock reading; does not advance anything.
    std::pair<const State&, double> query() const { return {state_, now_ - last_arrival_}; }

    const State& state() const { return state_; }
    double lag() const { return now_ - last_arrival_; }
    double now() const { return now_; }
    double last_arrival() const { return last_arrival_; }
    std::uint64_t arrivals() const { return arrivals_; }
    bool in_flight() const { return pending_.has_value(); }
    const Stream& stream() const { return rng_; }

private:
    struct Pending {
        State next;
        double arrival;
    };

    void advance_wall(double budget)
    {
        const double deadline = clock_.now() + budget;
        while (clock_.now() < deadline) {
            auto t = kernel_(state_, rng_);
            const double done = clock_.now();
            if (done > deadline) {
                now_ = done;
                return;
            }
            state_ = std::move(t.next);
            last_arrival_ = done;
            ++arrivals_;
        }
        now_ = clock_.now();
    }

    State state_;
    JointKernel<State> kernel_;
    Stream rng_;
    Clock clock_;
    TimeWarp warp_;
    std::optional<Pending> pending_;
    double now_ = 0.0;
    double last_arrival_ = 0.0;
    std::uint64_t arrivals_ = 0;
};

}  // namespace anytime
