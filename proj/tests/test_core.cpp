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

#include <atomic>
#include <chrono>
#include <random>
#include <thread>
#include <vector>

#include "anytime/core.hpp"
#include "anytime/gamma_study.hpp"
#include "doctest.h"

using namespace anytime;

namespace {

// Counts transitions; every hold is `h`.
JointKernel<int> counting_kernel(double h)
{
    return [h](const int& x, Stream&) { return Transition<int>{x + 1, h}; };
}

}  // namespace

TEST_CASE("clock")
{
    Clock c;
    CHECK(c.now() == 0.0);
    c.advance(1.5);
    c.advance(0.0);
    CHECK(c.now() == 1.5);
    CHECK_THROWS(c.advance(-1.0));
    CHECK_THROWS(c.advance_to(1.0));
    Clock wall(ClockMode::wall);
    const double a = wall.now();
    const double b = wall.now();
    CHECK(b >= a);
    CHECK_THROWS(wall.advance(1.0));
}

TEST_CASE("time warp stretches work overlapping contention")
{
    TimeWarp plain;
    CHECK(plain.finish(2.0, 3.0) == 5.0);
    TimeWarp slow(2.0);
    CHECK(slow.finish(1.0, 3.0) == 7.0);
    TimeWarp contended(1.0, {{2.0, 4.0, 4.0}});
    CHECK(contended.finish(0.0, 1.0) == 1.0);
    // 2 units free, then 2 units of time buy 0.5 work, then 0.5 free
    CHECK(contended.finish(0.0, 3.0) == doctest::Approx(4.5));
    CHECK(contended.finish(2.0, 0.25) == doctest::Approx(3.0));
    CHECK(contended.rate(3.0) == 4.0);
    CHECK(contended.rate(4.0) == 1.0);
    CHECK_THROWS(TimeWarp(0.0));
    CHECK_THROWS(TimeWarp(1.0, {{0.0, 1.0, 0.5}}));
    CHECK_THROWS(TimeWarp(1.0, {{0.0, 2.0, 2.0}, {1.0, 3.0, 2.0}}));
}

TEST_CASE("make_joint draws the hold from the pre-transition state")
{
    std::vector<int> seen;
    HoldTimeModel<int> hold{[&](const int& x, Stream&) {
                                seen.push_back(x);
                                return 1.0 + x;
                            },
                            {}};
    auto joint = make_joint<int>([](const int& x, Stream&) { return x + 10; }, hold);
    Stream rng(1);
    auto t = joint(3, rng);
    CHECK(t.next == 13);
    CHECK(t.hold == 4.0);
    CHECK(seen == std::vector<int>{3});
}

TEST_CASE("jp_advance with zero budget leaves the process unchanged")
{
    JumpProcess<int> p(0, counting_kernel(1.0), Stream(3));
    auto [x0, l0] = p.query();
    CHECK(x0 == 0);
    CHECK(l0 == 0.0);
    p.advance(0.0);
    CHECK(p.state() == 0);
    CHECK(p.lag() == 0.0);
    CHECK(p.arrivals() == 0);
}

TEST_CASE("jp_advance with constant unit holds")
{
    JumpProcess<int> p(0, counting_kernel(1.0), Stream(3));
    p.advance(5.5);
    CHECK(p.arrivals() == 5);
    CHECK(p.state() == 5);
    CHECK(p.lag() == 0.5);

    JumpProcess<int> q(0, counting_kernel(1.0), Stream(3));
    q.advance(2.25);
    CHECK(q.query().second == 0.25);
    CHECK(q.query().first == 2);
    CHECK(q.now() == 2.25);
}

TEST_CASE("jp_advance rejects negative budgets")
{
    JumpProcess<int> p(0, counting_kernel(1.0), Stream(3));
    CHECK_THROWS_AS(p.advance(-0.1), std::invalid_argument);
}

TEST_CASE("non-positive holds are rejected")
{
    JumpProcess<int> p(0, counting_kernel(0.0), Stream(3));
    CHECK_THROWS_AS(p.advance(1.0), std::domain_error);
}

TEST_CASE("arrivals are monotone and N(t) bounds A_N <= t < A_{N+1}")
{
    gamma_study::Config cfg;
    auto kernel = gamma_study::make_kernel(cfg, 1);
    JumpProcess<double> p(1.0, kernel, Stream(11));
    double prev_arrival = 0.0;
    std::uint64_t prev_n = 0;
    for (int i = 0; i < 400; ++i) {
        p.advance(0.25);
        CHECK(p.arrivals() >= prev_n);
        if (p.arrivals() > prev_n)
            CHECK(p.last_arrival() > prev_arrival);
        CHECK(p.last_arrival() <= p.now());
        CHECK(p.lag() >= 0.0);
        prev_arrival = p.last_arrival();
        prev_n = p.arrivals();
    }
}

TEST_CASE("virtual trajectories are reproducible and split-invariant")
{
    gamma_study::Config cfg;
    auto kernel = gamma_study::make_kernel(cfg, 2);
    JumpProcess<double> a(1.0, kernel, Stream::derive(5, "x"));
    JumpProcess<double> b(1.0, kernel, Stream::derive(5, "x"));
    JumpProcess<double> c(1.0, kernel, Stream::derive(5, "x"));
    a.advance(50.0);
    b.advance(50.0);
    for (int i = 0; i < 8; ++i)
        c.advance(6.25);
    CHECK(a.state() == b.state());
    CHECK(a.lag() == b.lag());
    CHECK(a.state() == c.state());
    CHECK(a.arrivals() == c.arrivals());
    CHECK(a.lag() == doctest::Approx(c.lag()).epsilon(1e-12));
}

TEST_CASE("wall mode discards the transition in flight at the deadline")
{
    std::atomic<int> calls{0};
    JointKernel<int> slow = [&](const int& x, Stream&) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        return Transition<int>{x + 1, 1.0};
    };
    JumpProcess<int> p(0, slow, Stream(1), ClockMode::wall);
    p.advance(0.05);
    CHECK(p.arrivals() >= 1);
    CHECK(p.state() == static_cast<int>(p.arrivals()));
    CHECK(calls.load() >= static_cast<int>(p.arrivals()));
    CHECK(calls.load() <= static_cast<int>(p.arrivals()) + 1);
    CHECK(p.lag() >= 0.0);
}
