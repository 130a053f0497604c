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

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "anytime/ensemble.hpp"
#include "anytime/gamma_study.hpp"
#include "doctest.h"

using namespace anytime;

namespace {

struct Tagged {
    int chain;
    int steps;
};

JointKernel<Tagged> tagged_kernel(double h)
{
    return [h](const Tagged& x, Stream&) { return Transition<Tagged>{{x.chain, x.steps + 1}, h}; };
}

std::vector<Tagged> tagged(int m)
{
    std::vector<Tagged> out;
    for (int i = 0; i < m; ++i)
        out.push_back({i, 0});
    return out;
}

}  // namespace

TEST_CASE("ensemble requires K >= 1")
{
    CHECK_THROWS(ChainEnsemble<Tagged>(tagged(1), tagged_kernel(1.0), Stream(1)));
    CHECK_NOTHROW(ChainEnsemble<Tagged>::single_chain({0, 0}, tagged_kernel(1.0), Stream(1)));
}

TEST_CASE("zero budget leaves the ensemble unchanged")
{
    ChainEnsemble<Tagged> e(tagged(4), tagged_kernel(1.0), Stream(1));
    e.advance(0.0);
    auto all = e.query_uncorrected();
    for (int i = 0; i < 4; ++i)
        CHECK(all[i].chain == i);
    CHECK(e.arrivals() == 0);
}

TEST_CASE("two chains with unit holds interleave")
{
    ChainEnsemble<Tagged> e(tagged(2), tagged_kernel(1.0), Stream(1));
    // position 2 (chain 1) simulates first
    e.advance(1.0);
    CHECK(e.position(1).chain == 1);
    CHECK(e.position(1).steps == 1);
    CHECK(e.position(2).chain == 0);
    e.advance(1.0);
    CHECK(e.position(1).chain == 0);
    CHECK(e.position(1).steps == 1);
    e.advance(1.0);
    CHECK(e.arrivals() == 3);
    CHECK(e.position(1).chain == 1);
    CHECK(e.position(1).steps == 2);
    CHECK(e.position(2).chain == 0);
    CHECK(e.position(2).steps == 1);
    auto corrected = e.query_corrected();
    REQUIRE(corrected.size() == 1);
    CHECK(corrected[0].chain == 1);
}

TEST_CASE("rotation is a cyclic permutation of chain identities")
{
    Stream rng(8);
    std::uniform_real_distribution<double> h(0.1, 2.0);
    JointKernel<Tagged> kernel = [&](const Tagged& x, Stream& r) {
        return Transition<Tagged>{{x.chain, x.steps + 1}, h(r)};
    };
    ChainEnsemble<Tagged> e(tagged(8), kernel, Stream(2));
    std::uint64_t last = 0;
    for (int i = 0; i < 200; ++i) {
        e.advance(0.37);
        auto all = e.query_uncorrected();
        std::set<int> ids;
        for (auto& s : all)
            ids.insert(s.chain);
        CHECK(ids.size() == 8);
        // positions read as a cycle: position k+1 was position k one arrival ago
        for (std::size_t k = 1; k < all.size(); ++k)
            CHECK((all[k].chain - all[k - 1].chain + 8) % 8 == 1);
        CHECK(e.arrivals() >= last);
        last = e.arrivals();
    }
}

TEST_CASE("snapshot and restore continue identically")
{
    gamma_study::Config cfg;
    auto kernel = gamma_study::make_kernel(cfg, 2);
    std::vector<double> init{0.5, 1.0, 1.5, 2.0};
    ChainEnsemble<double> whole(init, kernel, Stream(77));
    whole.advance(13.3);
    auto snap = whole.snapshot();
    REQUIRE(snap.in_flight.has_value());
    ChainEnsemble<double> resumed = ChainEnsemble<double>::restore(
        whole.query_corrected(), snap, kernel, whole.stream(), {ClockMode::virtual_time, {}, whole.now()});
    CHECK(resumed.lag() == doctest::Approx(whole.lag()));
    whole.advance(20.0);
    resumed.advance(20.0);
    CHECK(whole.query_uncorrected() == resumed.query_uncorrected());
    CHECK(whole.lag() == doctest::Approx(resumed.lag()).epsilon(1e-12));
}

TEST_CASE("restore without an in-flight transition credits the lag")
{
    // constant holds of 1: a stale lag of 0.75 leaves 0.25 to the next arrival
    ChainEnsemble<Tagged> e = ChainEnsemble<Tagged>::restore(
        {{0, 0}, {1, 0}}, Snapshot<Tagged>{{2, 0}, 0.75, std::nullopt}, tagged_kernel(1.0), Stream(1));
    CHECK(e.lag() == 0.75);
    e.advance(0.2);
    CHECK(e.arrivals() == 0);
    e.advance(0.1);
    CHECK(e.arrivals() == 1);
    CHECK(e.position(1).chain == 2);
    CHECK(e.lag() == doctest::Approx(0.05));

    // a lag longer than the hold completes at once and carries the excess
    ChainEnsemble<Tagged> f = ChainEnsemble<Tagged>::restore(
        {{0, 0}}, Snapshot<Tagged>{{1, 0}, 2.5, std::nullopt}, tagged_kernel(1.0), Stream(1));
    f.advance(0.0);
    CHECK(f.arrivals() == 2);
    CHECK(f.lag() == doctest::Approx(0.5));

    CHECK_THROWS(ChainEnsemble<Tagged>::restore({}, Snapshot<Tagged>{{1, 0}, 0.0, std::nullopt},
                                                tagged_kernel(1.0), Stream(1)));
    CHECK_THROWS(ChainEnsemble<Tagged>::restore({{0, 0}}, Snapshot<Tagged>{{1, 0}, -1.0, std::nullopt},
                                                tagged_kernel(1.0), Stream(1)));
}

TEST_CASE("fresh iid start: corrected query returns the K waiting states")
{
    ChainEnsemble<double> e({1.0, 2.0, 3.0}, gamma_study::make_kernel({}, 0), Stream(1));
    CHECK(e.query_corrected() == std::vector<double>{1.0, 2.0});
    CHECK(e.query_uncorrected() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("each chain, viewed at its own transitions, is a chain with kernel kappa")
{
    // Chains start iid from pi; the fifth state of chain 0 along its own
    // transitions must still be pi-distributed whatever the hold times did.
    gamma_study::Config cfg;
    auto pi = gamma_study::target(cfg);
    auto kernel = gamma_study::make_kernel(cfg, 3);
    using Labelled = std::pair<int, double>;
    const std::size_t reps = 4096;
    std::vector<double> fifth;
    for (std::size_t r = 0; r < reps; ++r) {
        Stream init = Stream::derive(3, "init", r);
        std::gamma_distribution<double> g(cfg.shape, cfg.scale);
        std::vector<Labelled> states;
        for (int i = 0; i < 4; ++i)
            states.push_back({i, g(init)});
        int chain0_steps = 0;
        double chain0_fifth = 0.0;
        JointKernel<Labelled> k = [&](const Labelled& s, Stream& rng) {
            auto t = kernel(s.second, rng);
            if (s.first == 0 && ++chain0_steps == 5)
                chain0_fifth = t.next;
            return Transition<Labelled>{{s.first, t.next}, t.hold};
        };
        ChainEnsemble<Labelled> e(states, k, Stream::derive(3, "run", r));
        while (chain0_steps < 5)
            e.advance(5.0);
        fifth.push_back(chain0_fifth);
    }
    const double floor = gamma_study::iid_w1_floor(pi, reps, 8, 17);
    CHECK(wasserstein1(fifth, pi) < 3.0 * floor);
}
