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

#include <chrono>
#include <vector>

namespace anytime {

enum class ClockMode { virtual_time, wall };

/// Time source in seconds. In virtual mode time moves only through advance();
/// in wall mode it reads a steady clock relative to construction plus an
/// origin offset.
class Clock {
public:
    explicit Clock(ClockMode mode = ClockMode::virtual_time, double origin = 0.0);

    ClockMode mode() const { return mode_; }
    double now() const;

    /// Virtual mode only. Throws on negative or non-finite h.
    void advance(double h);
    /// Virtual mode only; t must not precede now().
    void advance_to(double t);

private:
    ClockMode mode_;
    double origin_;
    double virtual_now_;
    std::chrono::steady_clock::time_point start_;
};

/// A slowdown applied to a processor over [start, end) of virtual time.
struct ContentionWindow {
    double start;
    double end;
    double factor;  // >= 1
};

/// Maps an amount of work (a raw sampled hold time) started at some instant to
/// its completion instant. Outside contention one unit of work takes `speed`
/// units of time; inside a window it takes `speed * factor`.
class TimeWarp {
public:
    TimeWarp() = default;
    explicit TimeWarp(double speed, std::vector<ContentionWindow> windows = {});

    double finish(double start, double work) const;
    /// Slowdown multiplier in force at time t (speed included).
    double rate(double t) const;

    double speed() const { return speed_; }
    const std::vector<ContentionWindow>& windows() const { return windows_; }
    bool identity() const { return speed_ == 1.0 && windows_.empty(); }

private:
    double speed_ = 1.0;
    std::vector<ContentionWindow> windows_;  // sorted, disjoint
};

}  // namespace anytime
