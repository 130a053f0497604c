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

#include "anytime/clock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anytime {

Clock::Clock(ClockMode mode, double origin)
    : mode_(mode), origin_(origin), virtual_now_(origin), start_(std::chrono::steady_clock::now())
{
}

double Clock::now() const
{
    if (mode_ == ClockMode::virtual_time)
        return virtual_now_;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    return origin_ + elapsed.count();
}

void Clock::advance(double h)
{
    if (mode_ != ClockMode::virtual_time)
        throw std::logic_error("Clock::advance: wall clocks advance on their own");
    if (!(h >= 0.0) || !std::isfinite(h))
        throw std::invalid_argument("Clock::advance: step must be finite and non-negative");
    virtual_now_ += h;
}

void Clock::advance_to(double t)
{
    if (mode_ != ClockMode::virtual_time)
        throw std::logic_error("Clock::advance_to: wall clocks advance on their own");
    if (!(t >= virtual_now_) || !std::isfinite(t))
        throw std::invalid_argument("Clock::advance_to: time must not go backwards");
    virtual_now_ = t;
}

TimeWarp::TimeWarp(double speed, std::vector<ContentionWindow> windows)
    : speed_(speed), windows_(std::move(windows))
{
    if (!(speed_ > 0.0) || !std::isfinite(speed_))
        throw std::invalid_argument("TimeWarp: speed must be positive");
    std::sort(windows_.begin(), windows_.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        const auto& w = windows_[i];
        if (!(w.factor >= 1.0) || !(w.end > w.start))
            throw std::invalid_argument("TimeWarp: windows need end > start and factor >= 1");
        if (i > 0 && w.start < windows_[i - 1].end)
            throw std::invalid_argument("TimeWarp: contention windows overlap");
    }
}

double TimeWarp::rate(double t) const
{
    for (const auto& w : windows_)
        if (t >= w.start && t < w.end)
            return speed_ * w.factor;
    return speed_;
}

double TimeWarp::finish(double start, double work) const
{
    if (windows_.empty())
        return start + work * speed_;
    double t = start;
    double remaining = work;
    for (const auto& w : windows_) {
        if (w.end <= t)
            continue;
        if (t < w.start) {
            // unimpeded stretch before the window
            const double capacity = (w.start - t) / speed_;
            if (remaining <= capacity)
                return t + remaining * speed_;
            remaining -= capacity;
            t = w.start;
        }
        const double slow = speed_ * w.factor;
        const double capacity = (w.end - t) / slow;
        if (remaining <= capacity)
            return t + remaining * slow;
        remaining -= capacity;
        t = w.end;
    }
    return t + remaining * speed_;
}

}  // namespace anytime
