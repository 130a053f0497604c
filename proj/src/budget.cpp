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

#include "anytime/budget.hpp"

#include <cmath>
#include <stdexcept>

namespace anytime {

BudgetMode parse_budget_mode(std::string_view name)
{
    if (name == "uniform")
        return BudgetMode::uniform;
    if (name == "linear")
        return BudgetMode::linear;
    throw std::invalid_argument("unknown budget schedule: " + std::string(name));
}

std::string to_string(BudgetMode mode)
{
    return mode == BudgetMode::uniform ? "uniform" : "linear";
}

BudgetSchedule apportion_budget(double t, std::size_t steps, BudgetMode mode, double c)
{
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("apportion_budget: t must be positive");
    if (steps == 0)
        throw std::invalid_argument("apportion_budget: need at least one step");
    if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("apportion_budget: c must be non-negative");

    BudgetSchedule s{t, mode, mode == BudgetMode::linear ? c : 0.0, {}};
    s.quotas.resize(steps);
    const double V = static_cast<double>(steps);
    auto quota = [&](double v) {
        return mode == BudgetMode::uniform ? t / V : 2.0 * (v + c) * t / (V * (V + 2.0 * c + 1.0));
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < steps; ++i) {
        s.quotas[i] = quota(static_cast<double>(i + 1));
        sum += s.quotas[i];
    }
    // keep the formula value when it already closes the sum; otherwise take
    // the remainder and nudge it by ulps until the running sum lands on t
    double last = quota(V);
    if (sum + last != t)
        last = t - sum;
    for (int guard = 0; sum + last != t && guard < 64; ++guard)
        last = std::nextafter(last, sum + last < t ? INFINITY : -INFINITY);
    if (sum + last != t || !(last > 0.0))
        throw std::logic_error("apportion_budget: could not close the schedule");
    s.quotas.back() = last;
    return s;
}

}  // namespace anytime
