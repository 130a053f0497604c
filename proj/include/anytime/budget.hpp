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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace anytime {

enum class BudgetMode { uniform, linear };

BudgetMode parse_budget_mode(std::string_view name);
std::string to_string(BudgetMode mode);

/// Per-step move-time quotas. In linear mode t_v = 2(v + c) t / (V(V + 2c + 1)),
/// so later (usually harder) targets get more time; c damps the growth.
struct BudgetSchedule {
    double total = 0.0;
    BudgetMode mode = BudgetMode::uniform;
    double c = 0.0;
    std::vector<double> quotas;

    std::size_t steps() const { return quotas.size(); }
    /// 1-based step.
    double quota(std::size_t v) const { return quotas.at(v - 1); }
};

/// The last quota absorbs rounding so that summing the quotas left to right
/// gives `t` exactly.
BudgetSchedule apportion_budget(double t, std::size_t steps, BudgetMode mode, double c = 0.0);

}  // namespace anytime
