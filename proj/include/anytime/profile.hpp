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

enum class Phase { init, weight, resample, move, wait };

inline std::string to_string(Phase p)
{
    switch (p) {
    case Phase::init: return "init";
    case Phase::weight: return "weight";
    case Phase::resample: return "resample";
    case Phase::move: return "move";
    case Phase::wait: return "wait";
    }
    return "?";
}

Phase parse_phase(std::string_view name);

/// One busy or idle interval of one (simulated) processor, virtual time.
struct ProfileRecord {
    std::size_t processor = 0;
    std::size_t step = 0;
    Phase phase = Phase::init;
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const ProfileRecord&, const ProfileRecord&) = default;
};

/// Appends [start, end) unless it is empty; returns end.
inline double record(std::vector<ProfileRecord>& out, std::size_t processor, std::size_t step,
                     Phase phase, double start, double end)
{
    if (end > start)
        out.push_back({processor, step, phase, start, end});
    return end;
}

struct ProcessorWait {
    std::size_t processor = 0;
    double busy = 0.0;
    double wait = 0.0;
    double move_busy = 0.0;
    double move_wait = 0.0;  // waits that directly follow a move phase
    double wait_fraction() const { return busy + wait > 0.0 ? wait / (busy + wait) : 0.0; }
    double move_wait_fraction() const
    {
        return move_busy + move_wait > 0.0 ? move_wait / (move_busy + move_wait) : 0.0;
    }
};

struct WaitSummary {
    std::vector<ProcessorWait> processors;
    double busy = 0.0;
    double wait = 0.0;
    double move_busy = 0.0;
    double move_wait = 0.0;
    double wait_fraction() const { return busy + wait > 0.0 ? wait / (busy + wait) : 0.0; }
    double move_wait_fraction() const
    {
        return move_busy + move_wait > 0.0 ? move_wait / (move_busy + move_wait) : 0.0;
    }
};

/// Aggregates busy and wait time. Throws std::invalid_argument unless each
/// processor's records are contiguous and non-overlapping.
WaitSummary wait_statistics(const std::vector<ProfileRecord>& records);

}  // namespace anytime
