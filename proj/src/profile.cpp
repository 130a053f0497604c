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

#include "anytime/profile.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace anytime {

Phase parse_phase(std::string_view name)
{
    for (Phase p : {Phase::init, Phase::weight, Phase::resample, Phase::move, Phase::wait})
        if (to_string(p) == name)
            return p;
    throw std::invalid_argument("unknown phase: " + std::string(name));
}

WaitSummary wait_statistics(const std::vector<ProfileRecord>& records)
{
    std::map<std::size_t, std::vector<const ProfileRecord*>> by_proc;
    for (const auto& r : records) {
        if (!(r.end >= r.start) || !std::isfinite(r.start) || !std::isfinite(r.end))
            throw std::invalid_argument("wait_statistics: malformed record interval");
        by_proc[r.processor].push_back(&r);
    }
    WaitSummary out;
    for (auto& [proc, list] : by_proc) {
        ProcessorWait w;
        w.processor = proc;
        const ProfileRecord* prev = nullptr;
        for (const auto* r : list) {
            if (prev && r->start != prev->end)
                throw std::invalid_argument("wait_statistics: records of processor " + std::to_string(proc) +
                                            " are not contiguous");
            const double d = r->end - r->start;
            if (r->phase == Phase::wait) {
                w.wait += d;
                if (prev && prev->phase == Phase::move)
                    w.move_wait += d;
            } else {
                w.busy += d;
                if (r->phase == Phase::move)
                    w.move_busy += d;
            }
            prev = r;
        }
        out.busy += w.busy;
        out.wait += w.wait;
        out.move_busy += w.move_busy;
        out.move_wait += w.move_wait;
        out.processors.push_back(w);
    }
    return out;
}

}  // namespace anytime
