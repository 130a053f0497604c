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
#include <exception>
#include <mutex>

namespace anytime {

/// Serial is the reference path; parallel must produce bit-identical results.
enum class Execution { serial, parallel };

/// Runs f(i) for i in [0, n). Iterations must not share mutable state. The
/// first exception thrown by any iteration is rethrown after the loop.
template <class F>
void for_each_index(std::size_t n, Execution exec, F&& f)
{
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error)
                error = std::current_exception();
        }
    }
    if (error)
        std::rethrow_exception(error);
}

}  // namespace anytime
