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
#include <functional>
#include <span>
#include <vector>

namespace anytime {

struct Tolerances {
    double rtol = 1e-6;
    double atol = 1e-6;
    double h_min = 1e-12;       // below this the step size has underflowed
    std::size_t max_steps = 1'000'000;
};

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t steps() const { return accepted + rejected; }
};

/// dx/dt = f(t, x), written into the last argument.
using VectorField = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Dormand-Prince 5(4) with FSAL and a PI step-size controller. Integrates x
/// in place from t0 to t1; `h` is the initial step guess and receives the last
/// proposed step, so successive calls can warm-start. Throws NumericalError
/// on step-size underflow or when max_steps is exceeded.
IntegrationStats integrate(const VectorField& f, std::span<double> x, double t0, double t1,
                           const Tolerances& tol, double& h);

}  // namespace anytime
