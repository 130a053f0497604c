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

#include "anytime/models/rk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "anytime/resample.hpp"

namespace anytime {

namespace {

// Dormand & Prince (1980) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants (Hairer, Norsett & Wanner, sec. II.4)
constexpr double kBeta = 0.04;
constexpr double kAlpha = 1.0 / 5 - 0.75 * kBeta;
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

}  // namespace

IntegrationStats integrate(const VectorField& f, std::span<double> x, double t0, double t1,
                           const Tolerances& tol, double& h)
{
    if (!(t1 >= t0))
        throw std::invalid_argument("integrate: t1 must not precede t0");
    if (!(tol.rtol > 0.0) || !(tol.atol >= 0.0))
        throw std::invalid_argument("integrate: invalid tolerances");
    IntegrationStats stats;
    if (t1 == t0)
        return stats;
    const std::size_t n = x.size();
    std::vector<double> work(9 * n);
    auto slot = [&](std::size_t i) { return std::span<double>(work.data() + i * n, n); };
    auto k1 = slot(0), k2 = slot(1), k3 = slot(2), k4 = slot(3), k5 = slot(4), k6 = slot(5), k7 = slot(6),
         y = slot(7), tmp = slot(8);
    if (!(h > 0.0) || !std::isfinite(h))
        h = std::min(1e-2, t1 - t0);
    double t = t0;
    double err_prev = 1e-4;
    f(t, x, k1);
    while (t < t1) {
        if (stats.steps() >= tol.max_steps)
            throw NumericalError("integrate: step limit exceeded");
        if (h < tol.h_min)
            throw NumericalError("integrate: step size underflow (h = " + std::to_string(h) + ")");
        const bool last = t + h >= t1;
        const double step = last ? t1 - t : h;

        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + step * a21 * k1[i];
        f(t + c2 * step, tmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + step * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * step, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * step, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * step, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + step, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = x[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + step, y, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = tol.atol + tol.rtol * std::max(std::abs(x[i]), std::abs(y[i]));
            const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / sc;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(n));
        if (!std::isfinite(err))
            err = 1e10;

        if (err <= 1.0) {
            t = last ? t1 : t + step;
            std::copy(y.begin(), y.end(), x.begin());
            std::swap(k1, k7);
            ++stats.accepted;
            double fac = err == 0.0 ? kMaxFactor
                                    : kSafety * std::pow(err, -kAlpha) * std::pow(err_prev, kBeta);
            fac = std::clamp(fac, kMinFactor, kMaxFactor);
            err_prev = std::max(err, 1e-4);
            // a truncated final step says little about the natural step size
            if (!last)
                h = step * fac;
        } else {
            ++stats.rejected;
            const double fac = std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
            h = step * fac;
        }
    }
    return stats;
}

}  // namespace anytime
