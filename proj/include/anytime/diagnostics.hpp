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

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace anytime {

/// Right-continuous step CDF of a sample.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double operator()(double x) const;

    std::span<const double> sorted() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Closed-form univariate reference distribution.
class ReferenceCdf {
public:
    enum class Family { gamma, normal };

    static ReferenceCdf gamma(double shape, double scale);
    static ReferenceCdf normal(double mean, double variance);

    double operator()(double x) const { return cdf(x); }
    double cdf(double x) const;
    double sf(double x) const;
    double quantile(double u) const;
    /// Integral of the CDF from the bottom of the support to x.
    double integrated_cdf(double x) const;
    double mean() const;

    Family family() const { return family_; }
    double param1() const { return a_; }
    double param2() const { return b_; }

private:
    ReferenceCdf(Family family, double a, double b) : family_(family), a_(a), b_(b) {}

    Family family_;
    double a_;  // shape or mean
    double b_;  // scale or standard deviation
};

/// 1-Wasserstein distance between two CDFs by the trapezoid rule on a uniform
/// grid of `points` nodes spanning [lower, upper].
template <class CdfA, class CdfB>
double wasserstein1(const CdfA& a, const CdfB& b, double lower, double upper, std::size_t points)
{
    if (!(lower < upper))
        throw std::invalid_argument("wasserstein1: lower must be below upper");
    if (points < 2)
        throw std::invalid_argument("wasserstein1: need at least two grid points");
    const double h = (upper - lower) / static_cast<double>(points - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = i + 1 == points ? upper : lower + h * static_cast<double>(i);
        const double fa = a(x);
        const double fb = b(x);
        if (!std::isfinite(fa) || !std::isfinite(fb))
            throw std::domain_error("wasserstein1: non-finite CDF value");
        const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
        total += w * std::abs(fa - fb);
    }
    return total * h;
}

/// Exact 1-Wasserstein distance between a sample's ECDF and a reference
/// distribution over the whole real line, integrating piecewise between the
/// sorted sample points.
double wasserstein1(const EmpiricalCdf& sample, const ReferenceCdf& reference);

/// Convenience: sorts a copy of `samples`.
double wasserstein1(std::span<const double> samples, const ReferenceCdf& reference);

}  // namespace anytime
