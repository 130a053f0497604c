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

#include "anytime/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace anytime {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 1000;

void check_shape(double a)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("gamma: shape must be positive and finite");
}

// log of x^a e^-x / Gamma(a)
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

double p_series(double a, double x)
{
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps)
            break;
    }
    return sum * std::exp(log_prefactor(a, x));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double q_continued_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            break;
    }
    return std::exp(log_prefactor(a, x)) * h;
}

double initial_guess(double a, double p)
{
    if (a > 1.0) {
        const double pp = p < 0.5 ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5)
            z = -z;
        const double w = 1.0 - 1.0 / (9.0 * a) - z / (3.0 * std::sqrt(a));
        return std::max(1e-3, a * w * w * w);
    }
    const double t = 1.0 - a * (0.253 + a * 0.12);
    if (p < t)
        return std::pow(p / t, 1.0 / a);
    return 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
}

// Solves P(a, y) = u (lower = true) or Q(a, y) = u (lower = false) for y by
// Newton steps safeguarded with a geometric bisection bracket.
double invert_incomplete_gamma(double a, double u, bool lower)
{
    check_shape(a);
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("gamma quantile: probability must lie in (0, 1)");

    // residual(y) is increasing in y
    auto residual = [&](double y) { return lower ? gamma_p(a, y) - u : u - gamma_q(a, y); };

    double y = initial_guess(a, lower ? u : 1.0 - u);
    if (!(y > 0.0) || !std::isfinite(y))
        y = a;

    double lo = y;
    double hi = y;
    while (residual(lo) > 0.0) {
        lo *= 0.5;
        if (lo < 1e-300)
            return lo;
    }
    while (residual(hi) < 0.0)
        hi = 2.0 * hi + 1.0;

    const double lgamma_a = std::lgamma(a);
    y = std::clamp(y, lo, hi);
    for (int i = 0; i < 200; ++i) {
        const double f = residual(y);
        if (f == 0.0)
            return y;
        if (f < 0.0)
            lo = y;
        else
            hi = y;
        const double density = std::exp((a - 1.0) * std::log(y) - y - lgamma_a);
        double next = y - f / density;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
        if (std::abs(next - y) <= 1e-15 * y || (hi - lo) <= 1e-15 * hi)
            return next;
        y = next;
    }
    return y;
}

}  // namespace

double gamma_p(double a, double x)
{
    check_shape(a);
    if (std::isnan(x) || x < 0.0)
        throw std::domain_error("gamma_p: x must be non-negative");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    if (x < a + 1.0)
        return p_series(a, x);
    return 1.0 - q_continued_fraction(a, x);
}

double gamma_q(double a, double x)
{
    check_shape(a);
    if (std::isnan(x) || x < 0.0)
        throw std::domain_error("gamma_q: x must be non-negative");
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return 1.0 - p_series(a, x);
    return q_continued_fraction(a, x);
}

double gamma_cdf(double x, double k, double theta)
{
    if (!(theta > 0.0))
        throw std::domain_error("gamma_cdf: scale must be positive");
    if (x <= 0.0)
        return 0.0;
    return gamma_p(k, x / theta);
}

double gamma_sf(double x, double k, double theta)
{
    if (!(theta > 0.0))
        throw std::domain_error("gamma_sf: scale must be positive");
    if (x <= 0.0)
        return 1.0;
    return gamma_q(k, x / theta);
}

double gamma_inv_cdf(double u, double k, double theta)
{
    if (!(theta > 0.0))
        throw std::domain_error("gamma_inv_cdf: scale must be positive");
    return theta * invert_incomplete_gamma(k, u, true);
}

double gamma_inv_sf(double q, double k, double theta)
{
    if (!(theta > 0.0))
        throw std::domain_error("gamma_inv_sf: scale must be positive");
    return theta * invert_incomplete_gamma(k, q, false);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_inv_cdf(double u)
{
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("normal_inv_cdf: probability must lie in (0, 1)");

    // Acklam's rational approximation followed by one Halley refinement.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (u < p_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - p_low) {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - u;
    const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - step / (1.0 + 0.5 * x * step);
}

}  // namespace anytime
