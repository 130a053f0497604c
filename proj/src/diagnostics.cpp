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

#include "anytime/diagnostics.hpp"

#include <algorithm>
#include <numbers>

#include "anytime/special.hpp"

namespace anytime {

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : values_(std::move(samples))
{
    if (values_.empty())
        throw std::invalid_argument("EmpiricalCdf: empty sample");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::domain_error("EmpiricalCdf: non-finite sample");
    std::sort(values_.begin(), values_.end());
}

double EmpiricalCdf::operator()(double x) const
{
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

ReferenceCdf ReferenceCdf::gamma(double shape, double scale)
{
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::domain_error("ReferenceCdf::gamma: shape and scale must be positive");
    return {Family::gamma, shape, scale};
}

ReferenceCdf ReferenceCdf::normal(double mean, double variance)
{
    if (!(variance > 0.0) || !std::isfinite(mean))
        throw std::domain_error("ReferenceCdf::normal: variance must be positive");
    return {Family::normal, mean, std::sqrt(variance)};
}

double ReferenceCdf::cdf(double x) const
{
    if (family_ == Family::gamma)
        return gamma_cdf(x, a_, b_);
    return normal_cdf((x - a_) / b_);
}

double ReferenceCdf::sf(double x) const
{
    if (family_ == Family::gamma)
        return gamma_sf(x, a_, b_);
    return normal_cdf((a_ - x) / b_);
}

double ReferenceCdf::quantile(double u) const
{
    if (family_ == Family::gamma)
        return u <= 0.5 ? gamma_inv_cdf(u, a_, b_) : gamma_inv_sf(1.0 - u, a_, b_);
    return a_ + b_ * normal_inv_cdf(u);
}

double ReferenceCdf::integrated_cdf(double x) const
{
    if (family_ == Family::gamma) {
        if (x <= 0.0)
            return 0.0;
        // x F_k(x) - k theta F_{k+1}(x), with F_{k+1} = F_k - y^k e^-y / Gamma(k+1)
        const double y = x / b_;
        const double p = gamma_p(a_, y);
        const double p_next = p - std::exp(a_ * std::log(y) - y - std::lgamma(a_ + 1.0));
        return x * p - a_ * b_ * p_next;
    }
    const double z = (x - a_) / b_;
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return (x - a_) * normal_cdf(z) + b_ * density;
}

double ReferenceCdf::mean() const { return family_ == Family::gamma ? a_ * b_ : a_; }

double wasserstein1(const EmpiricalCdf& sample, const ReferenceCdf& reference)
{
    const auto v = sample.sorted();
    const std::size_t n = v.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> f(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = reference.cdf(v[i]);
        g[i] = reference.integrated_cdf(v[i]);
    }

    double total = g[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = v[i];
        const double b = v[i + 1];
        if (b == a)
            continue;
        const double level = static_cast<double>(i + 1) * inv_n;
        double piece;
        if (level <= f[i]) {
            piece = (g[i + 1] - g[i]) - level * (b - a);
        } else if (level >= f[i + 1]) {
            piece = level * (b - a) - (g[i + 1] - g[i]);
        } else {
            const double q = std::clamp(reference.quantile(level), a, b);
            const double gq = reference.integrated_cdf(q);
            piece = level * (q - a) - (gq - g[i]) + (g[i + 1] - gq) - level * (b - q);
        }
        total += std::max(piece, 0.0);
    }
    total += std::max(reference.mean() - v[n - 1] + g[n - 1], 0.0);
    return total;
}

double wasserstein1(std::span<const double> samples, const ReferenceCdf& reference)
{
    return wasserstein1(EmpiricalCdf(std::vector<double>(samples.begin(), samples.end())),
                        reference);
}

}  // namespace anytime
