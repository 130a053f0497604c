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

#include "anytime/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anytime {

namespace {

void validate(std::span<const double> w)
{
    if (w.empty())
        throw std::invalid_argument("resample: no weights");
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument("resample: weights must be finite and non-negative");
        sum += x;
    }
    if (sum == 0.0)
        throw NumericalError("resample: all weights are zero");
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("resample: weights must sum to one");
}

// Maps ascending points in [0, 1) onto parents by a single sweep of the
// cumulative weights.
std::vector<std::size_t> sweep(std::span<const double> w, std::span<const double> points)
{
    std::vector<std::size_t> out;
    out.reserve(points.size());
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0)
            last_positive = i;
    std::size_t j = 0;
    double cumulative = w[0];
    for (double u : points) {
        while (u >= cumulative && j < last_positive) {
            ++j;
            cumulative += w[j];
        }
        out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> multinomial(std::span<const double> w, std::size_t count, Stream& rng)
{
    std::vector<double> u(count);
    for (auto& x : u)
        x = rng.uniform();
    std::sort(u.begin(), u.end());
    return sweep(w, u);
}

}  // namespace

ResampleScheme parse_resample_scheme(std::string_view name)
{
    if (name == "multinomial")
        return ResampleScheme::multinomial;
    if (name == "systematic")
        return ResampleScheme::systematic;
    if (name == "stratified")
        return ResampleScheme::stratified;
    if (name == "residual")
        return ResampleScheme::residual;
    throw std::invalid_argument("unknown resampling scheme: " + std::string(name));
}

std::string to_string(ResampleScheme scheme)
{
    switch (scheme) {
    case ResampleScheme::multinomial: return "multinomial";
    case ResampleScheme::systematic: return "systematic";
    case ResampleScheme::stratified: return "stratified";
    case ResampleScheme::residual: return "residual";
    }
    return "?";
}

std::vector<std::size_t> resample(std::span<const double> weights, std::size_t count,
                                  ResampleScheme scheme, Stream& rng)
{
    validate(weights);
    if (count == 0)
        return {};
    const double n = static_cast<double>(count);
    switch (scheme) {
    case ResampleScheme::multinomial:
        return multinomial(weights, count, rng);
    case ResampleScheme::systematic: {
        const double offset = rng.uniform();
        std::vector<double> u(count);
        for (std::size_t i = 0; i < count; ++i)
            u[i] = (static_cast<double>(i) + offset) / n;
        return sweep(weights, u);
    }
    case ResampleScheme::stratified: {
        std::vector<double> u(count);
        for (std::size_t i = 0; i < count; ++i)
            u[i] = (static_cast<double>(i) + rng.uniform()) / n;
        return sweep(weights, u);
    }
    case ResampleScheme::residual: {
        std::vector<std::size_t> out;
        out.reserve(count);
        std::vector<double> residual(weights.size());
        std::size_t assigned = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double expected = n * weights[i];
            const auto whole = static_cast<std::size_t>(std::floor(expected));
            residual[i] = expected - static_cast<double>(whole);
            for (std::size_t c = 0; c < whole && assigned < count; ++c, ++assigned)
                out.push_back(i);
        }
        const std::size_t rest = count - assigned;
        if (rest > 0) {
            double total = 0.0;
            for (double r : residual)
                total += r;
            for (auto& r : residual)
                r /= total;
            auto extra = multinomial(residual, rest, rng);
            out.insert(out.end(), extra.begin(), extra.end());
            std::sort(out.begin(), out.end());
        }
        return out;
    }
    }
    throw std::invalid_argument("resample: unknown scheme");
}

std::vector<std::size_t> offspring_counts(std::span<const std::size_t> ancestors, std::size_t parents)
{
    std::vector<std::size_t> counts(parents, 0);
    for (auto a : ancestors) {
        if (a >= parents)
            throw std::out_of_range("offspring_counts: ancestor index out of range");
        ++counts[a];
    }
    return counts;
}

double log_sum_exp(std::span<const double> x)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x)
        m = std::max(m, v);
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (double v : x)
        s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights)
{
    const double lse = log_sum_exp(log_weights);
    if (!std::isfinite(lse))
        throw NumericalError("all particle weights are zero (particle collapse)");
    std::vector<double> w(log_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::exp(log_weights[i] - lse);
    return w;
}

double effective_sample_size(std::span<const double> weights)
{
    double s = 0.0;
    for (double w : weights)
        s += w * w;
    return s > 0.0 ? 1.0 / s : 0.0;
}

}  // namespace anytime
