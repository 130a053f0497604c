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

namespace anytime {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation.
double gamma_q(double a, double x);

/// CDF of Gamma(shape k, scale theta).
double gamma_cdf(double x, double k, double theta);
/// Survival function 1 - gamma_cdf, accurate in the upper tail.
double gamma_sf(double x, double k, double theta);
/// Quantile: x with gamma_cdf(x) = u, u in (0, 1).
double gamma_inv_cdf(double u, double k, double theta);
/// Upper quantile: x with gamma_sf(x) = q, q in (0, 1).
double gamma_inv_sf(double q, double k, double theta);

double normal_cdf(double z);
double normal_inv_cdf(double u);

}  // namespace anytime
