/*
 * Copyright 2026 The maml-lqr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Closed-form scalar LQR reference, written against the textbook formulas and
// sharing no code with the library.

#include <cmath>
#include <limits>

namespace maml_lqr::testing {

struct ScalarTask {
  double a, b, q, r, s0;
};

inline bool scalar_stable(const ScalarTask& t, double w) { return std::abs(t.a - t.b * w) < 1.0; }

// C(w) = (q + r w^2) s0 / (1 - (a - b w)^2)
inline double scalar_cost(const ScalarTask& t, double w) {
  if (!scalar_stable(t, w)) return std::numeric_limits<double>::infinity();
  const double m = t.a - t.b * w;
  return (t.q + t.r * w * w) * t.s0 / (1.0 - m * m);
}

inline double scalar_dcost(const ScalarTask& t, double w) {
  const double m = t.a - t.b * w;
  const double n = (t.q + t.r * w * w) * t.s0, dn = 2.0 * t.r * w * t.s0;
  const double d = 1.0 - m * m, dd = 2.0 * t.b * m;
  return (dn * d - n * dd) / (d * d);
}

inline double scalar_d2cost(const ScalarTask& t, double w) {
  const double m = t.a - t.b * w;
  const double n = (t.q + t.r * w * w) * t.s0, dn = 2.0 * t.r * w * t.s0,
               d2n = 2.0 * t.r * t.s0;
  const double d = 1.0 - m * m, dd = 2.0 * t.b * m, d2d = -2.0 * t.b * t.b;
  return (d2n * d - n * d2d) / (d * d) - 2.0 * dd * (dn * d - n * dd) / (d * d * d);
}

// Stabilizing root of the scalar Riccati equation and the optimal gain.
inline double scalar_riccati_p(const ScalarTask& t) {
  // p = q + a^2 p r / (b^2 p + r)  <=>  b^2 p^2 + (r - a^2 r - q b^2) p - q r = 0
  const double A = t.b * t.b, B = t.r - t.a * t.a * t.r - t.q * t.b * t.b, C = -t.q * t.r;
  return (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
}

inline double scalar_wstar(const ScalarTask& t) {
  const double p = scalar_riccati_p(t);
  return t.b * p * t.a / (t.b * t.b * p + t.r);
}

inline double scalar_maml_value(const ScalarTask& t, double w, double eta) {
  return scalar_cost(t, w - eta * scalar_dcost(t, w));
}

inline double scalar_maml_grad(const ScalarTask& t, double w, double eta) {
  return (1.0 - eta * scalar_d2cost(t, w)) * scalar_dcost(t, w - eta * scalar_dcost(t, w));
}

inline double scalar_normalized_value(const ScalarTask& t, double w, double eta) {
  const double g = scalar_dcost(t, w);
  return scalar_cost(t, w - eta * (g > 0 ? 1.0 : -1.0));
}

}  // namespace maml_lqr::testing
