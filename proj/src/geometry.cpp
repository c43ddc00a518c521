#include "satoff/geometry.hpp"

#include <cmath>

namespace satoff {

// Rational Chebyshev fit (Numerical Recipes erfcc), |abs error| < 1.2e-7 over
// the real line. The polynomial does not vanish exactly at 0, so that point is
// pinned to the exact value erfc(0) = 1.
double erfc_approx(double x) {
  if (x == 0.0) return 1.0;
  const double z = std::fabs(x);
  const double t = 1.0 / (1.0 + 0.5 * z);
  const double ans =
      t * std::exp(-z * z - 1.26551223 +
                   t * (1.00002368 +
                        t * (0.37409196 +
                             t * (0.09678418 +
                                  t * (-0.18628806 +
                                       t * (0.27886807 +
                                            t * (-1.13520398 +
                                                 t * (1.48851587 +
                                                      t * (-0.82215223 +
                                                           t * 0.17087277)))))))));
  return x >= 0.0 ? ans : 2.0 - ans;
}

}  // namespace satoff
