#pragma once

namespace kinship {

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double x, double a, double b);

/// Smallest x with I_x(a, b) >= p, by bisection to double resolution.
double beta_quantile(double p, double a, double b);

/// Standard normal quantile. Returns -inf / +inf at p = 0 / 1.
double normal_quantile(double p);

}  // namespace kinship
