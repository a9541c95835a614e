#pragma once

namespace nanogrid {

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
/// Continued-fraction evaluation; absolute error below 1e-12 over typical ranges.
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` > 0 degrees of freedom (real-valued df allowed).
double student_t_two_sided_p(double t, double df);

}  // namespace nanogrid
