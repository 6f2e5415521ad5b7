#pragma once

#include <cmath>

#include "psr/error.hpp"
#include "psr/volume.hpp"

namespace psr {

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients for a Hermitian positive definite operator, starting
/// from x = 0. Stops when ||b - A x|| <= tol ||b||; throws NumericalError with
/// the last residual if `max_iterations` is reached first.
template <class Apply>
CgReport conjugate_gradient(const Apply& apply, const ComplexVolume& b, ComplexVolume& x,
                            double tol, int max_iterations) {
  x = b.zeros_like();
  const double b2 = norm2(b);
  if (b2 == 0.0) return {};
  ComplexVolume r = b;
  ComplexVolume p = b;
  double r2 = b2;
  for (int it = 1; it <= max_iterations; ++it) {
    const ComplexVolume q = apply(p);
    const double pq = real_dot(p, q);
    if (!(pq > 0.0)) throw NumericalError("conjugate_gradient: operator not positive definite",
                                          std::sqrt(r2 / b2));
    const double alpha = r2 / pq;
    axpy(x, alpha, p);
    axpy(r, -alpha, q);
    const double r2_new = norm2(r);
    if (std::sqrt(r2_new / b2) <= tol) return {it, std::sqrt(r2_new / b2)};
    const double beta = r2_new / r2;
    scale(p, beta);
    axpy(p, 1.0, r);
    r2 = r2_new;
  }
  throw NumericalError("conjugate_gradient: no convergence", std::sqrt(r2 / b2));
}

}  // namespace psr
