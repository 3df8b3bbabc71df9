#pragma once

#include <functional>

#include "css/grid.hpp"

namespace css {

using LinearMap = std::function<Field(const Field&)>;

struct MinresResult {
  Field x;
  int iterations = 0;
  double relative_residual = 0.0;  // in the preconditioner norm
  bool converged = false;
};

/// Preconditioned MINRES for symmetric (possibly indefinite) A with a
/// symmetric positive definite preconditioner M ~ A^{-1}; starts from x = 0.
MinresResult minres(const LinearMap& A, const Field& b, const LinearMap& M, double rtol, int max_iterations);

}  // namespace css
