#include "css/krylov.hpp"

#include <cmath>
#include <limits>

#include "css/error.hpp"

namespace css {

// Paige-Saunders recurrences, following the layout of the reference MINRES.
MinresResult minres(const LinearMap& A, const Field& b, const LinearMap& M, double rtol, int max_iterations) {
  const Grid& grid = b.grid();
  MinresResult out{Field(grid), 0, 0.0, false};

  Field r1 = b;
  Field y = M(r1);
  double beta1 = inner(r1, y);
  if (beta1 < 0.0) fail(ErrorKind::numeric, "minres: preconditioner is not positive definite");
  if (beta1 == 0.0) {
    out.converged = true;
    return out;
  }
  beta1 = std::sqrt(beta1);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Field w(grid), w2(grid), r2 = r1;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int itn = 1; itn <= max_iterations; ++itn) {
    Field v = y * (1.0 / beta);
    y = A(v);
    if (itn >= 2) y.axpy(-beta / oldb, r1);
    const double alfa = inner(v, y);
    y.axpy(-alfa / beta, r2);
    r1 = std::move(r2);
    r2 = y;
    y = M(r2);
    oldb = beta;
    beta = inner(r2, y);
    if (beta < 0.0) fail(ErrorKind::numeric, "minres: preconditioner is not positive definite");
    beta = std::sqrt(beta);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    Field w1 = std::move(w2);
    w2 = std::move(w);
    w = v;
    w.axpy(-oldeps, w1).axpy(-delta, w2) *= 1.0 / gamma;
    out.x.axpy(phi, w);

    out.iterations = itn;
    out.relative_residual = phibar / beta1;
    if (out.relative_residual <= rtol || beta == 0.0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace css
