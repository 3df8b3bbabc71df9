#pragma once

// Reference computations that share no code with the library beyond the
// node layout: brute-force sums, closed-form radial profiles, and a dense
// LAPACK eigensolver.

#include <functional>
#include <vector>

namespace oracle {

// h^2 sum_y K_c(x - y) rho(y) over the N x N grid on [-L, L)^2, with
// K_c(x) = x_c / (2 pi |x|^2) and K_c(0) = 0; c is 1 or 2. With `corrected`
// the origin cell contributes -h^2/(4 pi) times the centered difference of
// rho along x_c (zero outside the grid).
std::vector<double> direct_convolution(int component, double L, int N, const std::vector<double>& rho,
                                       bool corrected);

struct Gauge {
  std::vector<double> A0, A1, A2;
};
// A1 = K2 * (u^2/2), A2 = -K1 * (u^2/2), A0 = K1 * (A2 u^2) - K2 * (A1 u^2),
// every convolution by direct_convolution.
Gauge direct_gauge(double L, int N, const std::vector<double>& u, bool corrected);

// |A|(r) for u = exp(-|x|^2 / 2): enclosed mass of u^2/2 over 2 pi r.
double gaussian_gauge_magnitude(double r);

struct RadialEnergies {
  double quadratic = 0.0;  // 1/2 int |grad u|^2 + omega u^2
  double gauge = 0.0;      // 1/2 int |A|^2 u^2
  double potential = 0.0;  // int |u|^p / p
};
// Terms of the energy of u = exp(-|x|^2 / 2) on the whole plane by adaptive
// 1-D quadrature in r.
RadialEnergies gaussian_energies(double omega, double p);

// Lowest eigenvalue of the dense 5-point Dirichlet matrix -Delta_h + V on the
// (N-1)^2 nodes with 1 <= i, j <= N-1 (node N is the wall at +L).
double dense_lowest_eigenvalue(double L, int N, const std::function<double(double, double)>& V);

}  // namespace oracle
