#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <lapacke.h>

namespace oracle {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

std::vector<double> direct_convolution(int component, double L, int N, const std::vector<double>& rho,
                                       bool corrected) {
  const double h = 2.0 * L / N;
  std::vector<double> out(rho.size(), 0.0);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) {
        for (int l = 0; l < N; ++l) {
          if (k == i && l == j) continue;
          const double d1 = (i - k) * h, d2 = (j - l) * h;
          const double num = component == 1 ? d1 : d2;
          s += num / (2.0 * pi * (d1 * d1 + d2 * d2)) * rho[k * N + l];
        }
      }
      s *= h * h;
      if (corrected) {
        auto at = [&](int a, int b) { return a < 0 || b < 0 || a >= N || b >= N ? 0.0 : rho[a * N + b]; };
        const double diff = component == 1 ? at(i + 1, j) - at(i - 1, j) : at(i, j + 1) - at(i, j - 1);
        s -= h * h / (4.0 * pi) * diff / (2.0 * h);
      }
      out[i * N + j] = s;
    }
  }
  return out;
}

Gauge direct_gauge(double L, int N, const std::vector<double>& u, bool corrected) {
  const std::size_t n = u.size();
  std::vector<double> rho(n), u2(n);
  for (std::size_t k = 0; k < n; ++k) {
    u2[k] = u[k] * u[k];
    rho[k] = 0.5 * u2[k];
  }
  Gauge g;
  g.A1 = direct_convolution(2, L, N, rho, corrected);
  g.A2 = direct_convolution(1, L, N, rho, corrected);
  for (double& a : g.A2) a = -a;
  std::vector<double> s1(n), s2(n);
  for (std::size_t k = 0; k < n; ++k) {
    s1[k] = g.A2[k] * u2[k];
    s2[k] = g.A1[k] * u2[k];
  }
  const auto c1 = direct_convolution(1, L, N, s1, corrected);
  const auto c2 = direct_convolution(2, L, N, s2, corrected);
  g.A0.resize(n);
  for (std::size_t k = 0; k < n; ++k) g.A0[k] = c1[k] - c2[k];
  return g;
}

double gaussian_gauge_magnitude(double r) { return -std::expm1(-r * r) / (4.0 * r); }

RadialEnergies gaussian_energies(double omega, double p) {
  boost::math::quadrature::exp_sinh<double> q;
  auto u = [](double r) { return std::exp(-0.5 * r * r); };
  RadialEnergies e;
  e.quadratic = pi * q.integrate([&](double r) {
    const double du = -r * u(r);
    return (du * du + omega * u(r) * u(r)) * r;
  });
  e.potential = 2.0 * pi * q.integrate([&](double r) { return std::pow(u(r), p) / p * r; });
  e.gauge = pi * q.integrate([&](double r) {
    if (r == 0.0) return 0.0;
    const double a = gaussian_gauge_magnitude(r);
    return a * a * u(r) * u(r) * r;
  });
  return e;
}

double dense_lowest_eigenvalue(double L, int N, const std::function<double(double, double)>& V) {
  const double h = 2.0 * L / N;
  const int m = N - 1;
  const lapack_int n = static_cast<lapack_int>(m) * m;
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  auto idx = [m](int i, int j) { return static_cast<std::size_t>(i - 1) * m + (j - 1); };
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= m; ++j) {
      const std::size_t r = idx(i, j);
      a[r * n + r] = 4.0 / (h * h) + V(-L + i * h, -L + j * h);
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        if (q[0] < 1 || q[0] > m || q[1] < 1 || q[1] > m) continue;
        a[r * n + idx(q[0], q[1])] = -1.0 / (h * h);
      }
    }
  }
  lapack_int found = 0;
  std::vector<double> w(n), z(n);
  std::vector<lapack_int> support(2);
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, 1, 1, 0.0,
                                         &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != 1) throw std::runtime_error("dsyevr failed");
  return w[0];
}

}  // namespace oracle
