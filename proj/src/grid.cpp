#include "css/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "css/error.hpp"
#include "fftw_support.hpp"

namespace css {

namespace detail {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

Grid::Grid(double half_width, int points_per_side)
    : half_width_(half_width), n_(points_per_side), h_(2.0 * half_width / points_per_side) {
  if (!(std::isfinite(half_width) && half_width > 0.0))
    fail(ErrorKind::usage, "grid half_width must be positive and finite");
  if (points_per_side < 16 || points_per_side % 2 != 0)
    fail(ErrorKind::usage, "grid points_per_side must be even and >= 16, got " +
                               std::to_string(points_per_side));
  if (h_ * points_per_side != 2.0 * half_width)
    fail(ErrorKind::usage, "grid spacing 2L/N is not exact in double precision");
}

// ---------------------------------------------------------------------------
// Field

Field::Field(const Grid& grid) : grid_(grid), values_(grid.node_count(), 0.0) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count())
    fail(ErrorKind::usage, "field has " + std::to_string(values_.size()) + " values, grid needs " +
                               std::to_string(grid_.node_count()));
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other, "field addition");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other, "field subtraction");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(*this, x, "axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

bool Field::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator-(Field a) { return a *= -1.0; }
Field operator*(double s, Field a) { return a *= s; }
Field operator*(Field a, double s) { return a *= s; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a, b, "pointwise product");
  Field out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

void require_same_grid(const Field& a, const Field& b, const char* operation) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::usage, std::string(operation) + ": grid mismatch");
}

void require_finite(const Field& f, const char* operation) {
  if (!f.is_finite()) fail(ErrorKind::numeric, std::string(operation) + ": non-finite value");
}

double integrate(const Field& f) {
  require_finite(f, "integrate");
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().weight() * s;
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner product");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  if (!std::isfinite(s)) fail(ErrorKind::numeric, "inner product: non-finite value");
  return a.grid().weight() * s;
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

Field interior_part(Field f) {
  const int n = f.grid().points_per_side();
  for (int k = 0; k < n; ++k) {
    f.at(0, k) = 0.0;
    f.at(k, 0) = 0.0;
  }
  return f;
}

std::pair<Field, Field> gradient(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.points_per_side();
  const double inv2h = 1.0 / (2.0 * g.spacing());
  Field d1(g), d2(g);
  // d/ds of the sequence s -> v(s) at position k, stride-independent.
  auto diff = [&](auto&& v, int k) {
    if (k == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv2h;
    if (k == n - 1) return (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) * inv2h;
    return (v(k + 1) - v(k - 1)) * inv2h;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d1.at(i, j) = diff([&](int s) { return f.at(s, j); }, i);
      d2.at(i, j) = diff([&](int s) { return f.at(i, s); }, j);
    }
  }
  return {std::move(d1), std::move(d2)};
}

double spectral_integrate_sq(const Field& f) {
  require_finite(f, "spectral_integrate_sq");
  const int n = f.grid().points_per_side();
  const int nc = n / 2 + 1;
  detail::FftwBuffer<double> in(f.size());
  detail::FftwBuffer<fftw_complex> out(static_cast<std::size_t>(n) * nc);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_2d(n, n, in.data(), out.data(), FFTW_ESTIMATE);
  }
  std::copy(f.values().begin(), f.values().end(), in.data());
  fftw_execute(plan);
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < nc; ++b) {
      const fftw_complex& c = out[static_cast<std::size_t>(a) * nc + b];
      const double w = (b == 0 || b == n / 2) ? 1.0 : 2.0;
      s += w * (c[0] * c[0] + c[1] * c[1]);
    }
  }
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return f.grid().weight() * s / (static_cast<double>(n) * n);
}

namespace {

// Four-point Lagrange weights for nodes start..start+3 at fractional index t.
void lagrange4(double t, int start, double w[4]) {
  for (int a = 0; a < 4; ++a) {
    double p = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) p *= (t - (start + b)) / static_cast<double>(a - b);
    w[a] = p;
  }
}

}  // namespace

double interpolate(const Field& f, double x1, double x2) {
  const Grid& g = f.grid();
  const int n = g.points_per_side();
  const double L = g.half_width();
  if (!(x1 >= -L && x1 <= L && x2 >= -L && x2 <= L))
    fail(ErrorKind::usage, "interpolate: point outside the box");
  const double t1 = (x1 + L) / g.spacing();
  const double t2 = (x2 + L) / g.spacing();
  const int s1 = std::clamp(static_cast<int>(std::floor(t1)) - 1, 0, n - 4);
  const int s2 = std::clamp(static_cast<int>(std::floor(t2)) - 1, 0, n - 4);
  double w1[4], w2[4];
  lagrange4(t1, s1, w1);
  lagrange4(t2, s2, w2);
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v += w1[a] * w2[b] * f.at(s1 + a, s2 + b);
  return v;
}

// ---------------------------------------------------------------------------
// Free-space convolution

struct FreeSpaceConvolver::Plans {
  int m = 0;   // padded side 2N
  int mc = 0;  // complex columns m/2 + 1
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

FreeSpaceConvolver::FreeSpaceConvolver(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  plans_->m = 2 * grid.points_per_side();
  plans_->mc = plans_->m / 2 + 1;
  const std::size_t real_n = static_cast<std::size_t>(plans_->m) * plans_->m;
  const std::size_t cplx_n = static_cast<std::size_t>(plans_->m) * plans_->mc;
  detail::FftwBuffer<double> r(real_n);
  detail::FftwBuffer<fftw_complex> c(cplx_n);
  std::lock_guard lock(detail::fftw_planner_mutex());
  plans_->forward = fftw_plan_dft_r2c_2d(plans_->m, plans_->m, r.data(), c.data(), FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_c2r_2d(plans_->m, plans_->m, c.data(), r.data(), FFTW_ESTIMATE);
}

FreeSpaceConvolver::~FreeSpaceConvolver() {
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->backward);
}

Spectrum FreeSpaceConvolver::transform_padded(std::span<const double> padded) const {
  const std::size_t real_n = static_cast<std::size_t>(plans_->m) * plans_->m;
  const std::size_t cplx_n = static_cast<std::size_t>(plans_->m) * plans_->mc;
  if (padded.size() != real_n) fail(ErrorKind::usage, "padded array has the wrong size");
  detail::FftwBuffer<double> r(real_n);
  detail::FftwBuffer<fftw_complex> c(cplx_n);
  std::copy(padded.begin(), padded.end(), r.data());
  fftw_execute_dft_r2c(plans_->forward, r.data(), c.data());
  Spectrum out(cplx_n);
  for (std::size_t k = 0; k < cplx_n; ++k) out[k] = {c[k][0], c[k][1]};
  return out;
}

Spectrum FreeSpaceConvolver::transform(const Field& rho) const {
  if (!(rho.grid() == grid_)) fail(ErrorKind::usage, "convolution: grid mismatch");
  require_finite(rho, "convolution");
  const int n = grid_.points_per_side();
  const int m = plans_->m;
  std::vector<double> padded(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < n; ++i)
    std::copy_n(rho.values().begin() + static_cast<std::ptrdiff_t>(grid_.index(i, 0)), n,
                padded.begin() + static_cast<std::ptrdiff_t>(i) * m);
  return transform_padded(padded);
}

Field FreeSpaceConvolver::inverse_cropped(const Spectrum& spectrum) const {
  const int n = grid_.points_per_side();
  const int m = plans_->m;
  const std::size_t cplx_n = static_cast<std::size_t>(m) * plans_->mc;
  if (spectrum.size() != cplx_n) fail(ErrorKind::usage, "spectrum has the wrong size");
  detail::FftwBuffer<double> r(static_cast<std::size_t>(m) * m);
  detail::FftwBuffer<fftw_complex> c(cplx_n);
  for (std::size_t k = 0; k < cplx_n; ++k) {
    c[k][0] = spectrum[k].real();
    c[k][1] = spectrum[k].imag();
  }
  fftw_execute_dft_c2r(plans_->backward, c.data(), r.data());
  const double scale = grid_.weight() / (static_cast<double>(m) * m);
  Field out(grid_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = scale * r[static_cast<std::size_t>(i) * m + j];
  return out;
}

double kernel_value(KernelKind kind, double x1, double x2) noexcept {
  const double r2 = x1 * x1 + x2 * x2;
  if (r2 == 0.0) return 0.0;
  const double num = kind == KernelKind::k1 ? x1 : x2;
  return num / (2.0 * std::numbers::pi * r2);
}

double Kernel::sample(int d1, int d2) const {
  const int n = grid().points_per_side();
  const int m = 2 * n;
  if (d1 < -n || d1 >= n || d2 < -n || d2 >= n) fail(ErrorKind::usage, "kernel offset out of range");
  const int a = (d1 + m) % m;
  const int b = (d2 + m) % m;
  return samples_[static_cast<std::size_t>(a) * m + b];
}

Kernel sample_kernel(KernelKind kind, const Grid& grid, KernelQuadrature quadrature,
                     std::shared_ptr<const FreeSpaceConvolver> convolver) {
  if (!convolver) convolver = std::make_shared<const FreeSpaceConvolver>(grid);
  if (!(convolver->grid() == grid)) fail(ErrorKind::usage, "sample_kernel: convolver grid mismatch");
  const int n = grid.points_per_side();
  const int m = 2 * n;
  const double h = grid.spacing();
  Kernel k;
  k.kind_ = kind;
  k.quadrature_ = quadrature;
  k.convolver_ = std::move(convolver);
  k.samples_.assign(static_cast<std::size_t>(m) * m, 0.0);
  // Row a holds offset d1 = a for a < N and a - 2N otherwise (wrap-around order).
  for (int a = 0; a < m; ++a) {
    const int d1 = a < n ? a : a - m;
    for (int b = 0; b < m; ++b) {
      const int d2 = b < n ? b : b - m;
      k.samples_[static_cast<std::size_t>(a) * m + b] = kernel_value(kind, d1 * h, d2 * h);
    }
  }
  if (quadrature == KernelQuadrature::corrected) {
    const double c = 1.0 / (8.0 * std::numbers::pi * h);
    if (kind == KernelKind::k1) {
      k.samples_[static_cast<std::size_t>(1) * m] += c;
      k.samples_[static_cast<std::size_t>(m - 1) * m] -= c;
    } else {
      k.samples_[1] += c;
      k.samples_[static_cast<std::size_t>(m - 1)] -= c;
    }
  }
  k.image_ = k.convolver_->transform_padded(k.samples_);
  return k;
}

Field convolve(const Kernel& kernel, const Field& rho) {
  if (!(rho.grid() == kernel.grid())) fail(ErrorKind::usage, "convolve: grid mismatch");
  Spectrum s = kernel.convolver().transform(rho);
  const Spectrum& img = kernel.image();
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= img[k];
  return kernel.convolver().inverse_cropped(s);
}

}  // namespace css
