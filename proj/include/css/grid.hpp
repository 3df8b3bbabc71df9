#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace css {

/// Uniform square mesh on [-L, L)^2 with N nodes per side.
///
/// Node (i, j) sits at (-L + i h, -L + j h) with h = 2L / N. Fields are stored
/// row-major with i (the x1 index) as the slow index. The node lines i = 0 and
/// j = 0 lie on the walls x1 = -L and x2 = -L; together with the implicit
/// walls at +L they carry the homogeneous Dirichlet condition of the
/// Schrodinger operator, which keeps the discrete problem symmetric under
/// x -> -x about the origin node (N/2, N/2).
class Grid {
 public:
  Grid(double half_width, int points_per_side);

  double half_width() const noexcept { return half_width_; }
  int points_per_side() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double weight() const noexcept { return h_ * h_; }
  std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  double coordinate(int i) const noexcept { return -half_width_ + i * h_; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
  }
  int origin() const noexcept { return n_ / 2; }
  bool on_wall(int i, int j) const noexcept { return i == 0 || j == 0; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double half_width_;
  int n_;
  double h_;
};

/// Real scalar function sampled at the nodes of a grid.
class Field {
 public:
  explicit Field(const Grid& grid);
  Field(const Grid& grid, std::vector<double> values);

  template <class Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    Field f(grid);
    const int n = grid.points_per_side();
    for (int i = 0; i < n; ++i) {
      const double x1 = grid.coordinate(i);
      for (int j = 0; j < n; ++j) f.values_[grid.index(i, j)] = fn(x1, grid.coordinate(j));
    }
    return f;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j) { return values_[grid_.index(i, j)]; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  // this += a * x
  Field& axpy(double a, const Field& x);

  bool is_finite() const noexcept;
  double max_abs() const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator-(Field a);
Field operator*(double s, Field a);
Field operator*(Field a, double s);
Field hadamard(const Field& a, const Field& b);

// usage-error unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b, const char* operation);
// numeric-error if any value is NaN or infinite.
void require_finite(const Field& f, const char* operation);

/// Quadrature w * sum f(x_ij) with w = h^2.
double integrate(const Field& f);
double inner(const Field& a, const Field& b);
double l2_norm(const Field& f);

/// Copy of f with the wall lines i = 0 and j = 0 set to zero.
Field interior_part(Field f);

/// (d1 f, d2 f): centered differences inside, second-order one-sided at the
/// box edges.
std::pair<Field, Field> gradient(const Field& f);

/// integrate(f^2) evaluated in Fourier space through Parseval's identity.
double spectral_integrate_sq(const Field& f);

/// Bicubic Lagrange interpolation of f at an arbitrary point in the box.
double interpolate(const Field& f, double x1, double x2);

using Spectrum = std::vector<std::complex<double>>;

/// Zero-padded FFT machinery for free-space (aperiodic) convolution on the
/// doubled grid [-2L, 2L)^2. Plans are created once and are safe to execute
/// concurrently.
class FreeSpaceConvolver {
 public:
  explicit FreeSpaceConvolver(const Grid& grid);
  ~FreeSpaceConvolver();
  FreeSpaceConvolver(const FreeSpaceConvolver&) = delete;
  FreeSpaceConvolver& operator=(const FreeSpaceConvolver&) = delete;

  const Grid& grid() const noexcept { return grid_; }
  int padded_side() const noexcept { return 2 * grid_.points_per_side(); }

  // Forward transform of a full padded (2N)^2 array.
  Spectrum transform_padded(std::span<const double> padded) const;
  // Forward transform of rho embedded in the lower-left quadrant.
  Spectrum transform(const Field& rho) const;
  // Inverse transform cropped back to the base grid and scaled so that
  // multiplying a kernel image by transform(rho) yields h^2 * sum K rho.
  Field inverse_cropped(const Spectrum& spectrum) const;

 private:
  struct Plans;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
};

enum class KernelKind { k1, k2 };

/// How the integrable singularity of x_j / (2 pi |x|^2) at the origin is
/// discretized.
///   punctured: plain samples with K_j(0) = 0.
///   corrected: punctured samples plus the antisymmetric nearest-neighbour
///              weights that restore the missing origin-cell contribution
///              -h^2/(4 pi) d_j rho; the result converges at O(h^4) for smooth
///              densities instead of O(h^2).
enum class KernelQuadrature { punctured, corrected };

/// Continuum kernel x_j / (2 pi |x|^2), taken as 0 at the origin.
double kernel_value(KernelKind kind, double x1, double x2) noexcept;

/// Odd kernel sampled on the doubled grid together with its spectral image.
class Kernel {
 public:
  KernelKind kind() const noexcept { return kind_; }
  KernelQuadrature quadrature() const noexcept { return quadrature_; }
  const Grid& grid() const noexcept { return convolver_->grid(); }
  // Sample at node offset (d1, d2), each in [-N, N).
  double sample(int d1, int d2) const;
  const Spectrum& image() const noexcept { return image_; }
  const FreeSpaceConvolver& convolver() const noexcept { return *convolver_; }
  std::shared_ptr<const FreeSpaceConvolver> shared_convolver() const noexcept { return convolver_; }

 private:
  friend Kernel sample_kernel(KernelKind, const Grid&, KernelQuadrature,
                              std::shared_ptr<const FreeSpaceConvolver>);
  Kernel() = default;

  KernelKind kind_ = KernelKind::k1;
  KernelQuadrature quadrature_ = KernelQuadrature::punctured;
  std::shared_ptr<const FreeSpaceConvolver> convolver_;
  std::vector<double> samples_;
  Spectrum image_;
};

Kernel sample_kernel(KernelKind kind, const Grid& grid,
                     KernelQuadrature quadrature = KernelQuadrature::punctured,
                     std::shared_ptr<const FreeSpaceConvolver> convolver = nullptr);

/// h^2 * sum_y K(x - y) rho(y) over the base grid, evaluated through the
/// padded FFT (no wrap-around).
Field convolve(const Kernel& kernel, const Field& rho);

}  // namespace css
