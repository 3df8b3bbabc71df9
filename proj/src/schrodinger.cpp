#include "css/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "css/error.hpp"
#include "fftw_support.hpp"

namespace css {

const char* to_string(PotentialKind kind) noexcept {
  switch (kind) {
    case PotentialKind::constant: return "constant";
    case PotentialKind::gaussian_well: return "gaussian_well";
    case PotentialKind::custom_table: return "custom_table";
  }
  return "unknown";
}

Field PotentialSpec::realize(const Grid& grid) const {
  Field V(grid);
  switch (kind) {
    case PotentialKind::constant:
      V = Field::sample(grid, [&](double, double) { return omega; });
      break;
    case PotentialKind::gaussian_well:
      if (!(sigma > 0.0)) fail(ErrorKind::usage, "gaussian_well needs sigma > 0");
      V = Field::sample(grid, [&](double x1, double x2) {
        return omega - c * std::exp(-(x1 * x1 + x2 * x2) / (sigma * sigma));
      });
      break;
    case PotentialKind::custom_table:
      if (table.size() != grid.node_count())
        fail(ErrorKind::usage, "potential table has " + std::to_string(table.size()) +
                                   " values, grid needs " + std::to_string(grid.node_count()));
      V = Field(grid, table);
      break;
  }
  if (!V.is_finite()) fail(ErrorKind::usage, "potential must be bounded (finite everywhere)");
  return V;
}

// ---------------------------------------------------------------------------

SchrodingerOperator::SchrodingerOperator(const Grid& grid, Field potential)
    : grid_(grid), V_(std::move(potential)) {
  if (!(V_.grid() == grid_)) fail(ErrorKind::usage, "potential lives on a different grid");
  require_finite(V_, "potential");
}

SchrodingerOperator assemble(const PotentialSpec& spec, const Grid& grid) {
  return SchrodingerOperator(grid, spec.realize(grid));
}

Field SchrodingerOperator::apply(const Field& u) const {
  if (!(u.grid() == grid_)) fail(ErrorKind::usage, "operator apply: grid mismatch");
  const int n = grid_.points_per_side();
  const double ih2 = 1.0 / grid_.weight();
  auto val = [&](int i, int j) { return (i <= 0 || j <= 0 || i >= n || j >= n) ? 0.0 : u.at(i, j); };
  Field out(grid_);
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      const double c = u.at(i, j);
      out.at(i, j) = (4.0 * c - val(i - 1, j) - val(i + 1, j) - val(i, j - 1) - val(i, j + 1)) * ih2 +
                     V_.at(i, j) * c;
    }
  return out;
}

double SchrodingerOperator::form(const Field& u, const Field& v) const {
  return inner(apply(u), interior_part(v));
}

double SchrodingerOperator::quadratic_energy(const Field& u) const {
  if (!(u.grid() == grid_)) fail(ErrorKind::usage, "quadratic energy: grid mismatch");
  const int n = grid_.points_per_side();
  auto val = [&](int i, int j) { return (i <= 0 || j <= 0 || i >= n || j >= n) ? 0.0 : u.at(i, j); };
  double edges = 0.0, pot = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double c = val(i, j);
      const double a = val(i + 1, j) - c;
      const double b = val(i, j + 1) - c;
      edges += a * a + b * b;
      pot += V_.at(i, j) * c * c;
    }
  return 0.5 * (edges + grid_.weight() * pot);
}

Eigen::SparseMatrix<double> SchrodingerOperator::interior_matrix() const {
  const int m = interior_side();
  const double ih2 = 1.0 / grid_.weight();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(m) * m * 5);
  auto id = [m](int a, int b) { return a * m + b; };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const int k = id(a, b);
      t.emplace_back(k, k, 4.0 * ih2 + V_.at(a + 1, b + 1));
      if (a > 0) t.emplace_back(k, id(a - 1, b), -ih2);
      if (a + 1 < m) t.emplace_back(k, id(a + 1, b), -ih2);
      if (b > 0) t.emplace_back(k, id(a, b - 1), -ih2);
      if (b + 1 < m) t.emplace_back(k, id(a, b + 1), -ih2);
    }
  Eigen::SparseMatrix<double> H(m * m, m * m);
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

Eigen::VectorXd SchrodingerOperator::gather(const Field& u) const {
  const int m = interior_side();
  Eigen::VectorXd x(m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) x[a * m + b] = u.at(a + 1, b + 1);
  return x;
}

Field SchrodingerOperator::scatter(const Eigen::VectorXd& x) const {
  const int m = interior_side();
  Field u(grid_);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) u.at(a + 1, b + 1) = x[a * m + b];
  return u;
}

// ---------------------------------------------------------------------------

SpectralSplit::SpectralSplit(std::shared_ptr<const SchrodingerOperator> op, std::vector<double> computed,
                             std::vector<Field> negative_fields)
    : op_(std::move(op)), computed_(std::move(computed)), fields_(std::move(negative_fields)) {
  gap_ = computed_.empty() ? 0.0 : std::abs(computed_.front());
  for (double l : computed_) gap_ = std::min(gap_, std::abs(l));
}

std::vector<double> SpectralSplit::negative_eigenvalues() const {
  return {computed_.begin(), computed_.begin() + ell()};
}

namespace {

// Orthonormalize the columns of B against Q (two passes) and among themselves.
Eigen::MatrixXd orthonormal_block(const Eigen::MatrixXd& Q, Eigen::MatrixXd B) {
  for (int pass = 0; pass < 2; ++pass)
    if (Q.cols() > 0) B -= Q * (Q.transpose() * B);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  return qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols());
}

}  // namespace

SpectralSplit split(std::shared_ptr<const SchrodingerOperator> op, const SplitOptions& opt) {
  if (!op) fail(ErrorKind::usage, "split: null operator");
  if (opt.k_max < 1) fail(ErrorKind::usage, "split: k_max must be >= 1");
  const Grid& grid = op->grid();
  const Eigen::SparseMatrix<double> H = op->interior_matrix();
  const int n = static_cast<int>(H.rows());
  const int want = std::min(opt.k_max, n);
  const int block = std::min(want + 2, n);
  const int depth = 4;

  // H >= min V, so this shift keeps H - sigma positive definite.
  const double sigma = *std::min_element(op->potential().values().begin(), op->potential().values().end()) - 1.0;
  Eigen::SparseMatrix<double> S = H;
  for (int k = 0; k < n; ++k) S.coeffRef(k, k) -= sigma;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::numeric, "split: factorization failed");

  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, block);
  for (int c = 0; c < block; ++c)
    for (int r = 0; r < n; ++r) X(r, c) = normal(rng);
  X = orthonormal_block(Eigen::MatrixXd(n, 0), X);

  Eigen::VectorXd theta;
  Eigen::MatrixXd ritz;
  bool converged = false;
  for (int it = 0; it < opt.max_restarts && !converged; ++it) {
    const int max_cols = std::min(n, block * (depth + 1));
    Eigen::MatrixXd Q(n, 0);
    Eigen::MatrixXd V = X;
    while (true) {
      Eigen::MatrixXd Vn = orthonormal_block(Q, V);
      const int take = std::min<int>(static_cast<int>(Vn.cols()), max_cols - static_cast<int>(Q.cols()));
      Eigen::MatrixXd Qn(n, Q.cols() + take);
      Qn << Q, Vn.leftCols(take);
      Q = std::move(Qn);
      if (Q.cols() >= max_cols) break;
      V = ldlt.solve(Q.rightCols(take));
    }
    const Eigen::MatrixXd HQ = H * Q;
    Eigen::MatrixXd G = Q.transpose() * HQ;
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    theta = es.eigenvalues().head(block);
    const Eigen::MatrixXd Y = es.eigenvectors().leftCols(block);
    ritz = Q * Y;
    const Eigen::MatrixXd R = HQ * Y - ritz * theta.asDiagonal();
    // Only the negative pairs and the first non-negative one (which sets the
    // gap) must converge; the box modes above it cluster and are reported as
    // Ritz upper bounds.
    converged = true;
    for (int c = 0; c < want; ++c) {
      const double scale = std::max(1.0, std::abs(theta[c]));
      const double tol = theta[c] < 0.0 ? opt.tolerance : std::max(opt.tolerance, 1e-8);
      if (R.col(c).norm() > tol * scale) converged = false;
      if (theta[c] >= 0.0) break;
    }
    X = ritz;
  }
  if (!converged) fail(ErrorKind::convergence, "split: eigensolver did not converge");

  std::vector<double> computed(theta.data(), theta.data() + want);
  if (computed.back() < 0.0)
    fail(ErrorKind::capacity, "all " + std::to_string(want) +
                                  " computed eigenvalues are negative; raise spectrum.k_max");
  std::vector<Field> fields;
  const double h = grid.spacing();
  for (int c = 0; c < want && computed[static_cast<std::size_t>(c)] < 0.0; ++c) {
    Eigen::VectorXd x = ritz.col(c);
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0.0) x = -x;
    fields.push_back(op->scatter(x / (h * x.norm())));
  }
  SpectralSplit result(std::move(op), std::move(computed), std::move(fields));
  if (result.gap() <= opt.degeneracy_threshold)
    fail(ErrorKind::degeneracy, "eigenvalue within " + std::to_string(result.gap()) +
                                    " of zero; quadratic form is numerically degenerate");
  return result;
}

Projection project(const SpectralSplit& s, const Field& u) {
  Field minus(u.grid());
  for (const Field& phi : s.eigenfields()) minus.axpy(inner(u, phi), phi);
  Field plus = u - minus;
  return {std::move(minus), std::move(plus)};
}

SplitNorms equivalent_norm_sq(const SpectralSplit& s, const Field& u_minus, const Field& u_plus) {
  SplitNorms out;
  const auto& phis = s.eigenfields();
  const auto& lam = s.computed_eigenvalues();
  for (std::size_t k = 0; k < phis.size(); ++k) {
    const double c = inner(u_minus, phis[k]);
    out.minus_sq += std::abs(lam[k]) * c * c;
  }
  out.plus_sq = s.op().form(u_plus, u_plus);
  // Projection round-off leaves a sliver of X- in u+; measure against the
  // whole field so that a vanishing u+ is not mistaken for a negative form.
  const double scale = std::max(1.0, s.op().potential().max_abs() + 8.0 / u_plus.grid().weight()) *
                       std::max(inner(u_plus, u_plus) + inner(u_minus, u_minus), 1e-300);
  if (out.plus_sq < -1e-10 * scale)
    fail(ErrorKind::degeneracy, "negative form on the positive subspace");
  out.plus_sq = std::max(out.plus_sq, 0.0);
  return out;
}

double equivalent_norm_sq(const SpectralSplit& s, const Field& u) {
  const Projection p = project(s, u);
  const SplitNorms n = equivalent_norm_sq(s, p.minus, p.plus);
  return n.minus_sq + n.plus_sq;
}

// ---------------------------------------------------------------------------

struct DirichletPreconditioner::Plan {
  fftw_plan plan = nullptr;
};

DirichletPreconditioner::DirichletPreconditioner(const Grid& grid, double shift)
    : grid_(grid), plan_(std::make_unique<Plan>()) {
  if (!(shift > 0.0)) fail(ErrorKind::usage, "preconditioner shift must be positive");
  const int n = grid.points_per_side();
  const int m = n - 1;
  const double ih2 = 1.0 / grid.weight();
  std::vector<double> lam(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) lam[static_cast<std::size_t>(k - 1)] = (2.0 - 2.0 * std::cos(std::numbers::pi * k / n)) * ih2;
  // RODFT00 applied twice scales by 2(m+1) = 2N per dimension.
  const double norm = 1.0 / (4.0 * n * n);
  inv_symbol_.resize(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      inv_symbol_[static_cast<std::size_t>(a) * m + b] =
          norm / (lam[static_cast<std::size_t>(a)] + lam[static_cast<std::size_t>(b)] + shift);
  detail::FftwBuffer<double> in(inv_symbol_.size()), out(inv_symbol_.size());
  std::lock_guard lock(detail::fftw_planner_mutex());
  plan_->plan = fftw_plan_r2r_2d(m, m, in.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
}

DirichletPreconditioner::~DirichletPreconditioner() {
  std::lock_guard lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(plan_->plan);
}

Field DirichletPreconditioner::apply(const Field& r) const {
  if (!(r.grid() == grid_)) fail(ErrorKind::usage, "preconditioner: grid mismatch");
  const int m = grid_.points_per_side() - 1;
  detail::FftwBuffer<double> a(inv_symbol_.size()), b(inv_symbol_.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[static_cast<std::size_t>(i) * m + j] = r.at(i + 1, j + 1);
  fftw_execute_r2r(plan_->plan, a.data(), b.data());
  for (std::size_t k = 0; k < inv_symbol_.size(); ++k) b[k] *= inv_symbol_[k];
  fftw_execute_r2r(plan_->plan, b.data(), a.data());
  Field out(grid_);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.at(i + 1, j + 1) = a[static_cast<std::size_t>(i) * m + j];
  return out;
}

}  // namespace css
