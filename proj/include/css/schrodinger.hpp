#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "css/grid.hpp"

namespace css {

enum class PotentialKind { constant, gaussian_well, custom_table };

/// V(x) = omega                              (constant)
/// V(x) = omega - c exp(-|x|^2 / sigma^2)    (gaussian_well)
/// V(x) = table[i N + j]                      (custom_table)
struct PotentialSpec {
  PotentialKind kind = PotentialKind::constant;
  double omega = 1.0;
  double c = 8.0;
  double sigma = 1.0;
  std::vector<double> table;

  Field realize(const Grid& grid) const;
  bool radial() const noexcept { return kind != PotentialKind::custom_table; }
  bool operator==(const PotentialSpec&) const = default;
};

const char* to_string(PotentialKind kind) noexcept;

/// H = -Delta_h + V with the 5-point Laplacian and u = 0 on the walls.
/// Only the (N-1)^2 interior nodes carry unknowns; wall entries of inputs are
/// ignored and wall entries of outputs are zero.
class SchrodingerOperator {
 public:
  SchrodingerOperator(const Grid& grid, Field potential);

  const Grid& grid() const noexcept { return grid_; }
  const Field& potential() const noexcept { return V_; }

  Field apply(const Field& u) const;
  // <Hu, v> by quadrature.
  double form(const Field& u, const Field& v) const;
  // 1/2 sum over grid edges of the squared forward difference plus
  // 1/2 integral of V u^2; equals form(u, u) / 2 up to rounding.
  double quadratic_energy(const Field& u) const;

  int interior_side() const noexcept { return grid_.points_per_side() - 1; }
  Eigen::SparseMatrix<double> interior_matrix() const;
  Eigen::VectorXd gather(const Field& u) const;
  Field scatter(const Eigen::VectorXd& x) const;

 private:
  Grid grid_;
  Field V_;
};

SchrodingerOperator assemble(const PotentialSpec& spec, const Grid& grid);

/// Negative eigenpairs of H and the data to split fields along X- (+) X+.
class SpectralSplit {
 public:
  SpectralSplit(std::shared_ptr<const SchrodingerOperator> op, std::vector<double> computed,
                std::vector<Field> negative_fields);

  const SchrodingerOperator& op() const noexcept { return *op_; }
  int ell() const noexcept { return static_cast<int>(fields_.size()); }
  const std::vector<double>& computed_eigenvalues() const noexcept { return computed_; }
  std::vector<double> negative_eigenvalues() const;
  const std::vector<Field>& eigenfields() const noexcept { return fields_; }
  // Distance from 0 to the nearest computed eigenvalue.
  double gap() const noexcept { return gap_; }

 private:
  std::shared_ptr<const SchrodingerOperator> op_;
  std::vector<double> computed_;
  std::vector<Field> fields_;
  double gap_;
};

struct SplitOptions {
  int k_max = 8;
  double tolerance = 1e-11;  // eigen-residual, relative to max(1, |lambda|)
  int max_restarts = 60;
  double degeneracy_threshold = 1e-6;
};

/// Lowest k_max eigenpairs by shift-invert block Krylov iteration; keeps the
/// negative ones. The negative eigenvalues and the first non-negative one are
/// converged; later entries of computed_eigenvalues() are Ritz upper bounds.
/// capacity-error if all k_max are negative, degeneracy-error if any computed
/// eigenvalue lies within the threshold of 0.
SpectralSplit split(std::shared_ptr<const SchrodingerOperator> op, const SplitOptions& options = {});

struct Projection {
  Field minus;
  Field plus;
};
Projection project(const SpectralSplit& split, const Field& u);

struct SplitNorms {
  double minus_sq = 0.0;  // sum |lambda_k| <u, phi_k>^2
  double plus_sq = 0.0;   // <H u+, u+>
};
SplitNorms equivalent_norm_sq(const SpectralSplit& split, const Field& u_minus, const Field& u_plus);
// ||u||^2 = ||u+||^2 + ||u-||^2 of the equivalent norm.
double equivalent_norm_sq(const SpectralSplit& split, const Field& u);

/// (-Delta_h + shift)^{-1} on the interior via the type-I sine transform.
class DirichletPreconditioner {
 public:
  explicit DirichletPreconditioner(const Grid& grid, double shift = 1.0);
  ~DirichletPreconditioner();
  DirichletPreconditioner(const DirichletPreconditioner&) = delete;
  DirichletPreconditioner& operator=(const DirichletPreconditioner&) = delete;

  Field apply(const Field& r) const;

 private:
  struct Plan;
  Grid grid_;
  std::vector<double> inv_symbol_;
  std::unique_ptr<Plan> plan_;
};

}  // namespace css
