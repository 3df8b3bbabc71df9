#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "css/error.hpp"
#include "css/functional.hpp"

namespace css {

enum class SolverMethod { residual_min, mountain_pass };
const char* to_string(SolverMethod m) noexcept;

struct SolverConfig {
  SolverMethod method = SolverMethod::residual_min;
  int max_iters = 400;
  double grad_tol = 1e-6;
  double delta0 = 1e-3;       // iterates with ||u|| < delta0 count as collapsed
  int path_nodes = 12;        // mountain_pass only
  double seed_amplitude = 2.0;
  double seed_width = 1.0;
  double descent_level = 1.0;  // endpoint level -A for mountain_pass
  int max_restarts = 5;
  double handoff_tol = 5e-2;   // residual at which descent hands over to Newton

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct HistoryRow {
  int iter = 0;
  double phi = 0.0;
  double residual = 0.0;
  double norm_minus = 0.0;
  double norm_plus = 0.0;
  std::string stage;  // "descent", "newton", "path"
};

struct CriticalPointResult {
  explicit CriticalPointResult(Field start) : u(std::move(start)) {}

  Field u;
  double phi = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int restarts = 0;
  std::vector<HistoryRow> history;
  bool nontrivial = false;
  double norm = 0.0;  // equivalent norm
  double negative_part_norm = 0.0;
  double positive_part_norm = 0.0;
  double boundary_mass_fraction = 0.0;
  std::string method;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& message, std::vector<HistoryRow> history)
      : Error(ErrorKind::convergence, message), history_(std::move(history)) {}
  const std::vector<HistoryRow>& history() const noexcept { return history_; }

 private:
  std::vector<HistoryRow> history_;
};

struct RaySample {
  double s = 0.0;
  double phi = 0.0;
};

class GrowthFailure : public Error {
 public:
  GrowthFailure(const std::string& message, std::vector<RaySample> witness)
      : Error(ErrorKind::growth, message), witness_(std::move(witness)) {}
  const std::vector<RaySample>& witness() const noexcept { return witness_; }

 private:
  std::vector<RaySample> witness_;
};

/// Phi along the ray s -> s v, exact in s:
///   Phi(s v) = s^2 Q(v) + s^6 N(v) - int F(x, s v).
class RayProfile {
 public:
  RayProfile(const Functional& phi, const Field& v);
  double value(double s) const;
  double derivative(double s) const;  // d/ds Phi(s v)
  // Maximizer of s -> Phi(s v) on s > 0; 0 if the ray descends from the start.
  double argmax() const;

 private:
  const Functional* phi_;
  Field v_;
  double q_;
  double n_;
};

CriticalPointResult residual_minimize(const Functional& phi, const SolverConfig& config, const Field& start);
CriticalPointResult mountain_pass(const Functional& phi, const SolverConfig& config, const Field& endpoint);

struct DescentScale {
  double s = 0.0;
  double phi = 0.0;
  double ray_derivative = 0.0;  // d/dt Phi(t s v) at t = 1
  bool monotone = false;        // ray_derivative < 0
};
/// s > 0 with Phi(s v) = -A; growth-error if no bracket exists up to s = 1e6.
DescentScale find_descent_scale(const Functional& phi, const Field& v, double A);

struct LinkingBranch {
  bool applicable = false;
  double epsilon = 0.0;
  double extreme_phi = 0.0;        // max on X-, min on X+
  double max_relative_gap = 0.0;   // max |Phi -/+ eps^2/2| / eps^2
};
struct LinkingLevel {
  double epsilon = 0.0;
  LinkingBranch minus;
  LinkingBranch plus;
};
struct LinkingReport {
  int ell = 0;
  std::vector<LinkingLevel> levels;
};
/// Samples the spheres ||u|| = eps in X- and X+ at eps, eps/2, eps/4.
LinkingReport local_linking_probe(const Functional& phi, double epsilon, int sample_count, std::uint64_t seed);

struct RayRow {
  double s = 0.0;
  double phi = 0.0;
  double derivative = 0.0;
  bool flagged = false;  // phi <= -A with derivative >= 0
};
struct RayScan {
  std::vector<RayRow> rows;
  int sign_changes = 0;
  int flagged = 0;
};
RayScan ray_scan(const Functional& phi, const Field& v, double s_max, int samples, double A = 1.0);

/// Largest relative change of u under the symmetries of the square about the
/// origin node (mirror in x1, mirror in x2, transpose).
double symmetry_defect(const Field& u);

/// int_{|x| > 0.9 L} u^2 / int u^2.
double boundary_mass_fraction(const Field& u);

/// u with its X- component removed and scaled to unit equivalent norm.
Field unit_positive_direction(const Functional& phi, const Field& v);

}  // namespace css
