#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "cg/models.hpp"

namespace cg::solver {

/// Uniform z-grid on [0,1] with `z_points` nodes and a uniform t-grid on
/// [0, t_max] with step `t_step`.
struct Grid {
  std::size_t z_points = 101;
  double t_step = 0.01;
  double t_max = 1.0;

  /// Throws std::invalid_argument unless z_points >= 3, 0 < t_max <= 1 and
  /// t_step divides t_max.
  void validate() const;
  std::size_t t_points() const;
  double z(std::size_t index) const noexcept {
    return static_cast<double>(index) / static_cast<double>(z_points - 1);
  }
  double t(std::size_t index) const noexcept {
    return static_cast<double>(index) * t_step;
  }
  /// Both steps halved.
  Grid refined() const;
};

/// phi(z,t) = 1 - E z^X(t) and its running time integral psi(z,t) on a grid.
class PgfTable {
 public:
  explicit PgfTable(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  double phi(std::size_t zi, std::size_t ti) const noexcept {
    return phi_[ti * grid_.z_points + zi];
  }
  double psi(std::size_t zi, std::size_t ti) const noexcept {
    return psi_[ti * grid_.z_points + zi];
  }
  double& phi(std::size_t zi, std::size_t ti) noexcept {
    return phi_[ti * grid_.z_points + zi];
  }
  double& psi(std::size_t zi, std::size_t ti) noexcept {
    return psi_[ti * grid_.z_points + zi];
  }

  /// Range, boundary values, z-monotonicity and psi monotone in t, with
  /// floating-point slack `tol`.
  bool satisfies_invariants(double tol = 1e-12) const;

 private:
  Grid grid_;
  std::vector<double> phi_;
  std::vector<double> psi_;
};

PgfTable solve_tree_recursion(const MeetingModel& tree, AgentId root, const Grid& grid);
PgfTable solve_dary_fixed_point(std::size_t d, const Grid& grid);
PgfTable solve_gw(const GwOffspring& offspring, const Grid& grid);
PgfTable solve_r_regular(std::size_t r, const Grid& grid);

struct SolventProbability {
  double value = 0.0;
  /// Set when t is not a grid node and the nearest node was used.
  bool off_grid = false;
};

SolventProbability solvent_probability(const PgfTable& table, double t);

struct DaryProblem {
  std::size_t d = 2;
};
struct RegularProblem {
  std::size_t r = 3;
};
struct GwProblem {
  GwOffspring offspring;
};
using Problem = std::variant<DaryProblem, RegularProblem, GwProblem>;

PgfTable solve(const Problem& problem, const Grid& grid);

struct RichardsonEstimate {
  double coarse = 0.0;
  double fine = 0.0;
  /// |coarse - fine| / 3, the second-order error estimate for `fine`.
  double error = 0.0;
};

/// Solves on `grid` and on its refinement; compares phi(0, t_max).
RichardsonEstimate refine_and_estimate_error(const Problem& problem, const Grid& grid);

}  // namespace cg::solver
