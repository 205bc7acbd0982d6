#include "cg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace cg::solver {

namespace {

// out[i] = integral of g over [z_i, 1] by the composite trapezoid rule.
void integrate_from_right(const std::vector<double>& g, double dz,
                          std::vector<double>& out) {
  const std::size_t m = g.size();
  out.resize(m);
  out[m - 1] = 0.0;
  for (std::size_t i = m - 1; i-- > 0;) out[i] = out[i + 1] + 0.5 * dz * (g[i] + g[i + 1]);
}

// Time marching for phi(z,t) = int_z^1 G(1 - psi(xi,t)) dxi with psi the
// running time integral of phi (Heun predictor-corrector in t).
template <typename Offspring>
PgfTable march(const Grid& grid, Offspring&& generating) {
  grid.validate();
  PgfTable table(grid);
  const std::size_t mz = grid.z_points;
  const std::size_t mt = grid.t_points();
  const double dz = 1.0 / static_cast<double>(mz - 1);
  const double dt = grid.t_step;

  std::vector<double> psi(mz, 0.0), psi_pred(mz), integrand(mz), phi(mz), phi_pred(mz);
  auto evaluate = [&](const std::vector<double>& psi_row, std::vector<double>& out) {
    for (std::size_t i = 0; i < mz; ++i)
      integrand[i] = generating(std::clamp(1.0 - psi_row[i], 0.0, 1.0));
    integrate_from_right(integrand, dz, out);
  };

  for (std::size_t i = 0; i < mz; ++i) phi[i] = 1.0 - grid.z(i);
  for (std::size_t k = 0;; ++k) {
    for (std::size_t i = 0; i < mz; ++i) {
      table.phi(i, k) = phi[i];
      table.psi(i, k) = psi[i];
    }
    if (k + 1 == mt) break;
    for (std::size_t i = 0; i < mz; ++i) psi_pred[i] = psi[i] + dt * phi[i];
    evaluate(psi_pred, phi_pred);
    for (std::size_t i = 0; i < mz; ++i) psi[i] += 0.5 * dt * (phi[i] + phi_pred[i]);
    evaluate(psi, phi);
  }
  return table;
}

double int_power(double base, std::size_t exponent) noexcept {
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

// Fills phi from a per-time integrand and accumulates psi by the trapezoid
// rule in t.
template <typename Integrand>
void fill_from_integrand(PgfTable& table, Integrand&& integrand_at) {
  const Grid& grid = table.grid();
  const std::size_t mz = grid.z_points;
  const std::size_t mt = grid.t_points();
  const double dz = 1.0 / static_cast<double>(mz - 1);
  std::vector<double> g(mz), phi(mz);
  for (std::size_t k = 0; k < mt; ++k) {
    if (k == 0) {
      for (std::size_t i = 0; i < mz; ++i) phi[i] = 1.0 - grid.z(i);
    } else {
      for (std::size_t i = 0; i < mz; ++i) g[i] = integrand_at(i, k);
      integrate_from_right(g, dz, phi);
    }
    for (std::size_t i = 0; i < mz; ++i) {
      table.phi(i, k) = phi[i];
      table.psi(i, k) =
          (k == 0) ? 0.0
                   : table.psi(i, k - 1) + 0.5 * grid.t_step * (table.phi(i, k - 1) + phi[i]);
    }
  }
}

}  // namespace

void Grid::validate() const {
  if (z_points < 3) throw std::invalid_argument("grid needs at least 3 z points");
  if (!(t_max > 0.0 && t_max <= 1.0)) throw std::invalid_argument("t_max must lie in (0, 1]");
  if (!(t_step > 0.0 && t_step <= t_max)) throw std::invalid_argument("bad t_step");
  const double steps = t_max / t_step;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw std::invalid_argument("t_step must divide t_max");
}

std::size_t Grid::t_points() const {
  return static_cast<std::size_t>(std::llround(t_max / t_step)) + 1;
}

Grid Grid::refined() const {
  return Grid{2 * (z_points - 1) + 1, t_step / 2.0, t_max};
}

PgfTable::PgfTable(const Grid& grid) : grid_(grid) {
  grid_.validate();
  phi_.assign(grid_.z_points * grid_.t_points(), 0.0);
  psi_.assign(phi_.size(), 0.0);
}

bool PgfTable::satisfies_invariants(double tol) const {
  const std::size_t mz = grid_.z_points;
  const std::size_t mt = grid_.t_points();
  for (std::size_t k = 0; k < mt; ++k) {
    if (std::abs(phi(mz - 1, k)) > tol) return false;
    for (std::size_t i = 0; i < mz; ++i) {
      const double v = phi(i, k);
      if (!(v >= -tol && v <= 1.0 + tol)) return false;
      if (i + 1 < mz && phi(i + 1, k) > v + tol) return false;
      if (psi(i, k) > grid_.t(k) + tol) return false;
      if (k > 0 && psi(i, k) < psi(i, k - 1) - tol) return false;
    }
  }
  for (std::size_t i = 0; i < mz; ++i)
    if (std::abs(phi(i, 0) - (1.0 - grid_.z(i))) > tol) return false;
  return true;
}

PgfTable solve_tree_recursion(const MeetingModel& tree, AgentId root, const Grid& grid) {
  grid.validate();
  const std::size_t n = tree.size();
  if (root >= n) throw std::invalid_argument("root out of range");
  if (!is_forest(tree) || !is_connected(tree))
    throw std::invalid_argument("solve_tree_recursion needs a tree");

  // Breadth-first order from the root; children are handled before parents.
  std::vector<AgentId> order;
  std::vector<AgentId> parent(n, root);
  std::vector<bool> seen(n, false);
  order.reserve(n);
  order.push_back(root);
  seen[root] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (AgentId w : tree.neighbors(order[head])) {
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = order[head];
        order.push_back(w);
      }
    }
  }

  const std::size_t cells = grid.z_points * grid.t_points();
  std::vector<std::vector<double>> product(n);
  PgfTable table(grid);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const AgentId v = *it;
    const std::vector<double>& prod = product[v];
    fill_from_integrand(table, [&](std::size_t i, std::size_t k) {
      return prod.empty() ? 1.0 : prod[k * grid.z_points + i];
    });
    product[v].clear();
    product[v].shrink_to_fit();
    if (v == root) break;
    auto& into = product[parent[v]];
    if (into.empty()) into.assign(cells, 1.0);
    for (std::size_t k = 0; k < grid.t_points(); ++k)
      for (std::size_t i = 0; i < grid.z_points; ++i)
        into[k * grid.z_points + i] *= 1.0 - table.psi(i, k);
  }
  return table;
}

PgfTable solve_dary_fixed_point(std::size_t d, const Grid& grid) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  return march(grid, [d](double x) { return int_power(x, d); });
}

PgfTable solve_gw(const GwOffspring& offspring, const Grid& grid) {
  return march(grid, [&offspring](double x) { return offspring.pgf(x); });
}

PgfTable solve_r_regular(std::size_t r, const Grid& grid) {
  if (r < 2) throw std::invalid_argument("r must be >= 2");
  const PgfTable branch = solve_dary_fixed_point(r - 1, grid);
  PgfTable table(grid);
  fill_from_integrand(table, [&](std::size_t i, std::size_t k) {
    return int_power(std::clamp(1.0 - branch.psi(i, k), 0.0, 1.0), r);
  });
  return table;
}

SolventProbability solvent_probability(const PgfTable& table, double t) {
  const Grid& grid = table.grid();
  const double position = t / grid.t_step;
  auto index = static_cast<long long>(std::llround(position));
  index = std::clamp<long long>(index, 0, static_cast<long long>(grid.t_points()) - 1);
  SolventProbability out;
  out.value = table.phi(0, static_cast<std::size_t>(index));
  out.off_grid = std::abs(grid.t(static_cast<std::size_t>(index)) - t) > 1e-9;
  return out;
}

PgfTable solve(const Problem& problem, const Grid& grid) {
  return std::visit(
      [&grid](const auto& p) -> PgfTable {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DaryProblem>) return solve_dary_fixed_point(p.d, grid);
        else if constexpr (std::is_same_v<T, RegularProblem>) return solve_r_regular(p.r, grid);
        else return solve_gw(p.offspring, grid);
      },
      problem);
}

RichardsonEstimate refine_and_estimate_error(const Problem& problem, const Grid& grid) {
  const PgfTable coarse = solve(problem, grid);
  const PgfTable fine = solve(problem, grid.refined());
  RichardsonEstimate out;
  out.coarse = coarse.phi(0, grid.t_points() - 1);
  out.fine = fine.phi(0, grid.refined().t_points() - 1);
  out.error = std::abs(out.coarse - out.fine) / 3.0;
  return out;
}

}  // namespace cg::solver
