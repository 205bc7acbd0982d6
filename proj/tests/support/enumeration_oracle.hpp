#pragma once

// Brute-force oracle for the gambler process on a model whose rates are all
// equal: every ordering of first meetings is equally likely, and each game
// branches on its winner with probability proportional to fortune. Independent
// of the engine's code paths.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "cg/models.hpp"

namespace cg::testing {

struct Game {
  AgentId winner;
  AgentId loser;
  std::uint64_t winner_before;
  std::uint64_t loser_before;
};

using OutcomeVisitor = std::function<void(double probability, const std::vector<Game>& games,
                                          const std::vector<std::uint64_t>& final_fortunes)>;

inline void enumerate_outcomes(const MeetingModel& model, std::vector<std::uint64_t> init,
                               const OutcomeVisitor& visit) {
  std::vector<Edge> edges(model.edges().begin(), model.edges().end());
  std::vector<std::size_t> perm(edges.size());
  std::iota(perm.begin(), perm.end(), 0);
  double orderings = 1.0;
  for (std::size_t k = 2; k <= edges.size(); ++k) orderings *= static_cast<double>(k);

  std::vector<Game> games;
  std::function<void(std::size_t, std::vector<std::uint64_t>&, double)> step =
      [&](std::size_t pos, std::vector<std::uint64_t>& x, double p) {
        if (pos == perm.size()) {
          visit(p, games, x);
          return;
        }
        const Edge& e = edges[perm[pos]];
        if (x[e.i] == 0 || x[e.j] == 0) {
          step(pos + 1, x, p);
          return;
        }
        const double total = static_cast<double>(x[e.i] + x[e.j]);
        for (int side = 0; side < 2; ++side) {
          const AgentId w = side == 0 ? e.i : e.j;
          const AgentId l = side == 0 ? e.j : e.i;
          const std::uint64_t xw = x[w], xl = x[l];
          games.push_back({w, l, xw, xl});
          x[w] += xl;
          x[l] = 0;
          step(pos + 1, x, p * static_cast<double>(xw) / total);
          x[l] = xl;
          x[w] = xw;
          games.pop_back();
        }
      };
  do {
    step(0, init, 1.0 / orderings);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

inline std::map<std::vector<std::uint64_t>, double> exact_final_law(
    const MeetingModel& model, std::vector<std::uint64_t> init) {
  std::map<std::vector<std::uint64_t>, double> law;
  enumerate_outcomes(model, std::move(init),
                     [&](double p, const std::vector<Game>&,
                         const std::vector<std::uint64_t>& x) { law[x] += p; });
  return law;
}

}  // namespace cg::testing
