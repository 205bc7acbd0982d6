#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "cg/rng.hpp"

namespace cg {

using AgentId = std::uint32_t;

/// One unordered meeting pair with a strictly positive rate; always i < j.
struct Edge {
  AgentId i = 0;
  AgentId j = 0;
  double rate = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Symmetric pairwise meeting rates over `n` agents. Pairs that are absent
/// never meet. Immutable once built.
class MeetingModel {
 public:
  MeetingModel() = default;

  /// Validates and normalizes `edges` (endpoints swapped so i < j, then
  /// sorted). Throws std::invalid_argument on out-of-range endpoints,
  /// self-pairs, duplicate pairs or non-positive rates.
  MeetingModel(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const AgentId> neighbors(AgentId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(AgentId v) const noexcept {
    return offsets_[v + 1] - offsets_[v];
  }

  /// Rate of the pair {a, b}; 0 when absent or a == b.
  double rate(AgentId a, AgentId b) const noexcept;

  /// Smallest stored rate, or 0 for a model with no pairs.
  double min_rate() const noexcept;

  bool all_rates_equal_one() const noexcept;

  /// True when every one of the n(n-1)/2 pairs has a positive rate.
  bool all_pairs_positive() const noexcept {
    return edges_.size() == n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2;
  }

  /// Returns a copy with every rate multiplied by `factor` (> 0).
  MeetingModel scaled(double factor) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<AgentId> adjacency_;
};

/// Offspring distribution of a Galton-Watson tree, pi_0..pi_K.
class GwOffspring {
 public:
  /// Throws std::invalid_argument unless entries are nonnegative and sum to 1
  /// within 1e-12.
  explicit GwOffspring(std::vector<double> pmf);

  /// Poisson(mean) truncated at the smallest K whose discarded tail mass is
  /// below `tail`; the remaining mass is renormalized.
  static GwOffspring poisson(double mean, double tail = 1e-12);

  std::span<const double> pmf() const noexcept { return pmf_; }
  std::size_t max_offspring() const noexcept { return pmf_.size() - 1; }

  /// Generating function F(x) = sum_k pi_k x^k.
  double pgf(double x) const noexcept;
  double mean() const noexcept;

  std::size_t sample(Rng& rng) const noexcept;

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

// Generators. All throw std::invalid_argument on parameter violations.

MeetingModel complete_graph(std::size_t n, double rate);
MeetingModel from_edge_list(std::size_t n,
                            std::span<const std::pair<AgentId, AgentId>> edges);
MeetingModel ring_of_near_cliques(std::size_t r, std::size_t k);
MeetingModel erdos_renyi(std::size_t n, double c, Rng& rng);
MeetingModel torus_power_law(std::size_t side, std::size_t dim, double alpha);
MeetingModel dary_tree(std::size_t d, std::size_t depth);
MeetingModel regular_tree(std::size_t r, std::size_t depth);
MeetingModel galton_watson_tree(const GwOffspring& offspring, std::size_t depth,
                                Rng& rng);
MeetingModel random_regular_graph(std::size_t n, std::size_t r, Rng& rng);

bool is_connected(const MeetingModel& model);

/// True when the positive-rate graph has no cycles (a forest).
bool is_forest(const MeetingModel& model);

/// Maximum vertex count accepted by the tree generators.
inline constexpr std::size_t kMaxTreeVertices = 10'000'000;

// Plain-text edge list: "n <count>" then "i j rate" per edge, sorted by (i, j).
void write_edge_list(std::ostream& out, const MeetingModel& model);
MeetingModel read_edge_list(std::istream& in);

}  // namespace cg
