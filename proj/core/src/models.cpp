#include "cg/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cg {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

// Vertex count of a complete tree whose level k holds first * branch^(k-1)
// vertices (k >= 1) below a single root; throws past kMaxTreeVertices.
std::size_t guarded_tree_size(std::size_t first, std::size_t branch,
                              std::size_t depth) {
  std::size_t total = 1;
  std::size_t level = 1;
  for (std::size_t k = 1; k <= depth; ++k) {
    level = (k == 1) ? first : level * branch;
    total += level;
    if (level > kMaxTreeVertices || total > kMaxTreeVertices) {
      throw std::invalid_argument("tree exceeds the vertex limit");
    }
    if (level == 0) break;
  }
  return total;
}

}  // namespace

MeetingModel::MeetingModel(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
  require(n_ >= 1, "meeting model needs at least one agent");
  for (auto& e : edges_) {
    require(e.i < n_ && e.j < n_, "edge endpoint out of range");
    require(e.i != e.j, "self-pairs are not allowed");
    require(std::isfinite(e.rate) && e.rate > 0.0, "rates must be positive");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    require(edges_[k].i != edges_[k - 1].i || edges_[k].j != edges_[k - 1].j,
            "duplicate edge");
  }

  offsets_.assign(n_ + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.i + 1];
    ++offsets_[e.j + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Edges are sorted by (i, j), so each adjacency run comes out sorted.
  for (const auto& e : edges_) adjacency_[cursor[e.j]++] = e.i;
  for (const auto& e : edges_) adjacency_[cursor[e.i]++] = e.j;
  for (std::size_t v = 0; v < n_; ++v) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }
}

double MeetingModel::rate(AgentId a, AgentId b) const noexcept {
  if (a == b || a >= n_ || b >= n_) return 0.0;
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{a, b, 0.0},
                             [](const Edge& x, const Edge& y) {
                               return x.i != y.i ? x.i < y.i : x.j < y.j;
                             });
  if (it != edges_.end() && it->i == a && it->j == b) return it->rate;
  return 0.0;
}

double MeetingModel::min_rate() const noexcept {
  if (edges_.empty()) return 0.0;
  double best = edges_.front().rate;
  for (const auto& e : edges_) best = std::min(best, e.rate);
  return best;
}

bool MeetingModel::all_rates_equal_one() const noexcept {
  return std::all_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.rate == 1.0; });
}

MeetingModel MeetingModel::scaled(double factor) const {
  require(std::isfinite(factor) && factor > 0.0, "scale factor must be positive");
  std::vector<Edge> out(edges_.begin(), edges_.end());
  for (auto& e : out) e.rate *= factor;
  return MeetingModel(n_, std::move(out));
}

// ---------------------------------------------------------------------------

GwOffspring::GwOffspring(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  require(!pmf_.empty(), "offspring pmf is empty");
  double sum = 0.0;
  for (double p : pmf_) {
    require(std::isfinite(p) && p >= 0.0, "offspring pmf entries must be >= 0");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "offspring pmf must sum to 1");
  cdf_.resize(pmf_.size());
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
  cdf_.back() = 1.0;
}

GwOffspring GwOffspring::poisson(double mean, double tail) {
  require(std::isfinite(mean) && mean >= 0.0, "Poisson mean must be >= 0");
  require(tail > 0.0 && tail < 1.0, "tail mass must lie in (0, 1)");
  std::vector<double> pmf;
  double term = std::exp(-mean);
  double mass = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (k > 0) term *= mean / static_cast<double>(k);
    pmf.push_back(term);
    mass += term;
    if (1.0 - mass < tail && static_cast<double>(k) >= mean) break;
    if (k > 100000) throw std::invalid_argument("Poisson mean too large");
  }
  for (double& p : pmf) p /= mass;
  return GwOffspring(std::move(pmf));
}

double GwOffspring::pgf(double x) const noexcept {
  double value = 0.0;
  for (auto it = pmf_.rbegin(); it != pmf_.rend(); ++it) value = value * x + *it;
  return value;
}

double GwOffspring::mean() const noexcept {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

std::size_t GwOffspring::sample(Rng& rng) const noexcept {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

// ---------------------------------------------------------------------------

MeetingModel complete_graph(std::size_t n, double rate) {
  require(n >= 1, "complete_graph needs n >= 1");
  require(std::isfinite(rate) && rate > 0.0, "rate must be positive");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (AgentId i = 0; i < n; ++i)
    for (AgentId j = i + 1; j < n; ++j) edges.push_back({i, j, rate});
  return MeetingModel(n, std::move(edges));
}

MeetingModel from_edge_list(std::size_t n,
                            std::span<const std::pair<AgentId, AgentId>> pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) edges.push_back({a, b, 1.0});
  return MeetingModel(n, std::move(edges));
}

MeetingModel ring_of_near_cliques(std::size_t r, std::size_t k) {
  require(r >= 3, "ring_of_near_cliques needs r >= 3");
  require(k >= 2, "ring_of_near_cliques needs k >= 2 blocks");
  // Block b occupies [b*r, (b+1)*r); a_b is its first vertex, b_b its last.
  std::vector<Edge> edges;
  for (std::size_t block = 0; block < k; ++block) {
    const auto base = static_cast<AgentId>(block * r);
    const auto last = static_cast<AgentId>(base + r - 1);
    for (AgentId u = base; u <= last; ++u)
      for (AgentId v = u + 1; v <= last; ++v)
        if (!(u == base && v == last)) edges.push_back({u, v, 1.0});
    const auto next_first = static_cast<AgentId>(((block + 1) % k) * r);
    edges.push_back({last, next_first, 1.0});
  }
  return MeetingModel(r * k, std::move(edges));
}

MeetingModel erdos_renyi(std::size_t n, double c, Rng& rng) {
  require(n >= 1, "erdos_renyi needs n >= 1");
  require(std::isfinite(c) && c >= 0.0, "edge parameter c must be >= 0");
  const double p = c / static_cast<double>(n);
  require(p <= 1.0, "c/n must not exceed 1");
  std::vector<Edge> edges;
  if (p == 0.0 || n < 2) return MeetingModel(n, std::move(edges));
  if (p == 1.0) return complete_graph(n, 1.0);

  // Geometric gap skipping over pairs (w, v), w < v, in row order.
  const double log_q = std::log1p(-p);
  std::size_t v = 1;
  long long w = -1;
  while (v < n) {
    const double gap = std::floor(std::log(rng.uniform_open_closed()) / log_q);
    w += 1 + static_cast<long long>(gap);
    while (v < n && w >= static_cast<long long>(v)) {
      w -= static_cast<long long>(v);
      ++v;
    }
    if (v < n) edges.push_back({static_cast<AgentId>(w), static_cast<AgentId>(v), 1.0});
  }
  return MeetingModel(n, std::move(edges));
}

MeetingModel torus_power_law(std::size_t side, std::size_t dim, double alpha) {
  require(side >= 2, "torus side must be >= 2");
  require(dim >= 1 && dim <= 3, "torus dimension must be 1, 2 or 3");
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
  std::size_t n = 1;
  for (std::size_t k = 0; k < dim; ++k) n *= side;
  require(n * (n - 1) / 2 <= 50'000'000, "torus has too many pairs");

  // Rate depends only on the wraparound displacement class, so tabulate it.
  std::vector<double> rate_by_offset(n, 0.0);
  for (std::size_t offset = 1; offset < n; ++offset) {
    std::size_t rest = offset;
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t delta = rest % side;
      rest /= side;
      const std::size_t wrapped = std::min(delta, side - delta);
      sq += static_cast<double>(wrapped * wrapped);
    }
    rate_by_offset[offset] = std::pow(std::sqrt(sq), -alpha);
  }
  auto displacement = [&](std::size_t a, std::size_t b) {
    std::size_t offset = 0, scale = 1;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t ca = a % side, cb = b % side;
      a /= side;
      b /= side;
      offset += ((cb + side - ca) % side) * scale;
      scale *= side;
    }
    return offset;
  };

  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.push_back({static_cast<AgentId>(i), static_cast<AgentId>(j),
                       rate_by_offset[displacement(i, j)]});
  return MeetingModel(n, std::move(edges));
}

MeetingModel dary_tree(std::size_t d, std::size_t depth) {
  require(d >= 1, "d-ary tree needs d >= 1");
  const std::size_t n = guarded_tree_size(d, d, depth);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  // Heap numbering: children of v are v*d + 1 .. v*d + d (breadth-first).
  for (std::size_t child = 1; child < n; ++child)
    edges.push_back({static_cast<AgentId>((child - 1) / d),
                     static_cast<AgentId>(child), 1.0});
  return MeetingModel(n, std::move(edges));
}

MeetingModel regular_tree(std::size_t r, std::size_t depth) {
  require(r >= 2, "regular tree needs r >= 2");
  require(depth >= 1, "regular tree needs depth >= 1");
  const std::size_t n = guarded_tree_size(r, r - 1, depth);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  std::vector<AgentId> frontier{0};
  AgentId next = 1;
  for (std::size_t level = 1; level <= depth; ++level) {
    std::vector<AgentId> children;
    for (AgentId parent : frontier) {
      const std::size_t count = (level == 1) ? r : r - 1;
      for (std::size_t c = 0; c < count; ++c) {
        edges.push_back({parent, next, 1.0});
        children.push_back(next++);
      }
    }
    frontier = std::move(children);
  }
  return MeetingModel(n, std::move(edges));
}

MeetingModel galton_watson_tree(const GwOffspring& offspring, std::size_t depth,
                                Rng& rng) {
  std::vector<Edge> edges;
  std::vector<AgentId> frontier{0};
  std::size_t n = 1;
  for (std::size_t level = 1; level <= depth && !frontier.empty(); ++level) {
    std::vector<AgentId> children;
    for (AgentId parent : frontier) {
      const std::size_t count = offspring.sample(rng);
      for (std::size_t c = 0; c < count; ++c) {
        const auto child = static_cast<AgentId>(n++);
        edges.push_back({parent, child, 1.0});
        children.push_back(child);
      }
      if (n > kMaxTreeVertices) throw std::length_error("Galton-Watson tree too large");
    }
    frontier = std::move(children);
  }
  return MeetingModel(n, std::move(edges));
}

MeetingModel random_regular_graph(std::size_t n, std::size_t r, Rng& rng) {
  require(r >= 3, "random regular graph needs r >= 3");
  require(n > r, "random regular graph needs n > r");
  require((n * r) % 2 == 0, "n * r must be even");

  std::vector<std::vector<AgentId>> adjacent(n);
  std::vector<AgentId> points;
  auto suitable = [&](AgentId u, AgentId v) {
    if (u == v) return false;
    const auto& list = adjacent[u];
    return std::find(list.begin(), list.end(), v) == list.end();
  };

  for (;;) {
    for (auto& list : adjacent) list.clear();
    points.clear();
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < r; ++k) points.push_back(static_cast<AgentId>(v));

    bool stuck = false;
    std::size_t failures = 0;
    while (!points.empty()) {
      std::size_t a = 0, b = 0;
      if (failures < 64) {
        a = rng.below(points.size());
        b = rng.below(points.size() - 1);
        if (b >= a) ++b;
        if (!suitable(points[a], points[b])) {
          ++failures;
          continue;
        }
      } else {
        // Redraw uniformly among the remaining suitable point pairs.
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t x = 0; x < points.size(); ++x)
          for (std::size_t y = x + 1; y < points.size(); ++y)
            if (suitable(points[x], points[y])) candidates.emplace_back(x, y);
        if (candidates.empty()) {
          stuck = true;
          break;
        }
        std::tie(a, b) = candidates[rng.below(candidates.size())];
      }
      failures = 0;
      const AgentId u = points[a], v = points[b];
      adjacent[u].push_back(v);
      adjacent[v].push_back(u);
      if (a < b) std::swap(a, b);
      points[a] = points.back();
      points.pop_back();
      points[b] = points.back();
      points.pop_back();
    }
    if (stuck) continue;

    std::vector<Edge> edges;
    edges.reserve(n * r / 2);
    for (std::size_t u = 0; u < n; ++u)
      for (AgentId v : adjacent[u])
        if (u < v) edges.push_back({static_cast<AgentId>(u), v, 1.0});
    return MeetingModel(n, std::move(edges));
  }
}

bool is_connected(const MeetingModel& model) {
  const std::size_t n = model.size();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::queue<AgentId> queue;
  queue.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const AgentId v = queue.front();
    queue.pop();
    for (AgentId w : model.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        queue.push(w);
      }
    }
  }
  return reached == n;
}

bool is_forest(const MeetingModel& model) {
  std::vector<AgentId> parent(model.size());
  std::iota(parent.begin(), parent.end(), AgentId{0});
  auto find = [&](AgentId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : model.edges()) {
    const AgentId a = find(e.i), b = find(e.j);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

void write_edge_list(std::ostream& out, const MeetingModel& model) {
  out << "n " << model.size() << '\n';
  for (const auto& e : model.edges())
    out << e.i << ' ' << e.j << ' ' << format_double(e.rate) << '\n';
}

MeetingModel read_edge_list(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    if (!have_header) {
      std::string tag;
      if (!(fields >> tag >> n) || tag != "n")
        throw std::invalid_argument("edge list must start with 'n <count>'");
      have_header = true;
      continue;
    }
    long long i = -1, j = -1;
    double rate = 0.0;
    if (!(fields >> i >> j >> rate) || i < 0 || j < 0)
      throw std::invalid_argument("malformed edge on line " + std::to_string(line_no));
    edges.push_back({static_cast<AgentId>(i), static_cast<AgentId>(j), rate});
  }
  if (!have_header) throw std::invalid_argument("edge list is empty");
  return MeetingModel(n, std::move(edges));
}

}  // namespace cg
