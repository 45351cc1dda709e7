#include "neurolens/subset_select.hpp"

#include "neurolens/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace neurolens {

namespace {

class VertexSet {
public:
  explicit VertexSet(std::size_t n = 0) : bits_((n + 63) / 64, 0) {}

  void insert(std::size_t v) { bits_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void erase(std::size_t v) { bits_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  bool contains(std::size_t v) const { return (bits_[v >> 6] >> (v & 63)) & 1U; }

  bool empty() const {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint64_t w) { return w == 0; });
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) {
      c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
  }
  // Lowest member; the set must be non-empty.
  std::size_t first() const {
    for (std::size_t i = 0;; ++i) {
      if (bits_[i] != 0) {
        return (i << 6) + static_cast<std::size_t>(std::countr_zero(bits_[i]));
      }
    }
  }
  VertexSet &operator&=(const VertexSet &o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      bits_[i] &= o.bits_[i];
    }
    return *this;
  }
  void subtract(const VertexSet &o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      bits_[i] &= ~o.bits_[i];
    }
  }

  template <typename F> void for_each(F &&f) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      std::uint64_t w = bits_[i];
      while (w != 0) {
        f((i << 6) + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

private:
  std::vector<std::uint64_t> bits_;
};

// Threshold graph with vertices relabelled by a permutation: label l stands
// for original position order[l].
struct ThresholdGraph {
  std::vector<std::size_t> order;
  std::vector<VertexSet> adj;

  ThresholdGraph(const SimilarityGraph &g, double threshold, bool by_degree) {
    const std::size_t n = g.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (by_degree) {
      std::vector<std::size_t> degree(n, 0);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (a != b && g.distance(a, b) <= threshold) {
            ++degree[a];
          }
        }
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
    }
    adj.assign(n, VertexSet(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && g.distance(order[a], order[b]) <= threshold) {
          adj[a].insert(b);
        }
      }
    }
  }
};

// Greedy sequential colouring of `cand`. Vertices come out grouped by colour
// class; bound[i] is the number of colours used up to and including order[i].
void colour_sort(const ThresholdGraph &g, const VertexSet &cand, std::vector<std::size_t> &order,
                 std::vector<std::size_t> &bound) {
  order.clear();
  bound.clear();
  VertexSet uncoloured = cand;
  std::size_t colour = 0;
  while (!uncoloured.empty()) {
    ++colour;
    VertexSet q = uncoloured;
    while (!q.empty()) {
      const std::size_t v = q.first();
      q.erase(v);
      q.subtract(g.adj[v]);
      uncoloured.erase(v);
      order.push_back(v);
      bound.push_back(colour);
    }
  }
}

std::size_t colour_bound(const ThresholdGraph &g, const VertexSet &cand) {
  std::vector<std::size_t> order;
  std::vector<std::size_t> bound;
  colour_sort(g, cand, order, bound);
  return bound.empty() ? 0 : bound.back();
}

class CliqueSearch {
public:
  CliqueSearch(const ThresholdGraph &g, std::size_t k) : g_(g), k_(k) {}

  // Branch and bound in colour order; stops at the first clique of size k.
  bool expand(VertexSet cand) {
    if (clique_.size() >= k_) {
      return true;
    }
    std::vector<std::size_t> order;
    std::vector<std::size_t> bound;
    colour_sort(g_, cand, order, bound);
    for (std::size_t i = order.size(); i-- > 0;) {
      if (clique_.size() + bound[i] < k_) {
        return false;
      }
      const std::size_t v = order[i];
      clique_.push_back(v);
      VertexSet next = cand;
      next &= g_.adj[v];
      if (expand(std::move(next))) {
        return true;
      }
      clique_.pop_back();
      cand.erase(v);
    }
    return false;
  }

  // Depth-first in ascending label order, so the first hit is the
  // lexicographically smallest clique.
  bool expand_lexicographic(VertexSet cand) {
    if (clique_.size() >= k_) {
      return true;
    }
    while (!cand.empty()) {
      if (clique_.size() + cand.count() < k_ || clique_.size() + colour_bound(g_, cand) < k_) {
        return false;
      }
      const std::size_t v = cand.first();
      cand.erase(v);
      clique_.push_back(v);
      VertexSet next = cand;
      next &= g_.adj[v];
      if (expand_lexicographic(std::move(next))) {
        return true;
      }
      clique_.pop_back();
    }
    return false;
  }

  std::vector<std::size_t> witness() const {
    std::vector<std::size_t> out;
    out.reserve(clique_.size());
    for (std::size_t l : clique_) {
      out.push_back(g_.order[l]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  const ThresholdGraph &g_;
  std::size_t k_;
  std::vector<std::size_t> clique_;
};

VertexSet all_vertices(std::size_t n) {
  VertexSet s(n);
  for (std::size_t v = 0; v < n; ++v) {
    s.insert(v);
  }
  return s;
}

} // namespace

SimilarityGraph SimilarityGraph::from_distances(std::vector<std::size_t> vertices,
                                                std::vector<double> distances) {
  const std::size_t n = vertices.size();
  if (distances.size() != n * n) {
    throw ParameterError("distance matrix must be " + std::to_string(n) + "x" +
                         std::to_string(n));
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (distances[a * n + a] != 0.0) {
      throw ParameterError("distance matrix diagonal must be zero");
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = distances[a * n + b];
      if (!std::isfinite(d) || d < 0.0) {
        throw ParameterError("distances must be finite and non-negative");
      }
      if (d != distances[b * n + a]) {
        throw ParameterError("distance matrix must be symmetric");
      }
    }
  }
  return SimilarityGraph(std::move(vertices), std::move(distances));
}

std::vector<double> SimilarityGraph::candidate_diameters() const {
  std::vector<double> out{0.0};
  const std::size_t n = size();
  out.reserve(1 + n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      out.push_back(distance(a, b));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SimilarityGraph SimilarityGraph::scaled(double factor) const {
  if (!(factor > 0.0)) {
    throw ParameterError("scale factor must be positive");
  }
  std::vector<double> d = dist_;
  for (double &x : d) {
    x *= factor;
  }
  return SimilarityGraph(vertices_, std::move(d));
}

SimilarityGraph build_graph(std::span<const std::size_t> row_indices, const Matrix &rows,
                            bool normalize) {
  const std::size_t n = row_indices.size();
  const std::size_t dim = rows.cols();
  std::vector<double> points(n * dim);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t r = row_indices[p];
    if (r >= rows.rows()) {
      throw AlignmentError("exemplar index " + std::to_string(r) +
                           " outside embedding matrix with " + std::to_string(rows.rows()) +
                           " rows");
    }
    double scale = 1.0;
    if (normalize) {
      double sq = 0.0;
      for (float v : rows.row(r)) {
        sq += static_cast<double>(v) * v;
      }
      if (sq == 0.0) {
        throw DataError("embedding row " + std::to_string(r) + " is the zero vector");
      }
      scale = 1.0 / std::sqrt(sq);
    }
    for (std::size_t c = 0; c < dim; ++c) {
      points[p * dim + c] = rows.at(r, c) * scale;
    }
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double sq = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = points[a * dim + c] - points[b * dim + c];
        sq += diff * diff;
      }
      dist[a * n + b] = dist[b * n + a] = std::sqrt(sq);
    }
  }
  return SimilarityGraph::from_distances({row_indices.begin(), row_indices.end()},
                                         std::move(dist));
}

SimilarityGraph build_graph(const ExemplarSet &exemplars, const EmbeddingMatrix &embeddings) {
  const auto idx = exemplars.indices();
  return build_graph(idx, embeddings.matrix(), true);
}

std::optional<std::vector<std::size_t>> has_k_clique(const SimilarityGraph &graph,
                                                     double threshold, std::size_t k) {
  if (k > graph.size()) {
    throw ParameterError("clique size " + std::to_string(k) + " exceeds vertex count " +
                         std::to_string(graph.size()));
  }
  if (k == 0) {
    return std::vector<std::size_t>{};
  }
  const ThresholdGraph tg(graph, threshold, true);
  CliqueSearch search(tg, k);
  if (!search.expand(all_vertices(graph.size()))) {
    return std::nullopt;
  }
  return search.witness();
}

std::optional<std::vector<std::size_t>>
lexicographic_first_clique(const SimilarityGraph &graph, double threshold, std::size_t k) {
  if (k > graph.size()) {
    throw ParameterError("clique size " + std::to_string(k) + " exceeds vertex count " +
                         std::to_string(graph.size()));
  }
  if (k == 0) {
    return std::vector<std::size_t>{};
  }
  const ThresholdGraph tg(graph, threshold, false);
  CliqueSearch search(tg, k);
  if (!search.expand_lexicographic(all_vertices(graph.size()))) {
    return std::nullopt;
  }
  return search.witness();
}

std::vector<std::size_t> SubsetSelection::input_indices(const SimilarityGraph &graph) const {
  std::vector<std::size_t> out;
  out.reserve(chosen.size());
  for (std::size_t p : chosen) {
    out.push_back(graph.vertices().at(p));
  }
  return out;
}

double subset_diameter(const SimilarityGraph &graph, std::span<const std::size_t> subset) {
  double d = 0.0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      d = std::max(d, graph.distance(subset[i], subset[j]));
    }
  }
  return d;
}

SubsetSelection select_min_diameter_subset(const SimilarityGraph &graph, std::size_t m) {
  if (m == 0 || m > graph.size()) {
    throw ParameterError("subset size " + std::to_string(m) + " must be in 1.." +
                         std::to_string(graph.size()));
  }
  const std::vector<double> thresholds = graph.candidate_diameters();
  // The largest candidate makes the graph complete, so it is always feasible.
  std::size_t lo = 0;
  std::size_t hi = thresholds.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (has_k_clique(graph, thresholds[mid], m)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  SubsetSelection sel;
  sel.threshold_rank = lo;
  sel.chosen = *lexicographic_first_clique(graph, thresholds[lo], m);
  sel.diameter = subset_diameter(graph, sel.chosen);
  return sel;
}

SubsetSelection brute_force_min_diameter(const SimilarityGraph &graph, std::size_t m) {
  const std::size_t n = graph.size();
  if (m == 0 || m > n) {
    throw ParameterError("subset size " + std::to_string(m) + " must be in 1.." +
                         std::to_string(n));
  }
  // C(n, m) in floating point is plenty to enforce the enumeration limit.
  double combos = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  if (combos > 1e6) {
    throw OracleLimitError("brute force would enumerate C(" + std::to_string(n) + ", " +
                           std::to_string(m) + ") subsets");
  }
  std::vector<std::size_t> current(m);
  std::iota(current.begin(), current.end(), std::size_t{0});
  SubsetSelection best;
  bool have = false;
  while (true) {
    const double d = subset_diameter(graph, current);
    if (!have || d < best.diameter) {
      best.chosen = current;
      best.diameter = d;
      have = true;
    }
    std::size_t i = m;
    while (i > 0 && current[i - 1] == n - m + (i - 1)) {
      --i;
    }
    if (i == 0) {
      break;
    }
    ++current[i - 1];
    for (std::size_t j = i; j < m; ++j) {
      current[j] = current[j - 1] + 1;
    }
  }
  const auto thresholds = graph.candidate_diameters();
  best.threshold_rank = static_cast<std::size_t>(
      std::lower_bound(thresholds.begin(), thresholds.end(), best.diameter) - thresholds.begin());
  return best;
}

SubsetSelection select_subset(const SimilarityGraph &graph, std::size_t m) {
  if (graph.size() == 0) {
    throw ParameterError("cannot select from an empty exemplar set");
  }
  if (graph.size() < m) {
    SubsetSelection sel;
    sel.chosen.resize(graph.size());
    std::iota(sel.chosen.begin(), sel.chosen.end(), std::size_t{0});
    sel.diameter = subset_diameter(graph, sel.chosen);
    const auto thresholds = graph.candidate_diameters();
    sel.threshold_rank = static_cast<std::size_t>(
        std::lower_bound(thresholds.begin(), thresholds.end(), sel.diameter) -
        thresholds.begin());
    sel.passthrough = true;
    return sel;
  }
  return select_min_diameter_subset(graph, m);
}

nlohmann::json selection_to_json(const SubsetSelection &s, const SimilarityGraph &graph) {
  return nlohmann::json{{"chosen", s.chosen},
                        {"input_indices", s.input_indices(graph)},
                        {"diameter", s.diameter},
                        {"threshold_rank", s.threshold_rank},
                        {"passthrough", s.passthrough}};
}

SubsetSelection selection_from_json(const nlohmann::json &j) {
  SubsetSelection s;
  j.at("chosen").get_to(s.chosen);
  j.at("diameter").get_to(s.diameter);
  j.at("threshold_rank").get_to(s.threshold_rank);
  j.at("passthrough").get_to(s.passthrough);
  return s;
}

} // namespace neurolens
