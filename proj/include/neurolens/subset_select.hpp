#pragma once

#include "json.hpp"
#include "neurolens/data_model.hpp"
#include "neurolens/exemplar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace neurolens {

// Complete weighted graph over exemplar inputs. Vertex positions follow the
// exemplar order; `vertices()[p]` is the probe input index at position p.
class SimilarityGraph {
public:
  static SimilarityGraph from_distances(std::vector<std::size_t> vertices,
                                        std::vector<double> distances);

  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<std::size_t> &vertices() const noexcept { return vertices_; }
  double distance(std::size_t a, std::size_t b) const { return dist_[a * size() + b]; }

  // 0 followed by every distinct pairwise distance, ascending.
  std::vector<double> candidate_diameters() const;
  SimilarityGraph scaled(double factor) const;

private:
  SimilarityGraph(std::vector<std::size_t> vertices, std::vector<double> distances)
      : vertices_(std::move(vertices)), dist_(std::move(distances)) {}

  std::vector<std::size_t> vertices_;
  std::vector<double> dist_;
};

SimilarityGraph build_graph(const ExemplarSet &exemplars, const EmbeddingMatrix &embeddings);
// Euclidean distances between the given rows; `normalize` rescales each row
// to unit length first.
SimilarityGraph build_graph(std::span<const std::size_t> row_indices, const Matrix &rows,
                            bool normalize);

// Clique of size k in the threshold graph {(u,v) : d(u,v) <= threshold}, if
// one exists. Witness positions are ascending.
std::optional<std::vector<std::size_t>> has_k_clique(const SimilarityGraph &graph,
                                                     double threshold, std::size_t k);

// Lexicographically smallest k-clique (by vertex position) of the threshold graph.
std::optional<std::vector<std::size_t>>
lexicographic_first_clique(const SimilarityGraph &graph, double threshold, std::size_t k);

struct SubsetSelection {
  std::vector<std::size_t> chosen; // vertex positions, ascending
  double diameter = 0.0;
  std::size_t threshold_rank = 0; // index into candidate_diameters()
  bool passthrough = false;        // fewer exemplars than requested

  std::vector<std::size_t> input_indices(const SimilarityGraph &graph) const;
};

double subset_diameter(const SimilarityGraph &graph, std::span<const std::size_t> subset);

SubsetSelection select_min_diameter_subset(const SimilarityGraph &graph, std::size_t m);

// Exhaustive optimum, lexicographically smallest among ties.
SubsetSelection brute_force_min_diameter(const SimilarityGraph &graph, std::size_t m);

// Pipeline entry: passes every vertex through when the graph has fewer than m.
SubsetSelection select_subset(const SimilarityGraph &graph, std::size_t m);

nlohmann::json selection_to_json(const SubsetSelection &s, const SimilarityGraph &graph);
SubsetSelection selection_from_json(const nlohmann::json &j);

} // namespace neurolens
