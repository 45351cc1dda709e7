#include "doctest.h"
#include "neurolens/subset_select.hpp"
#include "support.hpp"

#include <cmath>

using namespace neurolens;

namespace {

SimilarityGraph random_graph(testing::Gen &g, std::size_t n, std::size_t dim) {
  std::vector<float> v(n * dim);
  for (auto &x : v) {
    x = static_cast<float>(g.uniform(-1, 1));
  }
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i;
  }
  return build_graph(rows, Matrix(n, dim, std::move(v)), true);
}

bool is_clique(const SimilarityGraph &g, const std::vector<std::size_t> &c, double t) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (g.distance(c[i], c[j]) > t) {
        return false;
      }
    }
  }
  return true;
}

} // namespace

TEST_SUITE("subset_select") {

TEST_CASE("identical, orthogonal and antipodal rows") {
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const Matrix m(4, 2, {1, 0, 1, 0, 0, 1, -1, 0});
  const auto g = build_graph(rows, m, true);
  CHECK(g.distance(0, 1) == 0.0);
  CHECK(std::abs(g.distance(0, 2) - std::sqrt(2.0)) < 1e-6);
  CHECK(std::abs(g.distance(0, 3) - 2.0) < 1e-6);
  CHECK(g.distance(2, 0) == g.distance(0, 2));
}

TEST_CASE("build_graph from exemplars normalizes and checks alignment") {
  const auto emb = EmbeddingMatrix::normalized(Matrix(3, 2, {2, 0, 0, 3, 1, 1}));
  ExemplarSet s;
  s.members = {{2, 1.0}, {0, 0.5}};
  const auto g = build_graph(s, emb);
  CHECK(g.vertices() == std::vector<std::size_t>{2, 0});
  CHECK(std::abs(g.distance(0, 1) - std::sqrt(2.0 - std::sqrt(2.0))) < 1e-6);
  s.members.push_back({7, 0.1});
  CHECK_THROWS_AS(build_graph(s, emb), AlignmentError);
}

TEST_CASE("1-D points {0,1,2,10}, m=3 picks the first three") {
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const auto g = build_graph(rows, Matrix(4, 1, {0, 1, 2, 10}), false);
  const auto s = select_min_diameter_subset(g, 3);
  CHECK(s.chosen == std::vector<std::size_t>{0, 1, 2});
  CHECK(s.diameter == 2.0);
  CHECK(brute_force_min_diameter(g, 3).chosen == s.chosen);
}

TEST_CASE("m == |V| forces every vertex") {
  testing::Gen gen(8);
  const auto g = random_graph(gen, 7, 3);
  const auto s = select_min_diameter_subset(g, 7);
  CHECK(s.chosen.size() == 7);
  CHECK(s.diameter == subset_diameter(g, s.chosen));
  CHECK(s.diameter == g.candidate_diameters().back());
}

TEST_CASE("m == 1 picks vertex 0 with diameter 0") {
  testing::Gen gen(9);
  const auto g = random_graph(gen, 5, 3);
  const auto s = brute_force_min_diameter(g, 1);
  CHECK(s.chosen == std::vector<std::size_t>{0});
  CHECK(s.diameter == 0.0);
  CHECK(select_min_diameter_subset(g, 1).chosen == s.chosen);
}

TEST_CASE("parameter errors and the oracle limit") {
  testing::Gen gen(10);
  const auto g = random_graph(gen, 4, 2);
  CHECK_THROWS_AS(select_min_diameter_subset(g, 5), ParameterError);
  CHECK_THROWS_AS(select_min_diameter_subset(g, 0), ParameterError);
  const auto big = random_graph(gen, 40, 2);
  CHECK_THROWS_AS(brute_force_min_diameter(big, 20), OracleLimitError);
  CHECK_THROWS_AS(SimilarityGraph::from_distances({0, 1}, {0, 1, 2, 0}), ParameterError);
}

TEST_CASE("clique decision at the extremes") {
  testing::Gen gen(13);
  const auto g = random_graph(gen, 9, 4);
  const auto d = g.candidate_diameters();
  for (std::size_t k = 1; k <= g.size(); ++k) {
    CHECK(has_k_clique(g, d.back(), k).has_value());
  }
  CHECK(!has_k_clique(g, d[1] / 2, 2).has_value());
  CHECK(has_k_clique(g, d[1] / 2, 1).has_value());
}

TEST_CASE("witnesses are valid cliques and lexicographic witness is smallest") {
  testing::Gen gen(14);
  for (int t = 0; t < 60; ++t) {
    const auto g = random_graph(gen, gen.between(2, 11), 3);
    const auto d = g.candidate_diameters();
    const double th = d[gen.below(d.size())];
    const std::size_t k = gen.between(1, g.size());
    const auto w = has_k_clique(g, th, k);
    const auto lex = lexicographic_first_clique(g, th, k);
    CHECK(w.has_value() == lex.has_value());
    if (w) {
      CHECK(w->size() == k);
      CHECK(is_clique(g, *w, th));
      CHECK(is_clique(g, *lex, th));
      CHECK(*lex <= *w);
    }
  }
}

TEST_CASE("scaling distances leaves the chosen set unchanged") {
  testing::Gen gen(15);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_graph(gen, gen.between(3, 12), 3);
    const std::size_t m = gen.between(1, std::min<std::size_t>(g.size(), 5));
    const auto a = select_min_diameter_subset(g, m);
    const auto b = select_min_diameter_subset(g.scaled(3.5), m);
    CHECK(a.chosen == b.chosen);
    CHECK(select_min_diameter_subset(g, m).chosen == a.chosen);
  }
}

TEST_CASE("passthrough when there are fewer exemplars than m") {
  testing::Gen gen(16);
  const auto g = random_graph(gen, 4, 3);
  const auto s = select_subset(g, 36);
  CHECK(s.passthrough);
  CHECK(s.chosen == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(s.diameter == subset_diameter(g, s.chosen));
  CHECK(!select_subset(g, 3).passthrough);
}

TEST_CASE("selection json carries input indices") {
  const std::vector<std::size_t> rows{5, 9, 2, 7};
  const auto g = build_graph(rows, Matrix(10, 1, {0, 0, 2, 0, 0, 0, 0, 10, 0, 1}), false);
  const auto s = select_min_diameter_subset(g, 3);
  const auto j = selection_to_json(s, g);
  CHECK(j["input_indices"].get<std::vector<std::size_t>>() == s.input_indices(g));
  const auto back = selection_from_json(j);
  CHECK(back.chosen == s.chosen);
  CHECK(back.diameter == s.diameter);
}

} // TEST_SUITE
