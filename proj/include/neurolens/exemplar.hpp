#pragma once

#include "json.hpp"
#include "neurolens/data_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace neurolens {

// The threshold is the rank_k-th highest activation; at most `cap` inputs are kept.
struct ExemplarParams {
  std::size_t rank_k = 50;
  std::size_t cap = 64;

  static ExemplarParams with_rank(std::size_t rank_k) { return {rank_k, rank_k + 14}; }
  void validate() const;
};

struct ExemplarMember {
  std::size_t input_index = 0;
  double activation = 0.0;

  friend bool operator==(const ExemplarMember &, const ExemplarMember &) = default;
};

struct ExemplarSet {
  NeuronRef neuron;
  double mu = 0.0;
  // Descending activation, ties by ascending input index.
  std::vector<ExemplarMember> members;
  // True when inputs at or above mu were dropped to respect the cap.
  bool capped = false;

  std::vector<std::size_t> indices() const;
};

ExemplarSet extract_exemplars(std::span<const float> activations, const ExemplarParams &params,
                              const NeuronRef &neuron = {});

void to_json(nlohmann::json &j, const ExemplarSet &s);
void from_json(const nlohmann::json &j, ExemplarSet &s);

} // namespace neurolens
