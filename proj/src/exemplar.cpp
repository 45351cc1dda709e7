#include "neurolens/exemplar.hpp"

#include "neurolens/error.hpp"

#include <algorithm>
#include <numeric>

namespace neurolens {

void ExemplarParams::validate() const {
  if (rank_k < 1) {
    throw ParameterError("rank_k must be at least 1");
  }
  if (cap < rank_k) {
    throw ParameterError("exemplar cap " + std::to_string(cap) + " is below rank_k " +
                         std::to_string(rank_k));
  }
}

std::vector<std::size_t> ExemplarSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(members.size());
  for (const auto &m : members) {
    out.push_back(m.input_index);
  }
  return out;
}

ExemplarSet extract_exemplars(std::span<const float> activations, const ExemplarParams &params,
                              const NeuronRef &neuron) {
  params.validate();
  if (activations.size() < params.rank_k) {
    throw InsufficientDataError("activation column has " + std::to_string(activations.size()) +
                                " inputs, fewer than rank_k = " + std::to_string(params.rank_k));
  }
  std::vector<std::size_t> order(activations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return activations[a] > activations[b];
  });

  ExemplarSet set;
  set.neuron = neuron;
  const float mu = activations[order[params.rank_k - 1]];
  set.mu = mu;
  for (std::size_t idx : order) {
    if (activations[idx] < mu) {
      break;
    }
    if (set.members.size() == params.cap) {
      set.capped = true;
      break;
    }
    set.members.push_back({idx, static_cast<double>(activations[idx])});
  }
  return set;
}

void to_json(nlohmann::json &j, const ExemplarSet &s) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto &m : s.members) {
    members.push_back({{"index", m.input_index}, {"activation", m.activation}});
  }
  j = nlohmann::json{
      {"neuron", s.neuron}, {"mu", s.mu}, {"capped", s.capped}, {"members", std::move(members)}};
}

void from_json(const nlohmann::json &j, ExemplarSet &s) {
  j.at("neuron").get_to(s.neuron);
  j.at("mu").get_to(s.mu);
  j.at("capped").get_to(s.capped);
  s.members.clear();
  for (const auto &m : j.at("members")) {
    s.members.push_back({m.at("index").get<std::size_t>(), m.at("activation").get<double>()});
  }
}

} // namespace neurolens
