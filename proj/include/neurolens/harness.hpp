#pragma once

#include "neurolens/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace neurolens {

struct HarnessNeuron {
  SyntheticNeuron neuron;
  // Answer the fake multimodal model gives for this neuron's grid instead of
  // the dominant label.
  std::optional<std::string> answer;
  // "true", "unrelated" or "refusal": what the run is expected to show.
  std::string role;
};

struct HarnessSpec {
  std::size_t vocab_size = 24;
  std::size_t n_images = 1200;
  std::size_t labels_per_image = 2;
  std::uint64_t seed = 7;
  ProbeOptions probe;
  std::vector<HarnessNeuron> neurons;
};

// Five planted-concept neurons, two whose grid is misnamed with a label from
// another group, and one pure-noise neuron.
HarnessSpec default_harness_spec(std::uint64_t seed = 7);

// Writes manifest.json, images/, activations.nact, embeddings.nemb,
// neurons.json and pipeline.cfg into `dir`. With `record`, the pipeline runs
// once against the synthetic world and fills dir/mock_store.
void write_harness(const std::filesystem::path &dir, const HarnessSpec &spec, bool record = true);

} // namespace neurolens
