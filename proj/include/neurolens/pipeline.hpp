#pragma once

#include "neurolens/backend.hpp"
#include "neurolens/config.hpp"
#include "neurolens/data_model.hpp"
#include "neurolens/proposer.hpp"
#include "neurolens/validator.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace neurolens {

enum class Stage { exemplars, select, grid, propose, validate };

std::string to_string(Stage stage);
Stage parse_stage(const std::string &name);
const std::vector<Stage> &all_stages();

using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;
std::optional<std::string> process_env(const std::string &name);

// Live mode reads NL_{MLLM,LLM,DIFFUSION,ACTIVATION}_URL and the matching
// NL_API_KEY_* variables, recording every response when a store is set.
BackendBundle make_backends(const PipelineConfig &config, const EnvLookup &env = process_env);

// Every client in the bundle talks to `transport`.
BackendBundle shared_backends(std::shared_ptr<Transport> transport, std::size_t max_in_flight = 4);

// Loaded inputs plus the backends of one run.
struct RunContext {
  PipelineConfig config;
  ProbeManifest manifest;
  ActivationMatrix activations;
  EmbeddingMatrix embeddings;
  BackendBundle backends;
  BadAnswerList bad_answers = BadAnswerList::defaults();
  ProposerPrompt prompt = ProposerPrompt::defaults();

  // Inputs are checked against each other; ConfigError/ValidationError on problems.
  static RunContext load(const PipelineConfig &config, BackendBundle backends);

  // Selected neurons, validated against the activation width.
  std::vector<std::size_t> neurons() const;
  NeuronRef neuron_ref(std::size_t index) const;
  std::filesystem::path neuron_dir(std::size_t index) const;
};

// Stage artifacts inside neuron_NNNNN/.
inline constexpr const char *exemplars_file = "exemplars.json";
inline constexpr const char *selection_file = "selection.json";
inline constexpr const char *grid_file = "grid.png";
inline constexpr const char *proposal_file = "proposal.json";
inline constexpr const char *report_file = "report.json";

void run_stage(const RunContext &ctx, Stage stage, std::size_t neuron);

struct NeuronOutcome {
  std::size_t neuron = 0;
  std::optional<std::string> concept_name;
  bool refusal = false;
  double score = 0.0;
  bool infrastructure_error = false;
  std::vector<std::string> errors;
};

// All stages for one neuron; failures end up in the outcome.
NeuronOutcome run_neuron(const RunContext &ctx, std::size_t neuron);

// Runs the selected neurons on `config.jobs` threads and writes run_manifest.json.
std::vector<NeuronOutcome> run_pipeline(const RunContext &ctx);

nlohmann::json run_manifest(const RunContext &ctx, std::span<const std::size_t> neurons);
std::string summary_table(std::span<const NeuronOutcome> outcomes);

} // namespace neurolens
