#pragma once

#include "json.hpp"
#include "neurolens/error.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace neurolens {

enum class BackendMode { live, mock, replay };

std::string to_string(BackendMode mode);
BackendMode parse_backend_mode(const std::string &name);

// "0-7", "3", "0,2,5-6" -> sorted, de-duplicated indices. "all" -> nullopt.
std::optional<std::vector<std::size_t>> parse_neuron_range(const std::string &text);

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path activations;
  std::filesystem::path embeddings;
  std::filesystem::path out_dir = "out";

  std::string model_id = "model";
  std::string layer_id = "layer";

  std::size_t rank_k = 50;
  std::size_t cap = 64;
  std::size_t m = 36;
  std::size_t cell_px = 224;

  // Empty means the built-in template / list.
  std::filesystem::path prompt_template;
  std::filesystem::path bad_answers;

  std::size_t cohyponyms = 5;
  std::size_t caption_pairs = 2;
  std::size_t images_per_caption = 5;
  int inference_steps = 4;

  BackendMode mode = BackendMode::mock;
  std::filesystem::path store = "mock_store";
  // What mock mode does on a store miss: "refuse" or "error". Replay always errors.
  std::string mock_fallback = "error";
  std::size_t max_in_flight = 4;
  std::size_t max_attempts = 5;
  double timeout_s = 120.0;

  std::string neurons = "all";
  std::size_t jobs = 1;

  // Sets "section.key" from its textual value; unknown keys throw ConfigError.
  void set(const std::string &key, const std::string &value,
           const std::filesystem::path &base_dir = {});
  void validate() const;
  nlohmann::json to_json() const;
};

// Every key the config file accepts, as "section.key".
const std::vector<std::string> &config_keys();

// `[section]` headers, `key = value` lines, `#` comments. Values may be
// double-quoted. Relative paths resolve against `base_dir`.
PipelineConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = {},
                            PipelineConfig defaults = {});
PipelineConfig load_config(const std::filesystem::path &path, PipelineConfig defaults = {});

// Serializes back to the file format; parse_config(render_config(c)) == c.
std::string render_config(const PipelineConfig &config);

} // namespace neurolens
