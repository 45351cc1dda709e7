#pragma once

#include "json.hpp"
#include "neurolens/backend.hpp"
#include "neurolens/proposer.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neurolens {

// Part/whole pairs the substring lint cannot see ("a rectangle contains lines").
// Keys are parts; values are wholes that necessarily contain them.
using ContainmentTable = std::map<std::string, std::vector<std::string>>;
const ContainmentTable &default_containment_table();

// Lowercase tokens with a crude plural strip, so "lines" and "line" compare equal.
std::vector<std::string> lint_tokens(const std::string &phrase);
bool mentions(const std::string &text, const std::string &phrase);

// True when one phrase contains the other or the table links them.
bool non_exclusive(const std::string &concept_name, const std::string &cohyponym,
                   const ContainmentTable &table = default_containment_table());

// A colour-modified concept ("red sedans") needs a hypernym that keeps the
// head noun ("sedans of a particular color", not "cars").
bool broad_hypernym(const std::string &concept_name, const std::string &hypernym);

struct CohyponymSet {
  std::string concept_name;
  std::string hypernym;
  std::vector<std::string> cohyponyms;
  std::vector<std::string> flags;
};

struct CaptionPair {
  std::string concept_name;
  std::string cohyponym;
  std::string concept_caption;
  std::string cohyponym_caption;
  std::size_t cohyponym_index = 0;
  std::size_t pair_index = 0;
  std::vector<std::string> flags;
};

// Lint failures for one pair; empty when it passes.
std::vector<std::string> caption_lint(const CaptionPair &pair);

std::string cohyponym_prompt(const std::string &concept_name, std::size_t n);
std::string caption_prompt(const std::string &concept_name, const std::string &cohyponym,
                           std::size_t pairs);
// A retry prompt lists the problems found in the previous answer.
std::string with_feedback(const std::string &prompt, const std::vector<std::string> &problems);

struct ParsedCohyponyms {
  std::string hypernym;
  std::vector<std::string> items;
};
ParsedCohyponyms parse_cohyponym_reply(const std::string &reply);
std::vector<std::pair<std::string, std::string>> parse_caption_reply(const std::string &reply);

CohyponymSet generate_cohyponyms(const std::string &concept_name, std::size_t n,
                                 BackendClient &llm,
                                 const ContainmentTable &table = default_containment_table());

std::vector<CaptionPair> generate_caption_pairs(const std::string &concept_name,
                                                const std::string &cohyponym, std::size_t pairs,
                                                BackendClient &llm,
                                                std::size_t cohyponym_index = 0);

struct GeneratedImage {
  std::string uri;
  Bytes bytes;
};

using ActivationFn = std::function<double(const GeneratedImage &)>;
using ImageSink = std::function<void(const GeneratedImage &)>;

struct ScoredImage {
  std::string uri;
  double activation = 0.0;
};

struct ValidationSets {
  std::vector<ScoredImage> positives;
  std::vector<ScoredImage> negatives;
  std::vector<std::string> flags;
};

struct ValidationParams {
  std::size_t cohyponyms = 5;
  std::size_t caption_pairs = 2;
  std::size_t images_per_caption = 5;
  int inference_steps = default_inference_steps;
};

// Positives come from concept-side captions, negatives from co-hyponym-side
// captions. Image URIs are "<prefix>{pos|neg}/c<i>/p<j>/<k>.png".
ValidationSets build_validation_sets(std::span<const CaptionPair> pairs, BackendClient &diffusion,
                                     std::size_t images_per_caption,
                                     const ActivationFn &activation_fn,
                                     const std::string &uri_prefix = {},
                                     const ImageSink &sink = {},
                                     int inference_steps = default_inference_steps);

struct DominanceCount {
  std::uint64_t wins = 0;
  std::uint64_t pairs = 0;
};

// Pairs (p, n) with p > n strictly; ties earn nothing.
DominanceCount dominance_count(std::span<const double> positives, std::span<const double> negatives);
double dominance_score(std::span<const double> positives, std::span<const double> negatives);

struct ValidationReport {
  NeuronRef neuron;
  std::optional<std::string> concept_name;
  bool refusal = false;
  std::string hypernym;
  std::vector<std::string> cohyponyms;
  std::vector<CaptionPair> caption_pairs;
  ValidationSets sets;
  double score = 0.0;
  std::vector<std::string> flags;
  std::vector<std::string> errors;
  // Set when an error came from the transport layer rather than content.
  bool infrastructure_error = false;
};

// Runs co-hyponyms, captions, image sets and scoring. Refusals short-circuit
// to score 0. Stage errors are recorded in the report; partial results stay.
ValidationReport validate_concept(const NeuronRef &neuron, const ConceptProposal &proposal,
                                  const BackendBundle &backends, const ValidationParams &params,
                                  const ActivationFn &activation_fn, const ImageSink &sink = {},
                                  const std::string &uri_prefix = {},
                                  const std::optional<CohyponymSet> &cohyponyms = std::nullopt);

nlohmann::json report_to_json(const ValidationReport &report);
ValidationReport report_from_json(const nlohmann::json &j);
std::string serialize_report(const ValidationReport &report);

} // namespace neurolens
