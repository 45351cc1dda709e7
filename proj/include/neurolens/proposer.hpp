#pragma once

#include "json.hpp"
#include "neurolens/backend.hpp"
#include "neurolens/data_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace neurolens {

// Phrases shown to the model as examples of unhelpful answers.
class BadAnswerList {
public:
  static BadAnswerList defaults();
  static BadAnswerList from_lines(const std::string &text);
  explicit BadAnswerList(std::vector<std::string> phrases);

  const std::vector<std::string> &phrases() const noexcept { return phrases_; }
  // "- phrase" lines, as substituted into the prompt template.
  std::string render() const;
  // Token-level fuzzy match against any phrase.
  bool matches(const std::string &answer) const;

private:
  std::vector<std::string> phrases_;
};

// Template text with a single {bad_answers} slot.
class ProposerPrompt {
public:
  static ProposerPrompt defaults();
  static ProposerPrompt load(const std::string &path);
  explicit ProposerPrompt(std::string template_text);

  std::string render(const BadAnswerList &bad_answers) const;
  const std::string &template_text() const noexcept { return text_; }

private:
  std::string text_;
};

inline constexpr std::size_t max_concept_words = 12;

// Lowercased bare noun phrase: first line only, label prefixes, quotes,
// trailing punctuation and leading articles removed, capped at 12 words.
std::string normalize_concept(const std::string &reply);

struct ConceptProposal {
  NeuronRef neuron;
  std::optional<std::string> concept_name; // empty on refusal
  bool refusal = false;
  bool generic_flag = false;
  std::string prompt_digest;
  std::vector<std::size_t> exemplar_indices;
  std::string raw_response;
};

ConceptProposal propose_concept(const NeuronRef &neuron, const Bytes &grid_png,
                                std::vector<std::size_t> exemplar_indices,
                                const BadAnswerList &bad_answers, BackendClient &client,
                                const ProposerPrompt &prompt = ProposerPrompt::defaults());

void to_json(nlohmann::json &j, const ConceptProposal &p);
void from_json(const nlohmann::json &j, ConceptProposal &p);

} // namespace neurolens
