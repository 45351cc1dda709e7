#include "neurolens/proposer.hpp"

#include "neurolens/image.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace neurolens {

namespace {

const char *const default_template =
    "This image is a grid of separate photographs. Every photograph in the grid strongly "
    "activates the same feature detector of a vision model.\n"
    "Identify the single most specific visual concept that all of the photographs share. "
    "Answer with a short noun phrase only, without explanation.\n"
    "\n"
    "The following answers are too generic to be useful. Do not give an answer that "
    "resembles any of them:\n"
    "{bad_answers}\n"
    "\n"
    "If the photographs do not share one identifiable concept, answer exactly REFUSE.\n";

bool starts_with_ci(const std::string &s, const std::string &prefix) {
  return s.size() >= prefix.size() && to_lower(s.substr(0, prefix.size())) == prefix;
}

// Strips whitespace, ASCII and typographic quotes, and trailing punctuation.
std::string strip_wrapping(std::string s) {
  static const std::vector<std::string> quotes{"\"", "'", "`", "\xE2\x80\x9C", "\xE2\x80\x9D",
                                               "\xE2\x80\x98", "\xE2\x80\x99"};
  bool changed = true;
  while (changed) {
    changed = false;
    s = trim(s);
    for (const auto &q : quotes) {
      if (s.size() >= q.size() && s.compare(0, q.size(), q) == 0) {
        s.erase(0, q.size());
        changed = true;
      }
      if (s.size() >= q.size() && s.compare(s.size() - q.size(), q.size(), q) == 0) {
        s.erase(s.size() - q.size());
        changed = true;
      }
    }
    while (!s.empty() && std::string(".,;:!?").find(s.back()) != std::string::npos) {
      s.pop_back();
      changed = true;
    }
  }
  return s;
}

std::vector<std::string> phrase_tokens(const std::string &phrase) {
  return split_words(normalize_concept(phrase));
}

bool contains_sequence(const std::vector<std::string> &hay, const std::vector<std::string> &needle) {
  if (needle.empty() || needle.size() > hay.size()) {
    return false;
  }
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

} // namespace

BadAnswerList::BadAnswerList(std::vector<std::string> phrases) : phrases_(std::move(phrases)) {
  if (phrases_.empty()) {
    throw ParameterError("bad-answer list must not be empty");
  }
  for (const auto &p : phrases_) {
    const auto n = split_words(p).size();
    if (n == 0 || n > 20) {
      throw ParameterError("bad-answer phrase must have 1..20 words: '" + p + "'");
    }
  }
}

BadAnswerList BadAnswerList::defaults() {
  return BadAnswerList({"this image features a variety of objects in different settings",
                        "various objects", "different settings", "a collage of images"});
}

BadAnswerList BadAnswerList::from_lines(const std::string &text) {
  std::vector<std::string> phrases;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty() && line[0] != '#') {
      phrases.push_back(line);
    }
  }
  return BadAnswerList(std::move(phrases));
}

std::string BadAnswerList::render() const {
  std::string out;
  for (const auto &p : phrases_) {
    out += (out.empty() ? "- " : "\n- ") + p;
  }
  return out;
}

bool BadAnswerList::matches(const std::string &answer) const {
  const auto a = phrase_tokens(answer);
  if (a.empty()) {
    return false;
  }
  const std::set<std::string> aset(a.begin(), a.end());
  for (const auto &p : phrases_) {
    const auto b = phrase_tokens(p);
    if (contains_sequence(a, b) || contains_sequence(b, a)) {
      return true;
    }
    const std::set<std::string> bset(b.begin(), b.end());
    std::size_t common = 0;
    for (const auto &t : aset) {
      common += bset.count(t);
    }
    const std::size_t uni = aset.size() + bset.size() - common;
    if (uni > 0 && 2 * common >= uni) {
      return true;
    }
  }
  return false;
}

ProposerPrompt::ProposerPrompt(std::string template_text) : text_(std::move(template_text)) {
  if (text_.find("{bad_answers}") == std::string::npos) {
    throw ConfigError("proposer prompt template lacks the {bad_answers} slot");
  }
}

ProposerPrompt ProposerPrompt::defaults() { return ProposerPrompt(default_template); }

ProposerPrompt ProposerPrompt::load(const std::string &path) {
  return ProposerPrompt(read_text_file(path));
}

std::string ProposerPrompt::render(const BadAnswerList &bad_answers) const {
  std::string out = text_;
  const std::string slot = "{bad_answers}";
  for (auto pos = out.find(slot); pos != std::string::npos; pos = out.find(slot, pos)) {
    const std::string rendered = bad_answers.render();
    out.replace(pos, slot.size(), rendered);
    pos += rendered.size();
  }
  return out;
}

std::string normalize_concept(const std::string &reply) {
  std::string line;
  {
    std::istringstream in(reply);
    std::string l;
    while (std::getline(in, l)) {
      if (!trim(l).empty()) {
        line = l;
        break;
      }
    }
  }
  line = strip_wrapping(line);
  for (const char *prefix : {"concept:", "answer:", "the concept is"}) {
    if (starts_with_ci(line, prefix)) {
      line = strip_wrapping(line.substr(std::string(prefix).size()));
    }
  }
  auto words = split_words(to_lower(line));
  while (!words.empty() && (words.front() == "a" || words.front() == "an" || words.front() == "the")) {
    words.erase(words.begin());
  }
  if (words.size() > max_concept_words) {
    words.resize(max_concept_words);
  }
  std::string out;
  for (const auto &w : words) {
    out += (out.empty() ? "" : " ") + w;
  }
  return strip_wrapping(out);
}

ConceptProposal propose_concept(const NeuronRef &neuron, const Bytes &grid_png,
                                std::vector<std::size_t> exemplar_indices,
                                const BadAnswerList &bad_answers, BackendClient &client,
                                const ProposerPrompt &prompt) {
  try {
    decode_image(grid_png);
  } catch (const DataError &e) {
    throw ParameterError(std::string("grid image is not a valid PNG: ") + e.what());
  }
  const BackendRequest request{RequestKind::propose, prompt.render(bad_answers), grid_png,
                               nlohmann::json::object()};
  ConceptProposal proposal;
  proposal.neuron = neuron;
  proposal.exemplar_indices = std::move(exemplar_indices);
  proposal.prompt_digest = request_digest(request);

  const BackendResponse response = client.call(request);
  if (response.refusal) {
    proposal.refusal = true;
    proposal.raw_response = response.provenance;
    return proposal;
  }
  proposal.raw_response = response.text();
  std::string concept_name = normalize_concept(proposal.raw_response);
  if (concept_name.empty()) {
    proposal.refusal = true;
    return proposal;
  }
  proposal.generic_flag = bad_answers.matches(concept_name);
  proposal.concept_name = std::move(concept_name);
  return proposal;
}

void to_json(nlohmann::json &j, const ConceptProposal &p) {
  j = nlohmann::json{{"neuron", p.neuron},
                     {"concept", p.concept_name ? nlohmann::json(*p.concept_name) : nullptr},
                     {"refusal", p.refusal},
                     {"generic", p.generic_flag},
                     {"prompt_digest", p.prompt_digest},
                     {"exemplar_indices", p.exemplar_indices},
                     {"raw_response", p.raw_response}};
}

void from_json(const nlohmann::json &j, ConceptProposal &p) {
  j.at("neuron").get_to(p.neuron);
  if (j.at("concept").is_null()) {
    p.concept_name.reset();
  } else {
    p.concept_name = j.at("concept").get<std::string>();
  }
  j.at("refusal").get_to(p.refusal);
  p.generic_flag = j.value("generic", false);
  p.prompt_digest = j.value("prompt_digest", std::string{});
  p.exemplar_indices = j.value("exemplar_indices", std::vector<std::size_t>{});
  p.raw_response = j.value("raw_response", std::string{});
  if (p.refusal == p.concept_name.has_value()) {
    throw ValidationError("proposal must carry a concept iff it is not a refusal");
  }
}

} // namespace neurolens
