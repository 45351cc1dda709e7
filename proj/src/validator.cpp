#include "neurolens/validator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

namespace neurolens {

namespace {

const std::set<std::string> &colour_words() {
  static const std::set<std::string> words{"red",   "orange", "yellow", "green", "blue",
                                           "purple", "pink",  "brown",  "black", "white",
                                           "gray",  "grey",   "violet", "beige"};
  return words;
}

std::string strip_token(std::string t) {
  auto junk = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) && c != '-' && c != '\'';
  };
  while (!t.empty() && junk(t.back())) {
    t.pop_back();
  }
  std::size_t b = 0;
  while (b < t.size() && junk(t[b])) {
    ++b;
  }
  return t.substr(b);
}

std::string singular(std::string t) {
  if (t.size() > 4 && t.ends_with("ies")) {
    return t.substr(0, t.size() - 3) + "y";
  }
  if (t.size() > 3 && t.back() == 's' && !t.ends_with("ss")) {
    t.pop_back();
  }
  return t;
}

bool contains_sequence(const std::vector<std::string> &hay, const std::vector<std::string> &needle) {
  if (needle.empty() || needle.size() > hay.size()) {
    return false;
  }
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

bool same_phrase(const std::string &a, const std::string &b) {
  return lint_tokens(a) == lint_tokens(b);
}

bool starts_with_ci(const std::string &s, const std::string &prefix) {
  return s.size() >= prefix.size() && to_lower(s.substr(0, prefix.size())) == prefix;
}

std::string join(const std::vector<std::string> &items, const std::string &sep) {
  std::string out;
  for (const auto &i : items) {
    out += (out.empty() ? "" : sep) + i;
  }
  return out;
}

const std::regex &list_item_pattern() {
  static const std::regex re(R"(^\s*(?:\d+\s*[.):]|[-*])\s*(.+?)\s*$)");
  return re;
}

const std::regex &numbering_prefix() {
  static const std::regex re(R"(^\s*(?:\d+\s*[.):]|[-*])?\s*)");
  return re;
}

} // namespace

const ContainmentTable &default_containment_table() {
  static const ContainmentTable table{
      {"line", {"rectangle", "square", "triangle", "polygon", "grid", "stripe", "star", "cross",
                "letter", "checkerboard"}},
      {"corner", {"rectangle", "square", "triangle", "polygon", "box", "cube"}},
      {"circle", {"ring", "wheel", "bullseye", "target", "clock face"}},
      {"wheel", {"car", "bicycle", "truck", "bus", "motorcycle", "train"}},
      {"face", {"portrait", "person", "crowd", "selfie"}},
      {"leaf", {"tree", "plant", "bush", "forest"}},
      {"window", {"building", "house", "skyscraper"}},
  };
  return table;
}

std::vector<std::string> lint_tokens(const std::string &phrase) {
  std::vector<std::string> out;
  for (auto &w : split_words(to_lower(phrase))) {
    std::string t = strip_token(w);
    if (!t.empty()) {
      out.push_back(singular(std::move(t)));
    }
  }
  return out;
}

bool mentions(const std::string &text, const std::string &phrase) {
  return contains_sequence(lint_tokens(text), lint_tokens(phrase));
}

bool non_exclusive(const std::string &concept_name, const std::string &cohyponym,
                   const ContainmentTable &table) {
  if (mentions(concept_name, cohyponym) || mentions(cohyponym, concept_name)) {
    return true;
  }
  for (const auto &[part, wholes] : table) {
    for (const auto &whole : wholes) {
      if ((same_phrase(concept_name, part) && mentions(cohyponym, whole)) ||
          (same_phrase(cohyponym, part) && mentions(concept_name, whole))) {
        return true;
      }
    }
  }
  return false;
}

bool broad_hypernym(const std::string &concept_name, const std::string &hypernym) {
  const auto c = lint_tokens(concept_name);
  if (c.size() < 2 || colour_words().count(c.front()) == 0) {
    return false;
  }
  const auto h = lint_tokens(hypernym);
  return std::find(h.begin(), h.end(), c.back()) == h.end();
}

std::vector<std::string> caption_lint(const CaptionPair &pair) {
  std::vector<std::string> problems;
  if (!mentions(pair.concept_caption, pair.concept_name)) {
    problems.push_back("concept caption does not mention '" + pair.concept_name + "'");
  }
  if (mentions(pair.concept_caption, pair.cohyponym)) {
    problems.push_back("concept caption mentions '" + pair.cohyponym + "'");
  }
  if (!mentions(pair.cohyponym_caption, pair.cohyponym)) {
    problems.push_back("co-hyponym caption does not mention '" + pair.cohyponym + "'");
  }
  if (mentions(pair.cohyponym_caption, pair.concept_name)) {
    problems.push_back("co-hyponym caption mentions '" + pair.concept_name + "'");
  }
  return problems;
}

std::string cohyponym_prompt(const std::string &concept_name, std::size_t n) {
  std::ostringstream p;
  p << "We are collecting hard negative examples for a visual concept.\n"
       "Work in two steps. First, give a hypernym of the concept: the narrowest broader "
       "category that contains it. Keep every attribute that the concept specifies, so the "
       "hypernym is not broader than needed. Second, list concepts that share that same "
       "hypernym (co-hyponyms). Each co-hyponym must be visually distinct from the concept, "
       "must not contain the concept, and must not be contained in it.\n"
       "\n"
       "Concept: \"golden retriever\"\n"
       "Hypernym: dog\n"
       "Co-hyponyms:\n"
       "1. pembroke\n2. beagle\n3. dalmatian\n4. poodle\n5. siberian husky\n"
       "\n"
       "Concept: \"red sedans\"\n"
       "Hypernym: sedans of a particular color\n"
       "Co-hyponyms:\n"
       "1. blue sedans\n2. white sedans\n3. black sedans\n4. silver sedans\n5. green sedans\n"
       "\n"
       "Concept: \"lines\"\n"
       "Hypernym: shapes\n"
       "Co-hyponyms:\n"
       "1. circles\n2. dots\n3. ovals\n4. crescents\n5. blobs\n"
       "\n"
       "Answer in exactly the same format for the concept below, listing "
    << n << " co-hyponyms.\n"
       "Concept: \""
    << concept_name << "\"\nCount: " << n << "\n";
  return p.str();
}

std::string caption_prompt(const std::string &concept_name, const std::string &cohyponym,
                           std::size_t pairs) {
  std::ostringstream p;
  p << "Write " << pairs
    << " pairs of captions for a text-to-image model. In each pair, the concept caption "
       "describes a photo that clearly shows the concept and neither shows nor mentions the "
       "co-hyponym. The co-hyponym caption describes a similar photo that clearly shows the "
       "co-hyponym and neither shows nor mentions the concept. Use a different scene for "
       "each pair.\n"
       "\n"
       "Concept: \""
    << concept_name << "\"\nCo-hyponym: \"" << cohyponym << "\"\nPairs: " << pairs
    << "\n\n"
       "Reply with one block per pair:\n"
       "1. Concept caption: <caption>\n"
       "   Co-hyponym caption: <caption>\n";
  return p.str();
}

std::string with_feedback(const std::string &prompt, const std::vector<std::string> &problems) {
  return prompt + "\nYour previous answer had these problems; avoid them:\n- " +
         join(problems, "\n- ") + "\n";
}

ParsedCohyponyms parse_cohyponym_reply(const std::string &reply) {
  ParsedCohyponyms out;
  std::istringstream in(reply);
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (starts_with_ci(t, "hypernym:")) {
      out.hypernym = normalize_concept(t.substr(9));
      out.items.clear();
    } else if (starts_with_ci(t, "co-hyponyms:") || starts_with_ci(t, "cohyponyms:")) {
      const std::string rest = trim(t.substr(t.find(':') + 1));
      std::istringstream items(rest);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = normalize_concept(item);
        if (!item.empty()) {
          out.items.push_back(item);
        }
      }
    } else if (std::regex_match(t, m, list_item_pattern())) {
      const std::string item = normalize_concept(m[1].str());
      if (!item.empty()) {
        out.items.push_back(item);
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_caption_reply(const std::string &reply) {
  std::vector<std::pair<std::string, std::string>> out;
  std::optional<std::string> pending;
  std::istringstream in(reply);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(std::regex_replace(line, numbering_prefix(), "",
                                                 std::regex_constants::format_first_only));
    auto value = [&](std::size_t skip) { return trim(t.substr(skip)); };
    if (starts_with_ci(t, "concept caption:")) {
      pending = value(16);
    } else if (starts_with_ci(t, "co-hyponym caption:")) {
      if (pending) {
        out.emplace_back(*pending, value(19));
        pending.reset();
      }
    } else if (starts_with_ci(t, "cohyponym caption:")) {
      if (pending) {
        out.emplace_back(*pending, value(18));
        pending.reset();
      }
    }
  }
  return out;
}

CohyponymSet generate_cohyponyms(const std::string &concept_name, std::size_t n,
                                 BackendClient &llm, const ContainmentTable &table) {
  if (trim(concept_name).empty()) {
    throw ParameterError("concept must be non-empty");
  }
  if (n == 0) {
    throw ParameterError("co-hyponym count must be positive");
  }
  struct Attempt {
    std::string hypernym;
    bool broad = false;
    std::vector<std::string> clean;
    std::vector<std::string> flagged;
    std::vector<std::string> problems;
  };
  auto run = [&](const std::string &prompt) {
    const auto response = llm.call({RequestKind::cohyponym, prompt, std::nullopt, nlohmann::json::object()});
    const auto parsed = parse_cohyponym_reply(response.text());
    Attempt a;
    a.hypernym = parsed.hypernym;
    if (a.hypernym.empty()) {
      a.problems.push_back("no hypernym was given");
    } else if (broad_hypernym(concept_name, a.hypernym)) {
      a.broad = true;
      a.problems.push_back("the hypernym '" + a.hypernym + "' is broader than needed");
    }
    std::vector<std::string> seen;
    for (const auto &item : parsed.items) {
      if (same_phrase(item, concept_name)) {
        a.problems.push_back("the concept itself was listed");
        continue;
      }
      if (std::any_of(seen.begin(), seen.end(),
                      [&](const std::string &s) { return same_phrase(s, item); })) {
        continue;
      }
      seen.push_back(item);
      if (non_exclusive(concept_name, item, table)) {
        a.flagged.push_back(item);
        a.problems.push_back("'" + item + "' is not exclusive of '" + concept_name + "'");
      } else {
        a.clean.push_back(item);
      }
    }
    if (a.clean.size() < n) {
      a.problems.push_back("only " + std::to_string(a.clean.size()) + " of " +
                           std::to_string(n) + " usable co-hyponyms");
    }
    return a;
  };

  const std::string prompt = cohyponym_prompt(concept_name, n);
  Attempt first = run(prompt);
  std::optional<Attempt> second;
  if (!first.problems.empty()) {
    second = run(with_feedback(prompt, first.problems));
  }

  const Attempt *primary = &first;
  const Attempt *secondary = second ? &*second : nullptr;
  if (second && (first.broad || first.hypernym.empty()) && !second->broad &&
      !second->hypernym.empty()) {
    primary = &*second;
    secondary = &first;
  }

  CohyponymSet set;
  set.concept_name = concept_name;
  set.hypernym = !primary->hypernym.empty() || secondary == nullptr ? primary->hypernym
                                                                    : secondary->hypernym;
  auto add = [&](const std::string &item, bool flagged) {
    if (set.cohyponyms.size() >= n ||
        std::any_of(set.cohyponyms.begin(), set.cohyponyms.end(),
                    [&](const std::string &s) { return same_phrase(s, item); })) {
      return;
    }
    set.cohyponyms.push_back(item);
    if (flagged) {
      set.flags.push_back("non-exclusive:" + item);
    }
  };
  for (const Attempt *a : {primary, secondary}) {
    if (a != nullptr) {
      for (const auto &item : a->clean) {
        add(item, false);
      }
    }
  }
  for (const Attempt *a : {primary, secondary}) {
    if (a != nullptr) {
      for (const auto &item : a->flagged) {
        add(item, true);
      }
    }
  }
  if (set.hypernym.empty()) {
    set.flags.push_back("missing-hypernym");
  } else if (broad_hypernym(concept_name, set.hypernym)) {
    set.flags.push_back("broad-hypernym:" + set.hypernym);
  }
  if (set.cohyponyms.size() < n) {
    set.flags.push_back("partial-cohyponyms:" + std::to_string(set.cohyponyms.size()) + "/" +
                        std::to_string(n));
  }
  return set;
}

std::vector<CaptionPair> generate_caption_pairs(const std::string &concept_name,
                                                const std::string &cohyponym, std::size_t pairs,
                                                BackendClient &llm, std::size_t cohyponym_index) {
  if (same_phrase(concept_name, cohyponym) || to_lower(trim(concept_name)) == to_lower(trim(cohyponym))) {
    throw ParameterError("concept and co-hyponym must differ ('" + concept_name + "')");
  }
  if (pairs == 0) {
    throw ParameterError("caption pair count must be positive");
  }
  struct Attempt {
    std::vector<CaptionPair> clean;
    std::vector<CaptionPair> flagged;
    std::vector<std::string> problems;
  };
  auto run = [&](const std::string &prompt) {
    const auto response = llm.call({RequestKind::caption, prompt, std::nullopt, nlohmann::json::object()});
    Attempt a;
    for (const auto &[c, h] : parse_caption_reply(response.text())) {
      CaptionPair pair{concept_name, cohyponym, c, h, cohyponym_index, 0, {}};
      const auto problems = caption_lint(pair);
      if (problems.empty()) {
        a.clean.push_back(std::move(pair));
      } else {
        for (const auto &p : problems) {
          pair.flags.push_back("caption-lint:" + p);
          a.problems.push_back(p);
        }
        a.flagged.push_back(std::move(pair));
      }
    }
    if (a.clean.size() < pairs) {
      a.problems.push_back("only " + std::to_string(a.clean.size()) + " of " +
                           std::to_string(pairs) + " caption pairs were usable");
    }
    return a;
  };

  const std::string prompt = caption_prompt(concept_name, cohyponym, pairs);
  Attempt first = run(prompt);
  std::optional<Attempt> second;
  if (!first.problems.empty()) {
    second = run(with_feedback(prompt, first.problems));
  }
  std::vector<CaptionPair> out;
  auto take = [&](const std::vector<CaptionPair> &from) {
    for (const auto &p : from) {
      if (out.size() < pairs) {
        out.push_back(p);
      }
    }
  };
  take(first.clean);
  if (second) {
    take(second->clean);
  }
  take(first.flagged);
  if (second) {
    take(second->flagged);
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].pair_index = j;
  }
  return out;
}

namespace {

void build_sets_into(std::span<const CaptionPair> pairs, BackendClient &diffusion,
                     std::size_t images_per_caption, const ActivationFn &activation_fn,
                     const std::string &uri_prefix, const ImageSink &sink, int inference_steps,
                     ValidationSets &sets) {
  if (images_per_caption == 0) {
    throw ParameterError("images per caption must be positive");
  }
  if (!activation_fn) {
    throw ParameterError("validation needs an activation function");
  }
  for (const auto &pair : pairs) {
    for (const bool positive : {true, false}) {
      const std::string &caption = positive ? pair.concept_caption : pair.cohyponym_caption;
      const std::string slot = std::string(positive ? "pos" : "neg") + "/c" +
                               std::to_string(pair.cohyponym_index) + "/p" +
                               std::to_string(pair.pair_index);
      std::vector<Bytes> images;
      try {
        images = generate_images(diffusion, caption, images_per_caption,
                                 {{"num_inference_steps", inference_steps}});
      } catch (const PartialResultError &e) {
        sets.flags.push_back("image-generation:" + slot + ": " + e.what());
        continue;
      }
      auto &target = positive ? sets.positives : sets.negatives;
      for (std::size_t k = 0; k < images.size(); ++k) {
        GeneratedImage img{uri_prefix + slot + "/" + std::to_string(k) + ".png",
                           std::move(images[k])};
        if (sink) {
          sink(img);
        }
        const double a = activation_fn(img);
        if (!std::isfinite(a)) {
          throw DataError("non-finite activation for " + img.uri);
        }
        target.push_back({img.uri, a});
      }
    }
  }
  const std::size_t expected = pairs.size() * images_per_caption;
  if (sets.positives.size() < expected || sets.negatives.size() < expected) {
    sets.flags.push_back("realized-sizes:" + std::to_string(sets.positives.size()) + "/" +
                         std::to_string(sets.negatives.size()) + " of " +
                         std::to_string(expected));
  }
}

} // namespace

ValidationSets build_validation_sets(std::span<const CaptionPair> pairs, BackendClient &diffusion,
                                     std::size_t images_per_caption,
                                     const ActivationFn &activation_fn,
                                     const std::string &uri_prefix, const ImageSink &sink,
                                     int inference_steps) {
  ValidationSets sets;
  build_sets_into(pairs, diffusion, images_per_caption, activation_fn, uri_prefix, sink,
                  inference_steps, sets);
  return sets;
}

DominanceCount dominance_count(std::span<const double> positives,
                               std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw ParameterError("dominance score needs non-empty example and non-example sets");
  }
  auto finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(positives) || !finite(negatives)) {
    throw ParameterError("dominance score needs finite activations");
  }
  std::vector<double> pos(positives.begin(), positives.end());
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  DominanceCount c;
  c.pairs = static_cast<std::uint64_t>(pos.size()) * neg.size();
  std::size_t below = 0;
  for (double p : pos) {
    while (below < neg.size() && neg[below] < p) {
      ++below;
    }
    c.wins += below;
  }
  return c;
}

double dominance_score(std::span<const double> positives, std::span<const double> negatives) {
  const auto c = dominance_count(positives, negatives);
  return static_cast<double>(c.wins) / static_cast<double>(c.pairs);
}

ValidationReport validate_concept(const NeuronRef &neuron, const ConceptProposal &proposal,
                                  const BackendBundle &backends, const ValidationParams &params,
                                  const ActivationFn &activation_fn, const ImageSink &sink,
                                  const std::string &uri_prefix,
                                  const std::optional<CohyponymSet> &cohyponyms) {
  if (!(proposal.neuron == neuron)) {
    throw ParameterError("proposal belongs to neuron " +
                         std::to_string(proposal.neuron.neuron_index) + ", not " +
                         std::to_string(neuron.neuron_index));
  }
  ValidationReport report;
  report.neuron = neuron;
  report.concept_name = proposal.concept_name;
  report.refusal = proposal.refusal || !proposal.concept_name;
  if (report.refusal) {
    report.concept_name.reset();
    report.score = 0.0;
    return report;
  }
  if (proposal.generic_flag) {
    report.flags.push_back("generic-concept");
  }
  const std::string &concept_name = *report.concept_name;
  std::string stage = "cohyponyms";
  try {
    CohyponymSet set = cohyponyms ? *cohyponyms
                                  : generate_cohyponyms(concept_name, params.cohyponyms,
                                                        *backends.llm);
    report.hypernym = set.hypernym;
    report.cohyponyms = set.cohyponyms;
    report.flags.insert(report.flags.end(), set.flags.begin(), set.flags.end());

    stage = "captions";
    for (std::size_t i = 0; i < set.cohyponyms.size(); ++i) {
      auto pairs = generate_caption_pairs(concept_name, set.cohyponyms[i], params.caption_pairs,
                                          *backends.llm, i);
      if (pairs.size() < params.caption_pairs) {
        report.flags.push_back("partial-captions:" + set.cohyponyms[i] + ":" +
                               std::to_string(pairs.size()) + "/" +
                               std::to_string(params.caption_pairs));
      }
      for (const auto &p : pairs) {
        if (!p.flags.empty()) {
          report.flags.push_back("caption-lint:" + set.cohyponyms[i] + "/p" +
                                 std::to_string(p.pair_index));
        }
      }
      report.caption_pairs.insert(report.caption_pairs.end(), pairs.begin(), pairs.end());
    }

    stage = "images";
    build_sets_into(report.caption_pairs, *backends.diffusion, params.images_per_caption,
                    activation_fn, uri_prefix, sink, params.inference_steps, report.sets);
    report.flags.insert(report.flags.end(), report.sets.flags.begin(), report.sets.flags.end());
  } catch (const TransportError &e) {
    report.errors.push_back(stage + ": " + e.what());
    report.infrastructure_error = true;
  } catch (const CacheMissError &e) {
    report.errors.push_back(stage + ": " + e.what());
    report.infrastructure_error = true;
  } catch (const ProtocolError &e) {
    report.errors.push_back(stage + ": " + e.what());
    report.infrastructure_error = true;
  } catch (const Error &e) {
    report.errors.push_back(stage + ": " + e.what());
  }

  if (!report.sets.positives.empty() && !report.sets.negatives.empty()) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (const auto &s : report.sets.positives) {
      pos.push_back(s.activation);
    }
    for (const auto &s : report.sets.negatives) {
      neg.push_back(s.activation);
    }
    report.score = dominance_score(pos, neg);
    if (!report.errors.empty()) {
      report.flags.push_back("partial-score");
    }
  } else {
    report.score = 0.0;
    report.flags.push_back("no-score");
  }
  return report;
}

nlohmann::json report_to_json(const ValidationReport &report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto &p : report.caption_pairs) {
    pairs.push_back({{"concept", p.concept_name},
                     {"cohyponym", p.cohyponym},
                     {"concept_caption", p.concept_caption},
                     {"cohyponym_caption", p.cohyponym_caption},
                     {"cohyponym_index", p.cohyponym_index},
                     {"pair_index", p.pair_index},
                     {"flags", p.flags}});
  }
  auto scored = [](const std::vector<ScoredImage> &v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto &s : v) {
      a.push_back({{"uri", s.uri}, {"activation", s.activation}});
    }
    return a;
  };
  return nlohmann::json{
      {"neuron", report.neuron},
      {"concept", report.concept_name ? nlohmann::json(*report.concept_name) : nullptr},
      {"refusal", report.refusal},
      {"hypernym", report.hypernym},
      {"cohyponyms", report.cohyponyms},
      {"caption_pairs", std::move(pairs)},
      {"positives", scored(report.sets.positives)},
      {"negatives", scored(report.sets.negatives)},
      {"score", report.score},
      {"flags", report.flags},
      {"errors", report.errors},
      {"infrastructure_error", report.infrastructure_error},
  };
}

ValidationReport report_from_json(const nlohmann::json &j) {
  ValidationReport r;
  j.at("neuron").get_to(r.neuron);
  if (!j.at("concept").is_null()) {
    r.concept_name = j.at("concept").get<std::string>();
  }
  j.at("refusal").get_to(r.refusal);
  r.hypernym = j.value("hypernym", std::string{});
  r.cohyponyms = j.value("cohyponyms", std::vector<std::string>{});
  for (const auto &p : j.value("caption_pairs", nlohmann::json::array())) {
    CaptionPair c;
    p.at("concept").get_to(c.concept_name);
    p.at("cohyponym").get_to(c.cohyponym);
    p.at("concept_caption").get_to(c.concept_caption);
    p.at("cohyponym_caption").get_to(c.cohyponym_caption);
    c.cohyponym_index = p.value("cohyponym_index", std::size_t{0});
    c.pair_index = p.value("pair_index", std::size_t{0});
    c.flags = p.value("flags", std::vector<std::string>{});
    r.caption_pairs.push_back(std::move(c));
  }
  for (const char *side : {"positives", "negatives"}) {
    auto &target = std::string(side) == "positives" ? r.sets.positives : r.sets.negatives;
    for (const auto &s : j.value(side, nlohmann::json::array())) {
      target.push_back({s.at("uri").get<std::string>(), s.at("activation").get<double>()});
    }
  }
  j.at("score").get_to(r.score);
  r.flags = j.value("flags", std::vector<std::string>{});
  r.errors = j.value("errors", std::vector<std::string>{});
  r.infrastructure_error = j.value("infrastructure_error", false);
  return r;
}

std::string serialize_report(const ValidationReport &report) {
  return report_to_json(report).dump(1) + "\n";
}

} // namespace neurolens
