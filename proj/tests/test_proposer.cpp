#include "doctest.h"
#include "neurolens/image.hpp"
#include "neurolens/proposer.hpp"
#include "support.hpp"

using namespace neurolens;

namespace {

const Bytes &grid_png() {
  static const Bytes png = encode_png(Image(4, 4, {10, 20, 30}));
  return png;
}

ConceptProposal ask(const std::string &reply) {
  auto t = std::make_shared<testing::ScriptedTransport>();
  t->push_text(reply);
  auto client = testing::instant_client(t);
  return propose_concept({"m", "l", 1}, grid_png(), {4, 2}, BadAnswerList::defaults(), *client);
}

} // namespace

TEST_SUITE("proposer") {

TEST_CASE("reply 'Golden Retriever.' becomes a bare lowercase phrase") {
  const auto p = ask("Golden Retriever.");
  CHECK(p.concept_name == "golden retriever");
  CHECK(!p.generic_flag);
  CHECK(!p.refusal);
  CHECK(p.exemplar_indices == std::vector<std::size_t>{4, 2});
}

TEST_CASE("generic answers are flagged") {
  CHECK(ask("a variety of objects in different settings").generic_flag);
  CHECK(ask("This image features a variety of objects in different settings.").generic_flag);
  CHECK(ask("A collage of images").generic_flag);
  CHECK(!ask("red barns").generic_flag);
}

TEST_CASE("refusals carry no concept") {
  for (const char *reply : {"I'm sorry, I cannot identify a common concept.", "REFUSE"}) {
    const auto p = ask(reply);
    CHECK(p.refusal);
    CHECK(!p.concept_name);
  }
}

TEST_CASE("normalization strips wrapping, labels and articles, caps length") {
  CHECK(normalize_concept("\"The Red Sedans!\"") == "red sedans");
  CHECK(normalize_concept("Concept: an apple tree\nbecause ...") == "apple tree");
  CHECK(normalize_concept("\xE2\x80\x9CStriped socks\xE2\x80\x9D") == "striped socks");
  const auto long_reply = normalize_concept(
      "one two three four five six seven eight nine ten eleven twelve thirteen fourteen");
  CHECK(split_words(long_reply).size() == max_concept_words);
}

TEST_CASE("prompt embeds every bad answer and the refusal keyword") {
  const auto bad = BadAnswerList::from_lines("# comment\nplain things\n\nstuff on a table\n");
  CHECK(bad.phrases().size() == 2);
  const auto text = ProposerPrompt::defaults().render(bad);
  CHECK(text.find("- plain things") != std::string::npos);
  CHECK(text.find("- stuff on a table") != std::string::npos);
  CHECK(text.find("REFUSE") != std::string::npos);
  CHECK(text.find("{bad_answers}") == std::string::npos);
  CHECK_THROWS_AS(BadAnswerList({}), ParameterError);
  std::string long_phrase;
  for (int i = 0; i < 21; ++i) {
    long_phrase += "word ";
  }
  CHECK_THROWS_AS(BadAnswerList({long_phrase}), ParameterError);
}

TEST_CASE("invalid grid bytes are rejected before any call") {
  auto t = std::make_shared<testing::ScriptedTransport>();
  auto client = testing::instant_client(t);
  CHECK_THROWS_AS(propose_concept({}, Bytes{1, 2, 3}, {}, BadAnswerList::defaults(), *client),
                  ParameterError);
  CHECK(t->requests.empty());
}

TEST_CASE("same grid and prompt give the same request digest and proposal") {
  const auto a = ask("Dogs");
  const auto b = ask("Dogs");
  CHECK(a.prompt_digest == b.prompt_digest);
  CHECK(nlohmann::json(a) == nlohmann::json(b));
}

TEST_CASE("json round trip enforces concept iff not refused") {
  const auto p = ask("Dogs");
  const auto back = nlohmann::json(p).get<ConceptProposal>();
  CHECK(back.concept_name == "dogs");
  auto j = nlohmann::json(p);
  j["refusal"] = true;
  CHECK_THROWS_AS(j.get<ConceptProposal>(), ValidationError);
}

} // TEST_SUITE
