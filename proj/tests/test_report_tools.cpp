#include "doctest.h"
#include "neurolens/report_tools.hpp"
#include "support.hpp"

using namespace neurolens;

namespace {

ValidationReport report(double score, std::optional<std::string> concept_name) {
  ValidationReport r;
  r.score = score;
  r.refusal = !concept_name;
  r.concept_name = std::move(concept_name);
  return r;
}

} // namespace

TEST_SUITE("report_tools") {

TEST_CASE("bins are 0.05 wide and 1.0 has its own bin") {
  CHECK(histogram_bin(0.0) == 0);
  CHECK(histogram_bin(0.049) == 0);
  CHECK(histogram_bin(0.05) == 1);
  CHECK(histogram_bin(0.5) == 10);
  CHECK(histogram_bin(0.15) == 3);
  CHECK(histogram_bin(0.999) == 19);
  CHECK(histogram_bin(1.0) == 20);
  CHECK_THROWS_AS(histogram_bin(1.5), ParameterError);
}

TEST_CASE("scores 0, 0.5 and 1.0 land in three bins") {
  const std::vector<ValidationReport> rs{report(0.0, std::nullopt), report(0.5, "a"), report(1.0, "b")};
  const auto h = score_histogram(rs);
  CHECK(h.counts[0] == 1);
  CHECK(h.counts[10] == 1);
  CHECK(h.counts[20] == 1);
  CHECK(h.refusals == 1);
  CHECK(h.total == 3);
  const auto text = render_histogram(h, false);
  CHECK(text.find("0.00  1  (1 refusal)") != std::string::npos);
  CHECK(text.find("0.50  1") != std::string::npos);
  CHECK(text.find("1.00  1") != std::string::npos);
  CHECK(render_histogram(h, true).find("1.00,1") != std::string::npos);
}

TEST_CASE("all refusals put all mass at zero") {
  const std::vector<ValidationReport> rs(4, report(0.0, std::nullopt));
  const auto h = score_histogram(rs);
  CHECK(h.counts[0] == 4);
  CHECK(h.refusals == 4);
}

TEST_CASE("histogram conserves the report count") {
  testing::Gen g(4);
  std::vector<ValidationReport> rs;
  for (int i = 0; i < 137; ++i) {
    rs.push_back(report(g.uniform(), "x"));
  }
  const auto h = score_histogram(rs);
  std::size_t sum = 0;
  for (auto c : h.counts) {
    sum += c;
  }
  CHECK(sum == rs.size());
}

TEST_CASE("word stats examples") {
  const std::vector<std::string> two{"red car", "red barn"};
  const auto s = word_stats(two);
  CHECK(s.vocab == 3);
  CHECK(s.hapax == 2);
  REQUIRE(!s.top.empty());
  CHECK(s.top[0] == std::pair<std::string, std::size_t>{"red", 2});
  const std::vector<std::string> dog{"Dog"};
  CHECK(word_stats(dog).vocab == 1);
  CHECK(word_stats(dog).hapax == 1);
  const std::vector<std::string> none;
  CHECK(word_stats(none).vocab == 0);
  CHECK(word_stats(none).hapax == 0);
  CHECK(word_stats(none).top.empty());
}

TEST_CASE("reports load from a directory tree; refusals carry no concept") {
  testing::TempDir dir("reports");
  std::filesystem::create_directories(dir / "n0");
  std::filesystem::create_directories(dir / "n1");
  write_file_atomic(dir / "n0/report.json", serialize_report(report(0.5, "red car")));
  write_file_atomic(dir / "n1/report.json", serialize_report(report(0.0, std::nullopt)));
  const auto rs = load_reports(dir.path());
  REQUIRE(rs.size() == 2);
  CHECK(report_concepts(rs) == std::vector<std::string>{"red car"});
  testing::TempDir empty("empty");
  CHECK_THROWS_AS(load_reports(empty.path()), ParameterError);
}

} // TEST_SUITE
