#pragma once

#include "neurolens/validator.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace neurolens {

// Every report.json below `dir`, ordered by path. Throws ParameterError when none exist.
std::vector<ValidationReport> load_reports(const std::filesystem::path &dir);

inline constexpr std::size_t histogram_bins = 21;

// 0.05-wide bins labelled by their lower edge; the last bin holds exactly 1.0.
struct ScoreHistogram {
  std::array<std::size_t, histogram_bins> counts{};
  std::size_t refusals = 0; // also counted in the 0.00 bin
  std::size_t total = 0;
};

std::size_t histogram_bin(double score);
ScoreHistogram score_histogram(std::span<const ValidationReport> reports);
std::string render_histogram(const ScoreHistogram &h, bool csv);

struct WordStats {
  std::size_t tokens = 0;
  std::size_t vocab = 0;
  std::size_t hapax = 0;
  // Most frequent first, ties alphabetical.
  std::vector<std::pair<std::string, std::size_t>> top;
};

WordStats word_stats(std::span<const std::string> concepts, std::size_t top_k = 10);
// Concepts of the non-refused reports.
std::vector<std::string> report_concepts(std::span<const ValidationReport> reports);
std::string render_word_stats(const WordStats &s, bool csv);

} // namespace neurolens
