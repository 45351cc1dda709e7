#include "neurolens/report_tools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace neurolens {

namespace fs = std::filesystem;

std::vector<ValidationReport> load_reports(const fs::path &dir) {
  if (!fs::is_directory(dir)) {
    throw ParameterError("report directory not found: " + dir.string());
  }
  std::vector<fs::path> paths;
  for (const auto &e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == "report.json") {
      paths.push_back(e.path());
    }
  }
  if (paths.empty()) {
    throw ParameterError("no report.json files under " + dir.string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<ValidationReport> out;
  for (const auto &p : paths) {
    try {
      out.push_back(report_from_json(nlohmann::json::parse(read_text_file(p))));
    } catch (const nlohmann::json::exception &e) {
      throw FormatError(p.string() + ": " + e.what());
    }
  }
  return out;
}

std::size_t histogram_bin(double score) {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw ParameterError("score outside [0, 1]");
  }
  return std::min<std::size_t>(histogram_bins - 1,
                               static_cast<std::size_t>(std::floor(score * 20.0 + 1e-9)));
}

ScoreHistogram score_histogram(std::span<const ValidationReport> reports) {
  ScoreHistogram h;
  for (const auto &r : reports) {
    ++h.counts[histogram_bin(r.score)];
    h.refusals += r.refusal ? 1 : 0;
    ++h.total;
  }
  return h;
}

std::string render_histogram(const ScoreHistogram &h, bool csv) {
  std::ostringstream out;
  char edge[16];
  if (csv) {
    out << "bin,count\n";
  }
  for (std::size_t b = 0; b < histogram_bins; ++b) {
    std::snprintf(edge, sizeof edge, "%.2f", static_cast<double>(b) * 0.05);
    if (csv) {
      out << edge << "," << h.counts[b] << "\n";
    } else {
      out << edge << "  " << h.counts[b];
      if (b == 0 && h.refusals > 0) {
        out << "  (" << h.refusals << " refusal" << (h.refusals == 1 ? "" : "s") << ")";
      }
      out << "\n";
    }
  }
  if (csv) {
    out << "refusals," << h.refusals << "\ntotal," << h.total << "\n";
  } else {
    out << "refusals: " << h.refusals << "\ntotal: " << h.total << "\n";
  }
  return out.str();
}

WordStats word_stats(std::span<const std::string> concepts, std::size_t top_k) {
  std::map<std::string, std::size_t> counts;
  WordStats s;
  for (const auto &c : concepts) {
    for (const auto &w : split_words(to_lower(c))) {
      ++counts[w];
      ++s.tokens;
    }
  }
  s.vocab = counts.size();
  for (const auto &[w, n] : counts) {
    s.hapax += n == 1 ? 1 : 0;
    s.top.emplace_back(w, n);
  }
  std::stable_sort(s.top.begin(), s.top.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  if (s.top.size() > top_k) {
    s.top.resize(top_k);
  }
  return s;
}

std::vector<std::string> report_concepts(std::span<const ValidationReport> reports) {
  std::vector<std::string> out;
  for (const auto &r : reports) {
    if (!r.refusal && r.concept_name) {
      out.push_back(*r.concept_name);
    }
  }
  return out;
}

std::string render_word_stats(const WordStats &s, bool csv) {
  std::ostringstream out;
  if (csv) {
    out << "stat,value\ntokens," << s.tokens << "\nvocab," << s.vocab << "\nhapax," << s.hapax
        << "\n\nword,count\n";
    for (const auto &[w, n] : s.top) {
      out << w << "," << n << "\n";
    }
  } else {
    out << "tokens: " << s.tokens << "\nvocab: " << s.vocab << "\nhapax: " << s.hapax
        << "\ntop words:\n";
    for (const auto &[w, n] : s.top) {
      out << "  " << w << "  " << n << "\n";
    }
  }
  return out.str();
}

} // namespace neurolens
