#include "neurolens/config.hpp"

#include "neurolens/util.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace neurolens {

namespace {

namespace fs = std::filesystem;

std::size_t parse_count(const std::string &key, const std::string &v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) {
      return d;
    }
  } catch (const std::exception &) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

fs::path resolve(const std::string &v, const fs::path &base) {
  if (v.empty()) {
    return {};
  }
  fs::path p(v);
  return p.is_absolute() || base.empty() ? p : (base / p).lexically_normal();
}

using Setter = std::function<void(PipelineConfig &, const std::string &, const fs::path &)>;
using Getter = std::function<std::string(const PipelineConfig &)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T> Field count_field(T PipelineConfig::*member, const std::string &key) {
  return {[member, key](PipelineConfig &c, const std::string &v, const fs::path &) {
            c.*member = static_cast<T>(parse_count(key, v));
          },
          [member](const PipelineConfig &c) { return std::to_string(c.*member); }};
}

Field path_field(fs::path PipelineConfig::*member) {
  return {[member](PipelineConfig &c, const std::string &v, const fs::path &base) {
            c.*member = resolve(v, base);
          },
          [member](const PipelineConfig &c) { return (c.*member).string(); }};
}

Field string_field(std::string PipelineConfig::*member) {
  return {[member](PipelineConfig &c, const std::string &v, const fs::path &) { c.*member = v; },
          [member](const PipelineConfig &c) { return c.*member; }};
}

// Ordered so render_config output groups sections.
const std::vector<std::pair<std::string, Field>> &fields() {
  static const std::vector<std::pair<std::string, Field>> table{
      {"paths.manifest", path_field(&PipelineConfig::manifest)},
      {"paths.activations", path_field(&PipelineConfig::activations)},
      {"paths.embeddings", path_field(&PipelineConfig::embeddings)},
      {"paths.out", path_field(&PipelineConfig::out_dir)},
      {"model.model_id", string_field(&PipelineConfig::model_id)},
      {"model.layer_id", string_field(&PipelineConfig::layer_id)},
      {"exemplar.rank_k", count_field(&PipelineConfig::rank_k, "exemplar.rank_k")},
      {"exemplar.cap", count_field(&PipelineConfig::cap, "exemplar.cap")},
      {"select.m", count_field(&PipelineConfig::m, "select.m")},
      {"grid.cell_px", count_field(&PipelineConfig::cell_px, "grid.cell_px")},
      {"proposer.prompt_template", path_field(&PipelineConfig::prompt_template)},
      {"proposer.bad_answers", path_field(&PipelineConfig::bad_answers)},
      {"validation.cohyponyms", count_field(&PipelineConfig::cohyponyms, "validation.cohyponyms")},
      {"validation.caption_pairs",
       count_field(&PipelineConfig::caption_pairs, "validation.caption_pairs")},
      {"validation.images_per_caption",
       count_field(&PipelineConfig::images_per_caption, "validation.images_per_caption")},
      {"validation.inference_steps",
       count_field(&PipelineConfig::inference_steps, "validation.inference_steps")},
      {"backend.mode",
       {[](PipelineConfig &c, const std::string &v, const fs::path &) {
          c.mode = parse_backend_mode(v);
        },
        [](const PipelineConfig &c) { return to_string(c.mode); }}},
      {"backend.store", path_field(&PipelineConfig::store)},
      {"backend.mock_fallback", string_field(&PipelineConfig::mock_fallback)},
      {"backend.max_in_flight", count_field(&PipelineConfig::max_in_flight, "backend.max_in_flight")},
      {"backend.max_attempts", count_field(&PipelineConfig::max_attempts, "backend.max_attempts")},
      {"backend.timeout_s",
       {[](PipelineConfig &c, const std::string &v, const fs::path &) {
          c.timeout_s = parse_real("backend.timeout_s", v);
        },
        [](const PipelineConfig &c) {
          std::ostringstream o;
          o << c.timeout_s;
          return o.str();
        }}},
      {"run.neurons", string_field(&PipelineConfig::neurons)},
      {"run.jobs", count_field(&PipelineConfig::jobs, "run.jobs")},
  };
  return table;
}

const Field *find_field(const std::string &key) {
  for (const auto &[k, f] : fields()) {
    if (k == key) {
      return &f;
    }
  }
  return nullptr;
}

} // namespace

std::string to_string(BackendMode mode) {
  switch (mode) {
  case BackendMode::live:
    return "live";
  case BackendMode::mock:
    return "mock";
  case BackendMode::replay:
    return "replay";
  }
  return "?";
}

BackendMode parse_backend_mode(const std::string &name) {
  if (name == "live") {
    return BackendMode::live;
  }
  if (name == "mock") {
    return BackendMode::mock;
  }
  if (name == "replay") {
    return BackendMode::replay;
  }
  throw ConfigError("unknown backend mode '" + name + "' (expected live, mock or replay)");
}

std::optional<std::vector<std::size_t>> parse_neuron_range(const std::string &text) {
  const std::string t = trim(text);
  if (t == "all") {
    return std::nullopt;
  }
  std::vector<std::size_t> out;
  std::istringstream in(t);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (part.empty()) {
      throw ConfigError("empty entry in neuron range '" + text + "'");
    }
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_count("neurons", part));
      continue;
    }
    const std::size_t lo = parse_count("neurons", trim(part.substr(0, dash)));
    const std::size_t hi = parse_count("neurons", trim(part.substr(dash + 1)));
    if (hi < lo) {
      throw ConfigError("descending neuron range '" + part + "'");
    }
    for (std::size_t i = lo; i <= hi; ++i) {
      out.push_back(i);
    }
  }
  if (out.empty()) {
    throw ConfigError("neuron range '" + text + "' selects nothing");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void PipelineConfig::set(const std::string &key, const std::string &value,
                         const fs::path &base_dir) {
  const Field *f = find_field(key);
  if (f == nullptr) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  f->set(*this, value, base_dir);
}

void PipelineConfig::validate() const {
  if (rank_k == 0) {
    throw ConfigError("exemplar.rank_k must be positive");
  }
  if (cap < rank_k) {
    throw ConfigError("exemplar.cap must be at least exemplar.rank_k");
  }
  if (m == 0 || cell_px == 0) {
    throw ConfigError("select.m and grid.cell_px must be positive");
  }
  if (cohyponyms == 0 || caption_pairs == 0 || images_per_caption == 0 || inference_steps <= 0) {
    throw ConfigError("validation counts must be positive");
  }
  if (max_in_flight == 0 || max_attempts == 0 || jobs == 0) {
    throw ConfigError("backend.max_in_flight, backend.max_attempts and run.jobs must be positive");
  }
  if (!(timeout_s > 0.0)) {
    throw ConfigError("backend.timeout_s must be positive");
  }
  if (mock_fallback != "refuse" && mock_fallback != "error") {
    throw ConfigError("backend.mock_fallback must be refuse or error");
  }
  if (mode != BackendMode::live && store.empty()) {
    throw ConfigError("backend mode " + to_string(mode) + " requires backend.store");
  }
  parse_neuron_range(neurons);
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto &[k, f] : fields()) {
    j[k] = f.get(*this);
  }
  return j;
}

const std::vector<std::string> &config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto &[k, f] : fields()) {
      out.push_back(k);
    }
    return out;
  }();
  return keys;
}

PipelineConfig parse_config(const std::string &text, const fs::path &base_dir,
                            PipelineConfig defaults) {
  PipelineConfig c = std::move(defaults);
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError(where + "unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + "expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = trim(value.substr(0, hash));
    }
    try {
      c.set(section.empty() ? key : section + "." + key, value, base_dir);
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what());
    }
  }
  return c;
}

PipelineConfig load_config(const fs::path &path, PipelineConfig defaults) {
  if (!fs::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  return parse_config(read_text_file(path), path.parent_path(), std::move(defaults));
}

std::string render_config(const PipelineConfig &config) {
  std::ostringstream out;
  std::string section;
  for (const auto &[k, f] : fields()) {
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << "[" << s << "]\n";
      section = s;
    }
    out << k.substr(dot + 1) << " = \"" << f.get(config) << "\"\n";
  }
  return out.str();
}

} // namespace neurolens
