#include "neurolens/synth.hpp"

#include "neurolens/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace neurolens {

namespace {

// Draws from the engine directly so streams match across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

std::string numbered(const char *prefix, std::size_t i, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

const std::vector<Rgb> &palette() {
  static const std::vector<Rgb> colours = [] {
    std::vector<Rgb> cube;
    for (int r = 0; r < 6; ++r) {
      for (int g = 0; g < 6; ++g) {
        for (int b = 0; b < 6; ++b) {
          if (r == g && g == b) {
            continue;
          }
          cube.push_back({static_cast<std::uint8_t>(51 * r), static_cast<std::uint8_t>(51 * g),
                          static_cast<std::uint8_t>(51 * b)});
        }
      }
    }
    // 97 is coprime with the 210 entries, so this is a permutation that
    // spreads neighbouring labels across the cube.
    std::vector<Rgb> out(cube.size());
    for (std::size_t i = 0; i < cube.size(); ++i) {
      out[i] = cube[(i * 97) % cube.size()];
    }
    return out;
  }();
  return colours;
}

Image label_raster(const std::vector<std::string> &labels, const LabelHierarchy &hierarchy,
                   std::size_t px) {
  Image img(px, px, {255, 255, 255});
  std::vector<Rgb> colours;
  for (const auto &l : labels) {
    if (auto i = hierarchy.find(l)) {
      colours.push_back(hierarchy.colour(*i));
    }
  }
  if (colours.empty()) {
    return img;
  }
  for (std::size_t y = 0; y < px; ++y) {
    for (std::size_t x = 0; x < px; ++x) {
      img.set(x, y, colours[x * colours.size() / px]);
    }
  }
  return img;
}

std::string join_labels(const std::vector<std::string> &labels) {
  std::string out;
  for (const auto &l : labels) {
    out += (out.empty() ? "" : ",") + l;
  }
  return out;
}

// Value of the last `key: "value"` or `key: value` line in a prompt.
std::optional<std::string> prompt_field(const std::string &prompt, const std::string &key) {
  std::optional<std::string> found;
  std::istringstream in(prompt);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.rfind(key + ":", 0) == 0) {
      std::string v = trim(t.substr(key.size() + 1));
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        v = v.substr(1, v.size() - 2);
      }
      found = v;
    }
  }
  return found;
}

std::size_t count_field(const std::string &prompt, const std::string &key) {
  const auto v = prompt_field(prompt, key);
  if (!v) {
    throw ProtocolError("prompt has no " + key + " line", prompt);
  }
  return static_cast<std::size_t>(std::stoul(*v));
}

} // namespace

LabelHierarchy LabelHierarchy::make(std::size_t vocab_size, std::size_t group_size) {
  if (vocab_size == 0 || group_size == 0) {
    throw ParameterError("vocabulary and group size must be positive");
  }
  if (vocab_size > palette().size()) {
    throw ParameterError("vocabulary larger than the " + std::to_string(palette().size()) +
                         " available label colours");
  }
  LabelHierarchy h;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    const std::size_t g = i / group_size;
    if (g == h.groups_.size()) {
      h.groups_.push_back(numbered("group", g, 2));
    }
    h.leaves_.push_back(h.groups_[g] + numbered("-item", i % group_size, 1));
    h.group_of_.push_back(g);
  }
  return h;
}

std::optional<std::size_t> LabelHierarchy::find(const std::string &leaf) const {
  const auto it = std::find(leaves_.begin(), leaves_.end(), leaf);
  if (it == leaves_.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - leaves_.begin());
}

std::vector<std::string> LabelHierarchy::siblings(std::size_t leaf) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    if (i != leaf && group_of_[i] == group_of_[leaf]) {
      out.push_back(leaves_[i]);
    }
  }
  return out;
}

Rgb LabelHierarchy::colour(std::size_t leaf) const { return palette().at(leaf); }

bool ConceptOracle::contains(std::size_t image, const std::string &concept_name) const {
  const auto &labels = membership.at(image);
  return std::find(labels.begin(), labels.end(), concept_name) != labels.end();
}

void ConceptOracle::validate() const {
  const std::set<std::string> vocab(vocabulary.begin(), vocabulary.end());
  for (std::size_t i = 0; i < membership.size(); ++i) {
    for (const auto &l : membership[i]) {
      if (vocab.count(l) == 0) {
        throw ValidationError("image " + std::to_string(i) + " has label '" + l +
                              "' outside the vocabulary");
      }
    }
  }
}

SyntheticProbe make_probe(std::size_t vocab_size, std::size_t n_images,
                          std::size_t labels_per_image, std::uint64_t seed,
                          const ProbeOptions &options) {
  if (labels_per_image == 0 || labels_per_image > vocab_size) {
    throw ParameterError("labels per image must be in 1..vocab_size");
  }
  if (n_images == 0 || options.dim == 0) {
    throw ParameterError("image count and embedding dimension must be positive");
  }
  if (options.embedding_noise < 0.0 || options.extra_label_weight < 0.0) {
    throw ParameterError("noise and label weights must be non-negative");
  }
  SyntheticProbe probe;
  probe.hierarchy = LabelHierarchy::make(vocab_size, options.group_size);
  probe.oracle.vocabulary = probe.hierarchy.leaves();
  Rng rng(seed);

  std::vector<std::vector<double>> centroids(vocab_size, std::vector<double>(options.dim));
  for (std::size_t l = 0; l < vocab_size; ++l) {
    auto &c = centroids[l];
    for (auto &x : c) {
      x = rng.normal();
    }
    if (vocab_size <= options.dim) {
      for (std::size_t p = 0; p < l; ++p) {
        double dot = 0.0;
        for (std::size_t d = 0; d < options.dim; ++d) {
          dot += c[d] * centroids[p][d];
        }
        for (std::size_t d = 0; d < options.dim; ++d) {
          c[d] -= dot * centroids[p][d];
        }
      }
    }
    double norm = 0.0;
    for (double x : c) {
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto &x : c) {
      x /= norm;
    }
  }

  probe.manifest.dataset_name = "synthetic-" + std::to_string(seed);
  std::vector<float> values(n_images * options.dim);
  for (std::size_t i = 0; i < n_images; ++i) {
    std::vector<std::size_t> ids{i % vocab_size};
    while (ids.size() < labels_per_image) {
      const std::size_t l = rng.below(vocab_size);
      if (std::find(ids.begin(), ids.end(), l) == ids.end()) {
        ids.push_back(l);
      }
    }
    std::vector<double> v(options.dim);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const double w = k == 0 ? 1.0 : options.extra_label_weight;
      for (std::size_t d = 0; d < options.dim; ++d) {
        v[d] += w * centroids[ids[k]][d];
      }
    }
    for (auto &x : v) {
      x += options.embedding_noise * rng.normal();
    }
    double norm = 0.0;
    for (double x : v) {
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (std::size_t d = 0; d < options.dim; ++d) {
      values[i * options.dim + d] = static_cast<float>(v[d] / norm);
    }
    std::vector<std::string> labels;
    for (std::size_t id : ids) {
      labels.push_back(probe.hierarchy.leaves()[id]);
    }
    probe.oracle.membership.push_back(labels);
    probe.manifest.images.push_back({i, numbered("images/probe_", i, 5) + ".png", labels});
  }
  probe.embeddings = Matrix(n_images, options.dim, std::move(values));
  return probe;
}

Bytes label_png(const std::vector<std::string> &labels, const LabelHierarchy &hierarchy,
                std::size_t px, const std::string &id) {
  if (px == 0) {
    throw ParameterError("raster size must be positive");
  }
  return encode_png(label_raster(labels, hierarchy, px), {{"labels", join_labels(labels)}, {"id", id}});
}

std::vector<std::string> labels_of_png(std::span<const std::uint8_t> png) {
  const auto text = read_png_text(png);
  const auto it = text.find("labels");
  if (it == text.end()) {
    throw DataError("image carries no label chunk");
  }
  std::vector<std::string> out;
  std::istringstream in(it->second);
  std::string l;
  while (std::getline(in, l, ',')) {
    if (!l.empty()) {
      out.push_back(l);
    }
  }
  return out;
}

void SyntheticNeuron::validate() const {
  if (!(signal_weight > 0.0) || !std::isfinite(signal_weight)) {
    throw ParameterError("signal weight must be positive");
  }
  if (!(noise_scale >= 0.0) || !(noise_scale < signal_weight / 4.0)) {
    throw ParameterError("noise scale must be in [0, signal_weight/4)");
  }
}

double SyntheticNeuron::activation(const std::vector<std::string> &labels,
                                   const std::string &key) const {
  const bool hit = !target_label.empty() &&
                   std::find(labels.begin(), labels.end(), target_label) != labels.end();
  const double noise = noise_scale * (2.0 * unit_interval(stable_hash(key, seed)) - 1.0);
  return (hit ? signal_weight : 0.0) + noise;
}

std::string probe_key(std::size_t image_index) { return "probe:" + std::to_string(image_index); }

Matrix activation_matrix(const std::vector<SyntheticNeuron> &neurons, const ConceptOracle &oracle) {
  const std::size_t n = oracle.membership.size();
  std::vector<float> values(n * neurons.size());
  for (std::size_t j = 0; j < neurons.size(); ++j) {
    neurons[j].validate();
    for (std::size_t i = 0; i < n; ++i) {
      values[i * neurons.size() + j] =
          static_cast<float>(neurons[j].activation(oracle.membership[i], probe_key(i)));
    }
  }
  return Matrix(n, neurons.size(), std::move(values));
}

double true_score(const SyntheticNeuron &neuron, const ConceptOracle &oracle,
                  const std::string &concept_name) {
  std::vector<double> with;
  std::vector<double> without;
  for (std::size_t i = 0; i < oracle.membership.size(); ++i) {
    // Float rounding matches the stored activation matrix.
    const double a = static_cast<float>(neuron.activation(oracle.membership[i], probe_key(i)));
    (oracle.contains(i, concept_name) ? with : without).push_back(a);
  }
  if (with.empty() || without.empty()) {
    throw ParameterError("concept '" + concept_name + "' must split the probe into two non-empty classes");
  }
  std::uint64_t wins = 0;
  for (double p : with) {
    for (double q : without) {
      wins += p > q ? 1 : 0;
    }
  }
  return static_cast<double>(wins) / (static_cast<double>(with.size()) * without.size());
}

SyntheticWorld::SyntheticWorld(LabelHierarchy hierarchy,
                               std::map<std::size_t, SyntheticNeuron> neurons, WorldOptions options)
    : hierarchy_(std::move(hierarchy)), neurons_(std::move(neurons)), options_(std::move(options)) {
  for (const auto &[index, n] : neurons_) {
    n.validate();
  }
}

std::optional<std::string> SyntheticWorld::dominant_label(const Image &grid) const {
  std::map<Rgb, std::size_t> lookup;
  for (std::size_t l = 0; l < hierarchy_.size(); ++l) {
    lookup[hierarchy_.colour(l)] = l;
  }
  const std::size_t cols = grid.width / options_.cell_px;
  const std::size_t rows = grid.height / options_.cell_px;
  std::vector<std::size_t> cells_with(hierarchy_.size(), 0);
  std::size_t nonempty = 0;
  for (std::size_t cy = 0; cy < rows; ++cy) {
    for (std::size_t cx = 0; cx < cols; ++cx) {
      std::vector<std::size_t> pixels(hierarchy_.size(), 0);
      for (std::size_t y = cy * options_.cell_px; y < (cy + 1) * options_.cell_px; ++y) {
        for (std::size_t x = cx * options_.cell_px; x < (cx + 1) * options_.cell_px; ++x) {
          const auto it = lookup.find(grid.at(x, y));
          if (it != lookup.end()) {
            ++pixels[it->second];
          }
        }
      }
      bool any = false;
      for (std::size_t l = 0; l < pixels.size(); ++l) {
        if (pixels[l] >= options_.min_pixels) {
          ++cells_with[l];
          any = true;
        }
      }
      nonempty += any ? 1 : 0;
    }
  }
  if (nonempty == 0) {
    return std::nullopt;
  }
  const auto best = std::max_element(cells_with.begin(), cells_with.end());
  if (static_cast<double>(*best) < options_.min_share * static_cast<double>(nonempty)) {
    return std::nullopt;
  }
  return hierarchy_.leaves()[static_cast<std::size_t>(best - cells_with.begin())];
}

std::string SyntheticWorld::propose(const BackendRequest &request) const {
  const auto label = dominant_label(decode_image(*request.image));
  if (!label) {
    return "I'm sorry, I cannot identify a single concept shared by these images.";
  }
  const auto it = options_.confusion.find(*label);
  return "The " + (it == options_.confusion.end() ? *label : it->second) + ".";
}

std::string SyntheticWorld::cohyponyms(const BackendRequest &request) const {
  const auto concept_name = prompt_field(request.prompt, "Concept");
  const std::size_t n = count_field(request.prompt, "Count");
  const auto leaf = concept_name ? hierarchy_.find(*concept_name) : std::nullopt;
  if (!leaf) {
    return "Hypernym: object\nCo-hyponyms:\n";
  }
  std::ostringstream out;
  out << "Hypernym: " << hierarchy_.hypernym(*leaf) << "\nCo-hyponyms:\n";
  const auto sibs = hierarchy_.siblings(*leaf);
  for (std::size_t i = 0; i < std::min(n, sibs.size()); ++i) {
    out << i + 1 << ". " << sibs[i] << "\n";
  }
  return out.str();
}

std::string SyntheticWorld::captions(const BackendRequest &request) const {
  static const char *const scenes[] = {"on a sunny beach",    "in a busy kitchen",
                                       "under a stone bridge", "beside a quiet lake",
                                       "in a snowy field",    "on a city street",
                                       "inside a museum hall", "at a night market"};
  const auto c = prompt_field(request.prompt, "Concept");
  const auto h = prompt_field(request.prompt, "Co-hyponym");
  if (!c || !h) {
    throw ProtocolError("caption prompt without concept or co-hyponym", request.prompt);
  }
  const std::size_t pairs = count_field(request.prompt, "Pairs");
  std::ostringstream out;
  for (std::size_t j = 0; j < pairs; ++j) {
    const char *scene = scenes[j % std::size(scenes)];
    out << j + 1 << ". Concept caption: a photo of a " << *c << " " << scene << "\n"
        << "   Co-hyponym caption: a photo of a " << *h << " " << scene << "\n";
  }
  return out.str();
}

nlohmann::json SyntheticWorld::images(const BackendRequest &request) const {
  std::vector<std::string> labels;
  for (const auto &leaf : hierarchy_.leaves()) {
    if (mentions(request.prompt, leaf)) {
      labels.push_back(leaf);
    }
  }
  const std::size_t n = request.params.value("num_images", std::size_t{1});
  const std::string caption_id = sha256_hex(request.prompt).substr(0, 16);
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(base64_encode(
        label_png(labels, hierarchy_, options_.raster_px, caption_id + ":" + std::to_string(k))));
  }
  return out;
}

double SyntheticWorld::activation(const BackendRequest &request) const {
  if (!request.params.contains("neuron") || !request.params.contains("uri")) {
    throw ProtocolError("activation request needs neuron and uri parameters",
                        request.params.dump());
  }
  const auto index = request.params.at("neuron").get<std::size_t>();
  const auto it = neurons_.find(index);
  if (it == neurons_.end()) {
    throw ProtocolError("unknown neuron " + std::to_string(index), request.params.dump());
  }
  return it->second.activation(labels_of_png(*request.image),
                               request.params.at("uri").get<std::string>());
}

BackendResponse SyntheticWorld::send(const BackendRequest &request) {
  request.validate();
  BackendResponse r;
  r.provenance = "synthetic";
  switch (request.kind) {
  case RequestKind::propose:
    r.payload = propose(request);
    break;
  case RequestKind::cohyponym:
    r.payload = cohyponyms(request);
    break;
  case RequestKind::caption:
    r.payload = captions(request);
    break;
  case RequestKind::image:
    r.payload = images(request);
    break;
  case RequestKind::activation:
    r.payload = activation(request);
    break;
  }
  return r;
}

} // namespace neurolens
