#pragma once

#include "neurolens/backend.hpp"
#include "neurolens/data_model.hpp"
#include "neurolens/image.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace neurolens {

// Two-level vocabulary: groups act as hypernyms, the leaves in a group are
// co-hyponyms of each other. Leaf names look like "group02-item4".
class LabelHierarchy {
public:
  static LabelHierarchy make(std::size_t vocab_size, std::size_t group_size = 6);

  const std::vector<std::string> &leaves() const noexcept { return leaves_; }
  const std::vector<std::string> &groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return leaves_.size(); }

  std::optional<std::size_t> find(const std::string &leaf) const;
  const std::string &hypernym(std::size_t leaf) const { return groups_[group_of_[leaf]]; }
  std::size_t group_of(std::size_t leaf) const { return group_of_[leaf]; }
  // Other leaves of the same group, in vocabulary order.
  std::vector<std::string> siblings(std::size_t leaf) const;
  // The leaf's colour in placeholder rasters. Distinct per leaf, never the grid gray.
  Rgb colour(std::size_t leaf) const;

private:
  std::vector<std::string> leaves_;
  std::vector<std::string> groups_;
  std::vector<std::size_t> group_of_;
};

// Ground-truth label sets per probe image.
struct ConceptOracle {
  std::vector<std::string> vocabulary;
  std::vector<std::vector<std::string>> membership;

  bool contains(std::size_t image, const std::string &concept_name) const;
  void validate() const;
};

struct ProbeOptions {
  std::size_t dim = 64;
  double embedding_noise = 0.05;
  std::size_t raster_px = 32;
  std::size_t group_size = 6;
  // Weight of non-primary labels in an image's embedding.
  double extra_label_weight = 0.5;
};

struct SyntheticProbe {
  LabelHierarchy hierarchy;
  ConceptOracle oracle;
  ProbeManifest manifest;
  Matrix embeddings;
};

// Image i gets primary label i mod V plus distinct random extras. Embeddings
// are unit vectors near the primary label's centroid; centroids are
// orthonormal whenever V <= dim. Manifest URIs are "images/probe_NNNNN.png".
SyntheticProbe make_probe(std::size_t vocab_size, std::size_t n_images,
                          std::size_t labels_per_image, std::uint64_t seed,
                          const ProbeOptions &options = {});

// Vertical stripes in each label's colour plus "labels" and "id" text chunks.
Bytes label_png(const std::vector<std::string> &labels, const LabelHierarchy &hierarchy,
                std::size_t px, const std::string &id);
std::vector<std::string> labels_of_png(std::span<const std::uint8_t> png);

struct SyntheticNeuron {
  // Empty target means a pure-noise neuron.
  std::string target_label;
  double signal_weight = 1.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  // Noise depends only on (seed, key).
  double activation(const std::vector<std::string> &labels, const std::string &key) const;
};

std::string probe_key(std::size_t image_index);

// One column per neuron over the probe images.
Matrix activation_matrix(const std::vector<SyntheticNeuron> &neurons, const ConceptOracle &oracle);

// Probability that an image with the concept outranks one without it, by
// enumeration of every pair of probe images.
double true_score(const SyntheticNeuron &neuron, const ConceptOracle &oracle,
                  const std::string &concept_name);

struct WorldOptions {
  std::size_t cell_px = 224;
  // Least fraction of non-empty grid cells the dominant label must occupy.
  double min_share = 0.5;
  // Pixels of a label's colour needed for a cell to count as showing it.
  std::size_t min_pixels = 64;
  std::size_t raster_px = 32;
  // Dominant label -> answer the fake multimodal model gives instead.
  std::map<std::string, std::string> confusion;
};

// Deterministic stand-in for all four services, driven by label colours and
// PNG text chunks.
class SyntheticWorld : public Transport {
public:
  SyntheticWorld(LabelHierarchy hierarchy, std::map<std::size_t, SyntheticNeuron> neurons,
                 WorldOptions options = {});

  BackendResponse send(const BackendRequest &request) override;

  std::optional<std::string> dominant_label(const Image &grid) const;

private:
  std::string propose(const BackendRequest &request) const;
  std::string cohyponyms(const BackendRequest &request) const;
  std::string captions(const BackendRequest &request) const;
  nlohmann::json images(const BackendRequest &request) const;
  double activation(const BackendRequest &request) const;

  LabelHierarchy hierarchy_;
  std::map<std::size_t, SyntheticNeuron> neurons_;
  WorldOptions options_;
};

} // namespace neurolens
