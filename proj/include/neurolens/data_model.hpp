#pragma once

#include "json.hpp"
#include "neurolens/util.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace neurolens {

enum class MatrixKind { activation, embedding };

const char *matrix_magic(MatrixKind kind);

// Dense row-major float32 matrix. Values are always finite.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  float at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const float> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const float> values() const noexcept { return values_; }

  // Bitwise comparison, so -0.0f != 0.0f.
  friend bool operator==(const Matrix &a, const Matrix &b);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

class ActivationMatrix {
public:
  ActivationMatrix() = default;
  explicit ActivationMatrix(Matrix m) : m_(std::move(m)) {}

  std::size_t n_inputs() const noexcept { return m_.rows(); }
  std::size_t n_neurons() const noexcept { return m_.cols(); }
  float value(std::size_t input, std::size_t neuron) const { return m_.at(input, neuron); }
  std::vector<float> column(std::size_t neuron) const;
  const Matrix &matrix() const noexcept { return m_; }

private:
  Matrix m_;
};

// Rows are unit length; zero rows are rejected on construction.
class EmbeddingMatrix {
public:
  EmbeddingMatrix() = default;
  static EmbeddingMatrix normalized(const Matrix &raw);

  std::size_t n_inputs() const noexcept { return m_.rows(); }
  std::size_t dim() const noexcept { return m_.cols(); }
  std::span<const float> row(std::size_t i) const { return m_.row(i); }
  const Matrix &matrix() const noexcept { return m_; }

private:
  explicit EmbeddingMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

Bytes encode_matrix(const Matrix &m, MatrixKind kind);
Matrix decode_matrix(std::span<const std::uint8_t> bytes, MatrixKind kind,
                     const std::string &context = "<memory>");

Matrix read_matrix(const std::filesystem::path &path, MatrixKind kind);
void write_matrix(const Matrix &m, MatrixKind kind, const std::filesystem::path &path);

ActivationMatrix load_activations(const std::filesystem::path &path);
EmbeddingMatrix load_embeddings(const std::filesystem::path &path);

struct NeuronRef {
  std::string model_id;
  std::string layer_id;
  std::size_t neuron_index = 0;

  friend bool operator==(const NeuronRef &, const NeuronRef &) = default;
};

void to_json(nlohmann::json &j, const NeuronRef &n);
void from_json(const nlohmann::json &j, NeuronRef &n);

struct ProbeImage {
  std::size_t index = 0;
  std::string uri;
  std::optional<std::vector<std::string>> labels;
};

struct ProbeManifest {
  std::string dataset_name;
  std::vector<ProbeImage> images;
  // Directory relative URIs are resolved against; not serialized.
  std::filesystem::path base_dir;

  std::size_t count() const noexcept { return images.size(); }
  bool labeled() const noexcept { return !images.empty() && images.front().labels.has_value(); }
  const ProbeImage &image(std::size_t index) const;
  // Local path or URL for an image, with relative paths anchored at base_dir.
  std::string resolve_uri(std::size_t index) const;
};

ProbeManifest parse_manifest(const std::string &json_text);
ProbeManifest load_manifest(const std::filesystem::path &path);
std::string serialize_manifest(const ProbeManifest &manifest);
void save_manifest(const ProbeManifest &manifest, const std::filesystem::path &path);

// Index range and label-presence checks on the manifest alone.
void validate_manifest(const ProbeManifest &manifest);
void validate_manifest(const ProbeManifest &manifest, const ActivationMatrix &activations);
void validate_manifest(const ProbeManifest &manifest, const EmbeddingMatrix &embeddings);

} // namespace neurolens
