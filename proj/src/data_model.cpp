#include "neurolens/data_model.hpp"

#include "neurolens/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

namespace neurolens {

namespace {

constexpr std::uint32_t format_version = 1;
constexpr std::size_t header_size = 16;

void put_u32(Bytes &out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

void check_finite(std::span<const float> values, std::size_t cols, const std::string &context) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError(context + ": non-finite value at row " + std::to_string(i / cols) +
                      ", column " + std::to_string(i % cols));
    }
  }
}

} // namespace

const char *matrix_magic(MatrixKind kind) {
  return kind == MatrixKind::activation ? "NACT" : "NEMB";
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ParameterError("matrix payload has " + std::to_string(values_.size()) +
                         " values, expected " + std::to_string(rows_ * cols_));
  }
  check_finite(values_, cols_ == 0 ? 1 : cols_, "matrix");
}

bool operator==(const Matrix &a, const Matrix &b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
         std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(float)) == 0;
}

std::vector<float> ActivationMatrix::column(std::size_t neuron) const {
  if (neuron >= n_neurons()) {
    throw ParameterError("neuron " + std::to_string(neuron) + " out of range (matrix has " +
                         std::to_string(n_neurons()) + " neurons)");
  }
  std::vector<float> col(n_inputs());
  for (std::size_t i = 0; i < n_inputs(); ++i) {
    col[i] = m_.at(i, neuron);
  }
  return col;
}

EmbeddingMatrix EmbeddingMatrix::normalized(const Matrix &raw) {
  std::vector<float> out(raw.values().begin(), raw.values().end());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    double sq = 0.0;
    for (float v : raw.row(r)) {
      sq += static_cast<double>(v) * v;
    }
    if (sq == 0.0) {
      throw DataError("embedding row " + std::to_string(r) + " is the zero vector");
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      out[r * raw.cols() + c] = static_cast<float>(raw.at(r, c) * inv);
    }
  }
  return EmbeddingMatrix(Matrix(raw.rows(), raw.cols(), std::move(out)));
}

Bytes encode_matrix(const Matrix &m, MatrixKind kind) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw ParameterError("matrix dimensions exceed the u32 header fields");
  }
  Bytes out;
  out.reserve(header_size + 4 * m.values().size());
  const char *magic = matrix_magic(kind);
  out.insert(out.end(), magic, magic + 4);
  put_u32(out, format_version);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (float v : m.values()) {
    put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Matrix decode_matrix(std::span<const std::uint8_t> bytes, MatrixKind kind,
                     const std::string &context) {
  if (bytes.size() < header_size) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), matrix_magic(kind), 4) != 0) {
      throw FormatError(context + ": bad magic, expected " + matrix_magic(kind));
    }
    throw CorruptFileError(context + ": file shorter than the 16-byte header");
  }
  if (std::memcmp(bytes.data(), matrix_magic(kind), 4) != 0) {
    throw FormatError(context + ": bad magic, expected " + matrix_magic(kind));
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != format_version) {
    throw FormatError(context + ": unsupported version " + std::to_string(version));
  }
  const std::uint64_t rows = get_u32(bytes, 8);
  const std::uint64_t cols = get_u32(bytes, 12);
  const std::uint64_t cells = rows * cols;
  if (cells > (std::numeric_limits<std::uint64_t>::max() - header_size) / 4 ||
      cells > std::numeric_limits<std::size_t>::max() / 4) {
    throw CorruptFileError(context + ": dimensions overflow");
  }
  const std::uint64_t expected = header_size + 4 * cells;
  if (bytes.size() != expected) {
    throw CorruptFileError(context + ": header declares " + std::to_string(rows) + "x" +
                           std::to_string(cols) + " (" + std::to_string(expected) +
                           " bytes) but file has " + std::to_string(bytes.size()) + " bytes");
  }
  std::vector<float> values(static_cast<std::size_t>(cells));
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, header_size + 4 * i));
  }
  check_finite(values, cols == 0 ? 1 : static_cast<std::size_t>(cols), context);
  return Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                std::move(values));
}

Matrix read_matrix(const std::filesystem::path &path, MatrixKind kind) {
  const Bytes bytes = read_file(path);
  return decode_matrix(bytes, kind, path.string());
}

void write_matrix(const Matrix &m, MatrixKind kind, const std::filesystem::path &path) {
  try {
    write_file_atomic(path, encode_matrix(m, kind));
  } catch (const IoError &e) {
    throw IoError("writing matrix to " + path.string() + ": " + e.what());
  }
}

ActivationMatrix load_activations(const std::filesystem::path &path) {
  return ActivationMatrix(read_matrix(path, MatrixKind::activation));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path &path) {
  try {
    return EmbeddingMatrix::normalized(read_matrix(path, MatrixKind::embedding));
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void to_json(nlohmann::json &j, const NeuronRef &n) {
  j = nlohmann::json{
      {"model_id", n.model_id}, {"layer_id", n.layer_id}, {"neuron_index", n.neuron_index}};
}

void from_json(const nlohmann::json &j, NeuronRef &n) {
  j.at("model_id").get_to(n.model_id);
  j.at("layer_id").get_to(n.layer_id);
  j.at("neuron_index").get_to(n.neuron_index);
}

const ProbeImage &ProbeManifest::image(std::size_t index) const {
  if (index >= images.size() || images[index].index != index) {
    throw AlignmentError("manifest has no image with index " + std::to_string(index));
  }
  return images[index];
}

std::string ProbeManifest::resolve_uri(std::size_t index) const {
  const std::string &uri = image(index).uri;
  if (uri.find("://") != std::string::npos) {
    return uri;
  }
  const std::filesystem::path p(uri);
  if (p.is_absolute() || base_dir.empty()) {
    return uri;
  }
  return (base_dir / p).string();
}

ProbeManifest parse_manifest(const std::string &json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  ProbeManifest m;
  try {
    m.dataset_name = doc.at("dataset_name").get<std::string>();
    for (const auto &item : doc.at("images")) {
      ProbeImage img;
      const long long idx = item.at("index").get<long long>();
      if (idx < 0) {
        throw ValidationError("negative image index " + std::to_string(idx));
      }
      img.index = static_cast<std::size_t>(idx);
      img.uri = item.at("uri").get<std::string>();
      if (item.contains("labels") && !item.at("labels").is_null()) {
        img.labels = item.at("labels").get<std::vector<std::string>>();
      }
      m.images.push_back(std::move(img));
    }
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

ProbeManifest load_manifest(const std::filesystem::path &path) {
  ProbeManifest m = parse_manifest(read_text_file(path));
  validate_manifest(m);
  std::sort(m.images.begin(), m.images.end(),
            [](const ProbeImage &a, const ProbeImage &b) { return a.index < b.index; });
  m.base_dir = path.parent_path();
  return m;
}

std::string serialize_manifest(const ProbeManifest &manifest) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto &img : manifest.images) {
    nlohmann::json item{{"index", img.index}, {"uri", img.uri}};
    if (img.labels) {
      item["labels"] = *img.labels;
    }
    images.push_back(std::move(item));
  }
  nlohmann::json doc{{"dataset_name", manifest.dataset_name}, {"images", std::move(images)}};
  return doc.dump(1) + "\n";
}

void save_manifest(const ProbeManifest &manifest, const std::filesystem::path &path) {
  write_file_atomic(path, serialize_manifest(manifest));
}

void validate_manifest(const ProbeManifest &manifest) {
  const std::size_t n = manifest.images.size();
  std::vector<bool> seen(n, false);
  for (const auto &img : manifest.images) {
    if (img.index >= n) {
      throw ValidationError("manifest index " + std::to_string(img.index) +
                            " outside 0.." + std::to_string(n == 0 ? 0 : n - 1));
    }
    if (seen[img.index]) {
      throw ValidationError("manifest has duplicate index " + std::to_string(img.index));
    }
    seen[img.index] = true;
  }
  if (n > 0) {
    const bool labeled = manifest.images.front().labels.has_value();
    for (const auto &img : manifest.images) {
      if (img.labels.has_value() != labeled) {
        throw ValidationError("labels must be present on all images or none (index " +
                              std::to_string(img.index) + ")");
      }
    }
  }
}

void validate_manifest(const ProbeManifest &manifest, const ActivationMatrix &activations) {
  validate_manifest(manifest);
  if (manifest.count() != activations.n_inputs()) {
    const std::size_t first = std::min(manifest.count(), activations.n_inputs());
    throw ValidationError("manifest has " + std::to_string(manifest.count()) +
                          " images but activation matrix has " +
                          std::to_string(activations.n_inputs()) +
                          " rows; first offending index " + std::to_string(first));
  }
}

void validate_manifest(const ProbeManifest &manifest, const EmbeddingMatrix &embeddings) {
  validate_manifest(manifest);
  if (manifest.count() != embeddings.n_inputs()) {
    const std::size_t first = std::min(manifest.count(), embeddings.n_inputs());
    throw ValidationError("manifest has " + std::to_string(manifest.count()) +
                          " images but embedding matrix has " +
                          std::to_string(embeddings.n_inputs()) +
                          " rows; first offending index " + std::to_string(first));
  }
}

} // namespace neurolens
