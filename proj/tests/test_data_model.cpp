#include "doctest.h"
#include "neurolens/data_model.hpp"
#include "support.hpp"

#include <cmath>
#include <cstring>
#include <limits>

using namespace neurolens;

namespace {

std::uint32_t le32(const Bytes &b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
         static_cast<std::uint32_t>(b[off + 2]) << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
}

Matrix random_matrix(testing::Gen &g, std::size_t rows, std::size_t cols) {
  std::vector<float> v(rows * cols);
  for (auto &x : v) {
    x = static_cast<float>(g.uniform(-10.0, 10.0));
  }
  return Matrix(rows, cols, std::move(v));
}

ProbeManifest manifest_of(std::size_t n) {
  ProbeManifest m;
  m.dataset_name = "fixture";
  for (std::size_t i = 0; i < n; ++i) {
    m.images.push_back({i, "img" + std::to_string(i) + ".png", std::nullopt});
  }
  return m;
}

} // namespace

TEST_SUITE("data_model") {

TEST_CASE("2x3 payload decodes row-major") {
  const Matrix m(2, 3, {1, 2, 3, 4, 5, 6});
  const Bytes bytes = encode_matrix(m, MatrixKind::activation);
  const Matrix back = decode_matrix(bytes, MatrixKind::activation);
  CHECK(back.rows() == 2);
  CHECK(back.cols() == 3);
  CHECK(back.at(0, 2) == 3.0f);
  CHECK(back.at(1, 0) == 4.0f);
  CHECK(back == m);
}

TEST_CASE("header layout is magic, version, rows, cols, little endian") {
  const Bytes b = encode_matrix(Matrix(2, 3), MatrixKind::embedding);
  CHECK(std::memcmp(b.data(), "NEMB", 4) == 0);
  CHECK(le32(b, 4) == 1);
  CHECK(le32(b, 8) == 2);
  CHECK(le32(b, 12) == 3);
  CHECK(b.size() == 16 + 4 * 6);
}

TEST_CASE("1x1 zero matrix is a 16-byte header plus one float") {
  const Bytes b = encode_matrix(Matrix(1, 1, {0.0f}), MatrixKind::activation);
  CHECK(b.size() == 20);
  CHECK(std::memcmp(b.data(), "NACT", 4) == 0);
}

TEST_CASE("truncated payload is a corrupt file") {
  Bytes b = encode_matrix(Matrix(4, 2), MatrixKind::activation);
  b.resize(b.size() - 8); // payload for three rows only
  CHECK_THROWS_AS(decode_matrix(b, MatrixKind::activation), CorruptFileError);
  Bytes header_only{'N', 'A', 'C', 'T', 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(decode_matrix(header_only, MatrixKind::activation), CorruptFileError);
}

TEST_CASE("trailing bytes are also corrupt") {
  Bytes b = encode_matrix(Matrix(1, 2), MatrixKind::activation);
  b.push_back(0);
  CHECK_THROWS_AS(decode_matrix(b, MatrixKind::activation), CorruptFileError);
}

TEST_CASE("wrong magic or version is a format error") {
  const Bytes act = encode_matrix(Matrix(1, 1), MatrixKind::activation);
  CHECK_THROWS_AS(decode_matrix(act, MatrixKind::embedding), FormatError);
  Bytes v2 = act;
  v2[4] = 2;
  CHECK_THROWS_AS(decode_matrix(v2, MatrixKind::activation), FormatError);
}

TEST_CASE("non-finite payload names row and column") {
  Bytes b = encode_matrix(Matrix(2, 2), MatrixKind::activation);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(b.data() + 16 + 4 * 3, &nan, 4);
  try {
    decode_matrix(b, MatrixKind::activation);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("column 1") != std::string::npos);
  }
  CHECK_THROWS_AS(Matrix(1, 1, {std::numeric_limits<float>::infinity()}), DataError);
}

TEST_CASE("file round trip of a 100x512 random matrix is bitwise exact") {
  testing::TempDir dir("dm");
  testing::Gen g(11);
  const Matrix m = random_matrix(g, 100, 512);
  write_matrix(m, MatrixKind::embedding, dir / "e.nemb");
  CHECK(read_matrix(dir / "e.nemb", MatrixKind::embedding) == m);
  CHECK(std::filesystem::file_size(dir / "e.nemb") == 16 + 4 * 100 * 512);
}

TEST_CASE("1000 random matrices round trip in memory") {
  testing::Gen g(12);
  for (int i = 0; i < 1000; ++i) {
    const Matrix m = random_matrix(g, g.between(0, 6), g.between(0, 6));
    REQUIRE(decode_matrix(encode_matrix(m, MatrixKind::activation), MatrixKind::activation) == m);
  }
}

TEST_CASE("negative zero survives the round trip") {
  const Matrix m(1, 2, {-0.0f, 0.0f});
  const Matrix back = decode_matrix(encode_matrix(m, MatrixKind::activation), MatrixKind::activation);
  CHECK(std::signbit(back.at(0, 0)));
  CHECK(!std::signbit(back.at(0, 1)));
}

TEST_CASE("embeddings are normalized at load; zero rows rejected") {
  const auto e = EmbeddingMatrix::normalized(Matrix(2, 2, {3, 4, 0, 2}));
  CHECK(e.row(0)[0] == doctest::Approx(0.6));
  CHECK(e.row(0)[1] == doctest::Approx(0.8));
  testing::Gen g(5);
  const auto r = EmbeddingMatrix::normalized(random_matrix(g, 50, 16));
  for (std::size_t i = 0; i < r.n_inputs(); ++i) {
    double n = 0;
    for (float x : r.row(i)) {
      n += double(x) * x;
    }
    CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-5);
  }
  CHECK_THROWS_AS(EmbeddingMatrix::normalized(Matrix(2, 2, {1, 0, 0, 0})), DataError);
}

TEST_CASE("manifest JSON round trip and validation") {
  const std::string text = R"({"dataset_name": "d", "images": [
    {"index": 0, "uri": "a.png", "labels": ["x"]},
    {"index": 1, "uri": "b.png", "labels": ["y", "z"]}]})";
  const auto m = parse_manifest(text);
  CHECK(m.dataset_name == "d");
  CHECK(m.count() == 2);
  CHECK(m.labeled());
  CHECK((*m.image(1).labels)[1] == "z");
  CHECK(parse_manifest(serialize_manifest(m)).images[1].uri == "b.png");
  CHECK_NOTHROW(validate_manifest(m));
}

TEST_CASE("manifest of 3 images pairs with 3 rows but not 4") {
  const auto m = manifest_of(3);
  CHECK_NOTHROW(validate_manifest(m, ActivationMatrix(Matrix(3, 8))));
  CHECK_THROWS_AS(validate_manifest(m, ActivationMatrix(Matrix(4, 8))), ValidationError);
}

TEST_CASE("duplicate, gapped and partially labeled manifests are rejected") {
  auto dup = manifest_of(3);
  dup.images[1].index = 2;
  CHECK_THROWS_AS(validate_manifest(dup), ValidationError);
  auto gap = manifest_of(3);
  gap.images[2].index = 5;
  CHECK_THROWS_AS(validate_manifest(gap), ValidationError);
  auto partial = manifest_of(2);
  partial.images[0].labels = std::vector<std::string>{"a"};
  CHECK_THROWS_AS(validate_manifest(partial), ValidationError);
  CHECK_THROWS_AS(parse_manifest("{not json"), FormatError);
  CHECK_THROWS_AS(parse_manifest(R"({"images": [{"uri": 3}]})"), FormatError);
}

TEST_CASE("relative URIs resolve against the manifest directory") {
  testing::TempDir dir("dm");
  save_manifest(manifest_of(2), dir / "m.json");
  const auto m = load_manifest(dir / "m.json");
  CHECK(m.resolve_uri(1) == (dir / "img1.png").string());
}

} // TEST_SUITE
