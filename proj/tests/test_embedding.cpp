#include <doctest.h>

#include <random>
#include <set>

#include "lexshift/embedding.hpp"
#include "lexshift/subword.hpp"
#include "test_util.hpp"

using namespace lexshift;
using lexshift::testing::TempDir;
using lexshift::testing::write_file;
using Vec = EmbeddingSpace::Vector;

namespace {

Vec vec(std::initializer_list<float> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const float x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("cosine closed-form values") {
  const Eigen::Vector3d u(1, 2, 3), v(4, 5, 6);
  CHECK(cosine(u, v) == doctest::Approx(0.9746318461970762).epsilon(1e-12));
  CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == 0.0);
  CHECK_THROWS_AS(cosine(Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 1)), DegenerateError);
}

TEST_CASE("cosine is symmetric, scale invariant and bounded") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd u(7), v(7);
    for (int j = 0; j < 7; ++j) u(j) = g(rng), v(j) = g(rng);
    const double c = cosine(u, v);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(std::abs(c - cosine(v, u)) < 1e-12);
    const double a = scale(rng), b = scale(rng);
    CHECK(std::abs(c - cosine(a * u, b * v)) < 1e-9);
  }
}

TEST_CASE("extract_ngrams by definition") {
  const auto cat = extract_ngrams("cat", {3, 6});
  CHECK(cat == std::vector<std::string>{"<ca", "<cat", "<cat>", "cat", "cat>", "at>"});
  CHECK(extract_ngrams("a", {3, 6}) == std::vector<std::string>{"<a>"});
  CHECK(extract_ngrams("ab", {5, 6}).empty());
  // Code points, not bytes.
  CHECK(extract_ngrams("ü", {3, 3}) == std::vector<std::string>{"<ü>"});
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 2166136261u);
  CHECK(fnv1a("a") == 0xe40c292cu);
  CHECK(fnv1a("foobar") == 0xbf9cf968u);
}

TEST_CASE("vector lookup and subword fallback") {
  EmbeddingSpace space(3);
  space.add_word("dog", vec({1, 2, 3}));
  CHECK(space.vector("dog") == vec({1, 2, 3}));
  CHECK_THROWS_AS(space.vector("cat"), OovError);
  CHECK_FALSE(space.resolvable("cat"));

  SUBCASE("all n-grams in one bucket") {
    SubwordTable table(3, {3, 6}, 1);
    table.set(0, vec({0.5f, -1.0f, 2.0f}));
    space.set_subwords(table);
    CHECK(space.vector("cat").isApprox(vec({0.5f, -1.0f, 2.0f})));
    CHECK(space.vector("dog") == vec({1, 2, 3}));
  }

  SUBCASE("mean of the hashed n-gram buckets of <cat>") {
    const std::uint32_t buckets = 1000003;
    SubwordTable table(3, {3, 6}, buckets);
    // Oracle: hand-enumerated n-grams, each given a distinct vector.
    const std::vector<std::string> grams{"<ca", "cat", "at>", "<cat", "cat>", "<cat>"};
    Vec expected = Vec::Zero(3);
    float k = 1.0f;
    std::set<std::uint32_t> used;
    for (const auto& g : grams) {
      const auto id = fnv1a(g) % buckets;
      REQUIRE(used.insert(id).second);
      const Vec v = vec({k, -k, 0.5f * k});
      table.set(id, v);
      expected += v;
      k += 1.0f;
    }
    expected /= 6.0f;
    space.set_subwords(table);
    CHECK(space.vector("cat").isApprox(expected, 1e-6f));
    CHECK(space.resolvable("anything"));
  }
}

TEST_CASE("save and load round trip") {
  TempDir dir("emb");
  EmbeddingSpace space(4);
  space.add_word("alpha", vec({0.1f, -0.2f, 0.3f, 0.4f}));
  space.add_word("beta", vec({1.5f, 2.25f, -3.125f, 0.0f}));
  space.add_word("gamma_nn", vec({-0.000001f, 7.0f, 8.0f, -9.5f}));
  SubwordTable table(4, {2, 4}, 97);
  table.set(3, vec({1, 2, 3, 4}));
  table.set(50, vec({-1, 0.5f, 0.25f, 0.125f}));
  space.set_subwords(table);

  save_embeddings(space, dir / "s.vec");
  const auto loaded = load_embeddings(dir / "s.vec");
  REQUIRE(loaded.size() == 3);
  CHECK(loaded.dim() == 4);
  CHECK(loaded.words() == space.words());
  CHECK((loaded.matrix() - space.matrix()).cwiseAbs().maxCoeff() <= 5e-7f);
  REQUIRE(loaded.has_subwords());
  CHECK(loaded.subwords().bucket_count() == 97);
  CHECK(loaded.subwords().range() == NgramRange{2, 4});
  CHECK(loaded.subwords().bucket_ids() == std::vector<std::uint32_t>{3, 50});
  CHECK((loaded.vector("zzz") - space.vector("zzz")).cwiseAbs().maxCoeff() <= 5e-7f);
  for (const auto& a : space.words()) {
    for (const auto& b : space.words()) {
      CHECK(std::abs(cosine(loaded.vector(a), loaded.vector(b)) -
                     cosine(space.vector(a), space.vector(b))) < 1e-6);
    }
  }

  // Saving a space without subwords removes a stale bucket file.
  EmbeddingSpace plain(space.words(), space.matrix());
  save_embeddings(plain, dir / "s.vec");
  CHECK_FALSE(load_embeddings(dir / "s.vec").has_subwords());
}

TEST_CASE("load honours the header contract") {
  TempDir dir("emb");
  write_file(dir / "ok.vec", "2 5\na 1 2 3 4 5\nb 0.5 0 0 0 -1e-3\n");
  const auto s = load_embeddings(dir / "ok.vec");
  CHECK(s.dim() == 5);
  CHECK(s.size() == 2);
  CHECK(s.vector("b")(4) == doctest::Approx(-1e-3));
}

TEST_CASE("malformed embedding files report the line") {
  TempDir dir("emb");
  auto line_of = [&](const std::string& content) -> std::size_t {
    write_file(dir / "bad.vec", content);
    try {
      load_embeddings(dir / "bad.vec");
    } catch (const FormatError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("two 5\n") == 1);
  CHECK(line_of("1\n") == 1);
  CHECK(line_of("2 3\na 1 2 3\nb 1 2\n") == 3);
  CHECK(line_of("2 3\na 1 2 3\nb 1 x 3\n") == 3);
  CHECK(line_of("1 3\na 1 2 3\nb 1 2 3\n") == 3);
  CHECK(line_of("3 3\na 1 2 3\nb 1 2 3\n") > 0);
  CHECK_THROWS_AS(load_embeddings(dir / "missing.vec"), IoError);
}

TEST_CASE("reference fasttext export loads with matching cosine") {
  // Written by gensim's FastText (save_word2vec_format); reference value
  // from its own similarity("w3", "w17").
  const auto s = load_embeddings(std::string(LEXSHIFT_TEST_DATA) + "/reference_fasttext.vec");
  CHECK(s.size() == 40);
  CHECK(s.dim() == 16);
  CHECK(std::abs(cosine(s.vector("w3"), s.vector("w17")) - 0.9295854568481445) < 1e-6);
}
