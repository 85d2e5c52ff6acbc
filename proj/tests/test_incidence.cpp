#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "kgtopos/error.hpp"
#include "kgtopos/incidence.hpp"
#include "kgtopos/random_kg.hpp"
#include "oracles.hpp"

using namespace kgtopos;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(KGTOPOS_TEST_DIR) + "/golden/" + name);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const KnowledgeGraph& example() {
  static const auto kg = parse_kg("A r1 B\nA r2 C\nD r3 B\nD r4 C\n");
  return kg;
}

}  // namespace

TEST_CASE("worked example matrices match the golden CSVs") {
  CHECK(to_csv(head_incidence(example())) == golden("H_head.csv"));
  CHECK(to_csv(tail_incidence(example())) == golden("H_tail.csv"));
  CHECK(to_csv(line_adjacency_out(example())) == golden("A_out.csv"));
}

TEST_CASE("worked example in-line operator") {
  // t1,t3 share tail B; t2,t4 share tail C.
  CHECK(to_csv(line_adjacency_in(example())) == "0,0,1,0\n0,0,0,1\n1,0,0,0\n0,1,0,0\n");
}

TEST_CASE("worked example spectrum") {
  CHECK(spectrum_formula(example()) == std::vector<std::int64_t>{-1, -1, 1, 1});
  const auto r = spectrum_numeric(line_adjacency_out(example()), spectrum_formula(example()));
  CHECK(r.max_deviation < 1e-9);
  REQUIRE(r.numeric_eigenvalues.size() == 4);
  CHECK(r.numeric_eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(r.numeric_eigenvalues[3] == doctest::Approx(1.0));
}

TEST_CASE("spectra of known shapes") {
  // Star of k triples on one head: A_out = J - I, eigenvalues k-1 and -1 (k-1 times).
  const auto star = parse_kg("h p a\nh p b\nh p c\nh q d\n");
  CHECK(spectrum_formula(star) == std::vector<std::int64_t>{-1, -1, -1, 3});
  CHECK(spectrum_numeric(line_adjacency_out(star), spectrum_formula(star)).max_deviation < 1e-9);
  // A path has all heads distinct.
  const auto path = parse_kg("a p b\nb p c\nc p d\n");
  CHECK(spectrum_formula(path) == std::vector<std::int64_t>{0, 0, 0});
}

TEST_CASE("rank equals the number of distinct heads") {
  CHECK(rank_exact(head_incidence(example())) == 2);
  CHECK(rank_exact(tail_incidence(example())) == 2);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto kg = random_kg(rng, 12, 30);
    const auto h = head_incidence(kg), t = tail_incidence(kg);
    CHECK(rank_exact(h) == oracle::rank(h));
    CHECK(rank_exact(h) == distinct_heads(kg));
    CHECK(rank_exact(t) == distinct_tails(kg));
  }
}

TEST_CASE("exact rank on general integer matrices") {
  Rng rng(5);
  std::uniform_int_distribution<int> v(-3, 3), d(1, 6);
  for (int i = 0; i < 200; ++i) {
    IntMatrix m(d(rng), d(rng));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = v(rng);
    if (m.rows() > 2) m.row(m.rows() - 1) = m.row(0) - 2 * m.row(1);
    CHECK(rank_exact(m) == oracle::rank(m));
  }
}

TEST_CASE("gram matrices and column sums") {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto kg = random_kg(rng, 10, 25);
    const auto h = head_incidence(kg);
    CHECK((h.colwise().sum().array() == 1).all());
    CHECK(gram_out(kg) == gram_out(kg).transpose());
    const auto m = static_cast<Eigen::Index>(kg.triple_count());
    CHECK(line_adjacency_out(kg) == gram_out(kg) - IntMatrix::Identity(m, m));
  }
}

TEST_CASE("eigen solver guards") {
  IntMatrix a(2, 2);
  a << 0, 1, 0, 0;
  CHECK_THROWS_AS(symmetric_eigenvalues(a), SymmetryError);
  IntMatrix s(2, 2);
  s << 0, 1, 1, 0;
  CHECK(std::isinf(spectrum_numeric(s, {1}).max_deviation));
}

TEST_CASE("empty graph") {
  const auto kg = parse_kg("");
  CHECK(to_csv(line_adjacency_out(kg)).empty());
  CHECK(rank_exact(head_incidence(kg)) == 0);
  CHECK(spectrum_formula(kg).empty());
}

TEST_CASE("floating-point scalar instantiation agrees") {
  const auto a = line_adjacency_out<double>(example());
  CHECK(a.cast<std::int64_t>() == line_adjacency_out(example()));
}
