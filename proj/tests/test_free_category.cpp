#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "kgtopos/error.hpp"
#include "kgtopos/free_category.hpp"
#include "kgtopos/random_kg.hpp"
#include "oracles.hpp"

using namespace kgtopos;

namespace {

KgPtr graph(const char* text) { return std::make_shared<const KnowledgeGraph>(parse_kg(text)); }

const char* kExample = "A r1 B\nA r2 C\nD r3 B\nD r4 C\n";

}  // namespace

TEST_CASE("worked example has identities and generators only") {
  const auto c = build_free_category(graph(kExample));
  CHECK(c.closed());
  CHECK(c.morphism_count() == 8);
  CHECK(c.hom(0, 1).size() == 1);
  CHECK(c.hom(1, 0).empty());
  CHECK(c.hom(0, 0) == std::vector<std::size_t>{c.identity(0)});
  CHECK(c.describe(c.generator(2)) == "t3");
  CHECK(c.describe(c.identity(3)) == "id:D");
}

TEST_CASE("paths compose diagrammatically") {
  const auto kg = graph("a p b\nb q c\nc r d\n");
  const auto c = build_free_category(kg);
  CHECK(c.morphism_count() == 4 + 3 + 2 + 1);
  const auto ab = c.generator(0), bc = c.generator(1), cd = c.generator(2);
  const auto ac = c.then(ab, bc);
  CHECK(c.describe(ac) == "t1.t2");
  CHECK(c.then(ac, cd) == c.then(ab, c.then(bc, cd)));
  CHECK(c.then(c.identity(0), ab) == ab);
  CHECK(c.then(ab, c.identity(1)) == ab);
  CHECK(c.then(bc, ab) == kNoMorphism);
  CHECK(parse_path("t1.t2", *kg) == c.morphism(ac));
  CHECK(parse_path("id:c", *kg) == identity_path(2));
  CHECK_THROWS_AS(compose(generator_path(*kg, 1), generator_path(*kg, 0)), CompositionError);
  CHECK_THROWS(parse_path("t1.t3", *kg));
}

TEST_CASE("proper prefixes have smaller ids") {
  const auto c = build_free_category(graph("a p b\nb q c\nb r c\nc s d\n"));
  for (std::size_t f = 0; f < c.morphism_count(); ++f) {
    auto p = c.morphism(f);
    if (p.length() < 2) continue;
    p.arrows.pop_back();
    p.target = c.graph()->triple(p.arrows.back()).tail;
    CHECK(*c.find(p) < f);
  }
}

TEST_CASE("parallel generators stay distinct") {
  const auto c = build_free_category(graph("a p b\na q b\nb r c\n"));
  CHECK(c.hom(0, 1).size() == 2);
  CHECK(c.hom(0, 2).size() == 2);
}

TEST_CASE("cycles need a bound") {
  const auto kg = graph("a p b\nb q a\n");
  try {
    build_free_category(kg);
    FAIL("expected InfinityError");
  } catch (const InfinityError& e) {
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
  const auto c = build_free_category(kg, 3);
  CHECK_FALSE(c.closed());
  CHECK(c.hom(0, 0).size() == 2);  // id, t1.t2
  CHECK(c.hom(0, 1).size() == 2);  // t1, t1.t2.t1
  CHECK_THROWS_AS(FiniteCategory::from_free(c), InfinityError);
  CHECK_THROWS_AS(extend_functor(c, {0, 0}, {0, 0}, std::make_shared<const FiniteCategory>(FiniteCategory::chain(1))),
                  InfinityError);
}

TEST_CASE("bounded acyclic category is closed once the bound reaches the longest path") {
  const auto kg = graph("a p b\nb q c\n");
  CHECK_FALSE(build_free_category(kg, 1).closed());
  CHECK(build_free_category(kg, 2).closed());
}

TEST_CASE("morphism count equals the path oracle and the walk formula") {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto kg = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, 7, 12));
    const auto c = build_free_category(kg);
    CHECK(c.morphism_count() == oracle::path_count(*kg));
    CHECK(walk_count(*kg) == oracle::path_count(*kg));
  }
}

TEST_CASE("json export") {
  const auto j = free_category_to_json(build_free_category(graph("a p b\nb q c\n")));
  CHECK(j["objects"] == nlohmann::json{"a", "b", "c"});
  CHECK(j["morphism_count"] == 6);
  CHECK(j["closed"] == true);
  CHECK_FALSE(j.contains("max_length"));
  bool found = false;
  for (const auto& h : j["hom_sets"])
    if (h["source"] == "a" && h["target"] == "c") {
      CHECK(h["paths"] == nlohmann::json{"t1.t2"});
      found = true;
    }
  CHECK(found);
}

TEST_CASE("fibres") {
  const auto f = fibres(parse_kg(kExample));
  CHECK(f.by_head[0] == std::vector<std::size_t>{0, 1});
  CHECK(f.by_head[1].empty());
  CHECK(f.by_tail[2] == std::vector<std::size_t>{1, 3});
}

TEST_CASE("finite categories validate their laws") {
  const auto ch = FiniteCategory::chain(3);
  CHECK(ch.morphism_count() == 6);
  CHECK(ch.hom(0, 2).size() == 1);
  CHECK(ch.hom(2, 0).empty());
  // f then id_1 returns id_0, which has the wrong type.
  using A = FiniteCategory::Arrow;
  CHECK_THROWS_AS(FiniteCategory(2, {A{0, 0}, A{1, 1}, A{0, 1}}, {0, 1},
                                 [](std::size_t f, std::size_t g) { return f == 0 ? g : (f == 2 ? 0 : f); }),
                  TypingError);
}

TEST_CASE("extension from generators is the unique functor") {
  Rng rng(8);
  for (int i = 0; i < 60; ++i) {
    const auto kg = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, 5, 6));
    const auto c = build_free_category(kg);
    // Random monotone assignment into a chain.
    const std::size_t k = 3;
    auto chain = std::make_shared<const FiniteCategory>(FiniteCategory::chain(k));
    std::vector<std::size_t> obj(kg->entity_count());
    std::uniform_int_distribution<std::size_t> lvl(0, k - 1);
    for (auto& o : obj) o = lvl(rng);
    for (std::size_t v = 0; v < obj.size(); ++v)
      for (const auto& t : kg->triples())
        if (t.tail == v) obj[v] = std::max(obj[v], obj[t.head]);
    // Tails come after heads in index order, so one pass settles every level.
    std::vector<std::size_t> gens;
    for (const auto& t : kg->triples()) gens.push_back(chain->hom(obj[t.head], obj[t.tail]).front());
    const auto F = extend_functor(c, obj, gens, chain);
    CHECK(functor_violations(F).empty());
    CHECK(agrees_with_extension(F, c));
    CHECK(oracle::extension_count(c, *chain, obj, gens) == 1);

    // Into the free category itself with the identity assignment.
    auto self = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(c));
    std::vector<std::size_t> ids(kg->entity_count()), g2;
    for (std::size_t e = 0; e < ids.size(); ++e) ids[e] = e;
    for (std::size_t j = 0; j < kg->triple_count(); ++j) g2.push_back(c.generator(j));
    if (c.morphism_count() <= 14) CHECK(oracle::extension_count(c, *self, ids, g2) == 1);
  }
}

TEST_CASE("ill-typed generator assignments are rejected") {
  const auto kg = graph("a p b\n");
  const auto c = build_free_category(kg);
  auto chain = std::make_shared<const FiniteCategory>(FiniteCategory::chain(2));
  CHECK_THROWS_AS(extend_functor(c, {1, 0}, {chain->hom(0, 1).front()}, chain), TypingError);
}

TEST_CASE("induced functors compose") {
  Rng rng(13);
  for (int i = 0; i < 60; ++i) {
    auto kg = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, 5, 7));
    auto [k2, f] = random_hom(rng, kg, 1, true);
    auto [k3, g] = random_hom(rng, k2, 1, true);
    const auto c1 = build_free_category(kg), c2 = build_free_category(k2), c3 = build_free_category(k3);
    auto s1 = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(c1));
    auto s2 = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(c2));
    auto s3 = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(c3));
    const auto Cf = induced_functor(f, c1, c2, s1, s2), Cg = induced_functor(g, c2, c3, s2, s3);
    const auto Cgf = induced_functor(compose_homs(g, f), c1, c3, s1, s3);
    CHECK(functor_violations(Cf).empty());
    CHECK(Cgf == compose_functors(Cg, Cf));
    CHECK(induced_functor(KgHomomorphism::identity(kg), c1, c1, s1, s1) == identity_functor(s1));
    CHECK_THROWS_AS(compose_functors(Cf, Cf), CompositionError);
  }
}
