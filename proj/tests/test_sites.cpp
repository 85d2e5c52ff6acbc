#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgtopos/error.hpp"
#include "kgtopos/random_kg.hpp"
#include "kgtopos/sites.hpp"
#include "oracles.hpp"

using namespace kgtopos;

namespace {

SieveSpacePtr space_of(const char* text, std::size_t cap = kDefaultSieveCap) {
  auto kg = std::make_shared<const KnowledgeGraph>(parse_kg(text));
  return std::make_shared<const SieveSpace>(std::make_shared<const FreeCategory>(build_free_category(kg)), cap);
}

std::set<std::set<std::string>> covering_names(const Site& s, std::size_t e) {
  std::set<std::set<std::string>> out;
  for (auto m : s.topology.covering[e]) {
    std::set<std::string> names;
    for (auto f : s.space->members(e, m)) names.insert(s.category().describe(f));
    out.insert(names);
  }
  return out;
}

const char* kExample = "A r1 B\nA r2 C\nD r3 B\nD r4 C\n";

}  // namespace

TEST_CASE("sieves on the worked example") {
  const auto sp = space_of(kExample);
  CHECK(sp->sieves(1).size() == 5);  // {}, {t1}, {t3}, {t1,t3}, max
  CHECK(sp->sieves(0).size() == 2);  // {}, max
  CHECK(sp->maximal(1) == sp->generated(1, {sp->category().identity(1)}));
}

TEST_CASE("sieve enumeration matches brute force") {
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    auto kg = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, 5, 7));
    auto c = std::make_shared<const FreeCategory>(build_free_category(kg));
    SieveSpace sp(c, kMaxSieveCap);
    for (std::size_t e = 0; e < c->object_count(); ++e) {
      std::set<oracle::MorphismSet> got, want;
      for (auto m : sp.sieves(e)) got.insert(oracle::members(sp, e, m));
      for (const auto& s : oracle::sieves(*c, e)) want.insert(s);
      CHECK(got == want);
      for (auto m : sp.sieves(e))
        for (auto g : c->into(e))
          CHECK(oracle::members(sp, c->morphism(g).source, sp.pullback(m, g)) ==
                oracle::pullback(*c, oracle::members(sp, e, m), g));
    }
  }
}

TEST_CASE("path topology on the worked example") {
  const auto s = path_site(space_of(kExample));
  CHECK(covering_names(s, 1) == std::set<std::set<std::string>>{{"id:B", "t1", "t3"}, {"t1", "t3"}});
  CHECK(covering_names(s, 2) == std::set<std::set<std::string>>{{"id:C", "t2", "t4"}, {"t2", "t4"}});
  CHECK(covering_names(s, 0) == std::set<std::set<std::string>>{{"id:A"}});
  CHECK(verify_topology_axioms(s).ok);
  CHECK(oracle::topology_axioms(s));
}

TEST_CASE("atomic topology has only maximal sieves on acyclic graphs") {
  const auto sp = space_of(kExample);
  const auto s = atomic_site(sp);
  for (std::size_t e = 0; e < 4; ++e) CHECK(s.topology.covering[e] == std::set<SieveMask>{sp->maximal(e)});
  CHECK(check_inclusion(s, path_site(sp)));
  CHECK_FALSE(check_inclusion(path_site(sp), s));
}

TEST_CASE("literal path coverage") {
  const auto sp = space_of(kExample);
  const auto s = path_site(sp, PathCoverage::literal);
  CHECK(s.name == "path-literal");
  CHECK(verify_topology_axioms(s).ok);
  CHECK(oracle::topology_axioms(s));
  CHECK(check_inclusion(path_site(sp), s));
}

TEST_CASE("generated topologies satisfy the axioms on random graphs") {
  Rng rng(41);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 50; ++i) {
    auto kg = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, 5, 7));
    auto c = std::make_shared<const FreeCategory>(build_free_category(kg));
    SieveSpacePtr sp;
    try {
      sp = std::make_shared<const SieveSpace>(c, 10);
    } catch (const SizeError&) {
      continue;
    }
    ++tested;
    for (const auto& s : {path_site(sp), atomic_site(sp), path_site(sp, PathCoverage::literal)}) {
      CHECK(verify_topology_axioms(s).ok);
      CHECK(oracle::topology_axioms(s));
    }
    CHECK(check_inclusion(atomic_site(sp), path_site(sp)));
  }
  CHECK(tested == 50);
}

TEST_CASE("a non-topology is caught") {
  const auto sp = space_of(kExample);
  auto s = atomic_site(sp);
  s.topology.covering[1].insert(sp->generated(1, {sp->category().generator(0)}));  // {t1} alone: not pullback-stable along t3
  const auto r = verify_topology_axioms(s);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.failures.empty());
  CHECK_FALSE(oracle::topology_axioms(s));
}

TEST_CASE("site morphisms") {
  const auto sp = space_of(kExample);
  auto cat = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(sp->category()));
  const auto id = identity_functor(cat);
  CHECK(check_site_morphism(id, atomic_site(sp), path_site(sp)).ok);
  CHECK(check_site_morphism(id, path_site(sp), path_site(sp)).ok);
  CHECK_FALSE(check_site_morphism(id, path_site(sp), atomic_site(sp)).ok);
}

TEST_CASE("size caps") {
  // Star into one object with 13 incoming morphisms.
  std::string text;
  for (int i = 0; i < 12; ++i) text += "s" + std::to_string(i) + " p hub\n";
  CHECK_THROWS_AS(space_of(text.c_str()), SizeError);
  CHECK_NOTHROW(space_of(text.c_str(), 13));
  auto kg = std::make_shared<const KnowledgeGraph>(parse_kg("a p a\n"));
  auto bounded = std::make_shared<const FreeCategory>(build_free_category(kg, 2));
  CHECK_THROWS_AS(SieveSpace(bounded, kDefaultSieveCap), InfinityError);
}

TEST_CASE("topology json") {
  const auto j = topology_to_json(path_site(space_of(kExample)));
  CHECK(j["topology"] == "path");
  CHECK(j["covering_sieves"]["B"].size() == 2);
  CHECK(j["covering_sieves"]["A"] == nlohmann::json{{"id:A"}});
}
