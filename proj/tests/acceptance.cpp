// Acceptance run: one [PASS]/[FAIL] line per criterion.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli_runner.hpp"
#include "kgtopos/incidence.hpp"
#include "kgtopos/line_digraph.hpp"
#include "kgtopos/verify.hpp"
#include "oracles.hpp"

using namespace kgtopos;

namespace {

// Returns an empty string on success, otherwise what went wrong.
using Criterion = std::function<std::string()>;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KgPtr example() {
  static const auto kg = std::make_shared<const KnowledgeGraph>(parse_kg(slurp(data("worked_example.kg"))));
  return kg;
}

std::string witness(const std::optional<nlohmann::json>& w) { return w ? w->dump() : ""; }

std::string golden_matrices() {
  const auto& kg = *example();
  if (to_csv(head_incidence(kg)) != slurp(golden_path("H_head.csv"))) return "H_head differs";
  if (to_csv(tail_incidence(kg)) != slurp(golden_path("H_tail.csv"))) return "H_tail differs";
  if (to_csv(line_adjacency_out(kg)) != slurp(golden_path("A_out.csv"))) return "A_out differs";
  return "";
}

std::string golden_scc() {
  const auto p = scc(build_out_line(*example())).canonical();
  if (p.blocks != std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}}) return "unexpected components";
  return "";
}

std::string golden_spectrum() {
  const auto& kg = *example();
  const auto f = spectrum_formula(kg);
  if (f != std::vector<std::int64_t>{-1, -1, 1, 1}) return "formula spectrum is not {-1,-1,1,1}";
  const auto r = spectrum_numeric(line_adjacency_out(kg), f);
  if (!(r.max_deviation < 1e-9)) return "numeric deviation " + std::to_string(r.max_deviation);
  return "";
}

std::string categories() {
  Rng rng(42);
  if (auto w = suite_categories(rng, 100, 8, 12)) return w->dump();
  // Exhaustive uniqueness of the extension into a chain.
  Rng rng2(43);
  for (int i = 0; i < 100; ++i) {
    auto kg = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng2, 6, 8));
    const auto c = build_free_category(kg);
    std::vector<std::size_t> lvl(kg->entity_count(), 0);
    for (std::size_t v = 0; v < lvl.size(); ++v)
      for (const auto& t : kg->triples())
        if (t.tail == v) lvl[v] = std::max(lvl[v], lvl[t.head] + 1);
    auto chain = std::make_shared<const FiniteCategory>(FiniteCategory::chain(lvl.size()));
    std::vector<std::size_t> gens;
    for (const auto& t : kg->triples()) gens.push_back(chain->hom(lvl[t.head], lvl[t.tail]).front());
    const auto F = extend_functor(c, lvl, gens, chain);
    if (!functor_violations(F).empty()) return "extension violates functor laws on case " + std::to_string(i);
    if (oracle::extension_count(c, *chain, lvl, gens) != 1) return "extension is not unique on case " + std::to_string(i);
  }
  return "";
}

std::string golden_sheaf() {
  auto cat = std::make_shared<const FreeCategory>(build_free_category(example()));
  auto space = std::make_shared<const SieveSpace>(cat);
  const auto site = path_site(space);
  const auto F = load_presheaf(cat, nlohmann::json::parse(slurp(data("product_presheaf.json"))));
  if (!is_sheaf(F, site).is_sheaf) return "product presheaf is not a sheaf";
  const Sieve s{1, space->generated(1, {cat->generator(0), cat->generator(2)})};
  const auto s1 = *F.find_label(0, "a1"), s3 = *F.find_label(3, "d0");
  const auto fam = family_from_values(F, *space, s, {{cat->generator(0), s1}, {cat->generator(2), s3}});
  if (F.label(1, glue(F, site, fam)) != "(a1,d0)") return "glue did not return the pair";
  const auto U = load_presheaf(cat, nlohmann::json::parse(slurp(data("undersized_presheaf.json"))));
  const auto aU = sheafify(U, site).sheaf();
  if (aU.size(1) != U.size(0) * U.size(3))
    return "|aF(B)| = " + std::to_string(aU.size(1)) + ", expected " + std::to_string(U.size(0) * U.size(3));
  return "";
}

std::string full_verify() {
  const auto r = run_cli("verify " + data("worked_example.kg") + " --random --seed 42");
  if (r.code != 0) return "exit code " + std::to_string(r.code);
  return "";
}

}  // namespace

int main() {
  struct Item {
    const char* id;
    const char* title;
    double limit_s;
    Criterion run;
  };
  const std::vector<Item> items{
      {"AC1", "worked example matrices match golden CSVs", 1, golden_matrices},
      {"AC2", "worked example line digraph has components {t1,t2},{t3,t4}", 1, golden_scc},
      {"AC3", "worked example spectrum {-1,-1,1,1} within 1e-9", 1, golden_spectrum},
      {"AC4", "incidence/line suite, 200 graphs", 30,
       [] {
         Rng rng(42);
         return witness(suite_incidence_line(rng, 200, 20, 60));
       }},
      {"AC5", "category suite, 100 acyclic graphs", 30, categories},
      {"AC6", "topology suite, 50 acyclic graphs", 60,
       [] {
         Rng rng(42);
         return witness(suite_topology(rng, 50, kDefaultSieveCap));
       }},
      {"AC7", "worked example sheaf, gluing and sheafification", 5, golden_sheaf},
      {"AC8", "sheafification suite, 30 tiny presheaves", 60,
       [] {
         Rng rng(42);
         return witness(suite_sheafification(rng, 30, 4, 3));
       }},
      {"AC9", "adjunction suite, 20 tiny instances", 120,
       [] {
         Rng rng(42);
         return witness(suite_adjunction(rng, 20, 4, 2));
       }},
      {"AC10", "omega suite, 10 tiny sites", 60,
       [] {
         Rng rng(42);
         return witness(suite_omega(rng, 10, 4));
       }},
      {"AC11", "full verify on the worked example plus random mode exits 0", 300, full_verify},
  };

  int failures = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
      err = it.run();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (err.empty() && s > it.limit_s) err = "took longer than the limit";
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(3);
    line << (err.empty() ? "[PASS] " : "[FAIL] ") << it.id << " " << it.title << " (" << s << " s, limit "
         << it.limit_s << " s)";
    if (!err.empty()) line << ": " << err;
    std::cout << line.str() << "\n";
    failures += !err.empty();
  }
  return failures ? 1 : 0;
}
