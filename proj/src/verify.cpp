#include "kgtopos/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

#include "kgtopos/error.hpp"
#include "kgtopos/free_category.hpp"
#include "kgtopos/incidence.hpp"
#include "kgtopos/line_digraph.hpp"
#include "kgtopos/sheaves.hpp"

namespace kgtopos {

namespace {

using Witness = std::optional<nlohmann::json>;

constexpr double kEigenTolerance = 1e-9;

/// Thrown by a check body to report "skipped".
struct Skip {
  std::string reason;
};

void run(VerifyReport& report, const std::string& name, const std::function<Witness()>& body) {
  CheckResult r{name, CheckStatus::pass, nullptr, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (auto w = body()) {
      r.status = CheckStatus::fail;
      r.witness = std::move(*w);
    }
  } catch (const Skip& s) {
    r.status = CheckStatus::skipped;
    r.witness = s.reason;
  } catch (const SizeError& e) {
    r.status = CheckStatus::skipped;
    r.witness = std::string("size cap: ") + e.what();
  } catch (const std::exception& e) {
    r.status = CheckStatus::fail;
    r.witness = std::string("exception: ") + e.what();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  report.checks.push_back(std::move(r));
}

nlohmann::json case_witness(std::size_t index, const KnowledgeGraph& kg, const std::string& what) {
  return {{"case", index}, {"failure", what}, {"graph", serialize_kg(kg)}};
}

// --- single-graph checks -------------------------------------------------

Witness column_sums(const KnowledgeGraph& kg) {
  const auto h = head_incidence(kg), t = tail_incidence(kg);
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    if (h.col(j).sum() != 1) return nlohmann::json("head incidence column t" + std::to_string(j + 1) + " does not sum to 1");
    if (t.col(j).sum() != 1) return nlohmann::json("tail incidence column t" + std::to_string(j + 1) + " does not sum to 1");
  }
  return std::nullopt;
}

Witness gram_symmetric(const KnowledgeGraph& kg) {
  for (const auto& m : {gram_out(kg), gram_in(kg)}) {
    if (m != m.transpose()) return nlohmann::json("Gram matrix is not symmetric");
    if ((m.array() != 0 && m.array() != 1).any()) return nlohmann::json("Gram matrix has an entry outside {0,1}");
    if (kg.triple_count() && (m.diagonal().array() != 1).any()) return nlohmann::json("Gram matrix diagonal is not all 1");
  }
  return std::nullopt;
}

Witness line_operators(const KnowledgeGraph& kg) {
  const auto m = static_cast<Eigen::Index>(kg.triple_count());
  const IntMatrix id = IntMatrix::Identity(m, m);
  if (line_adjacency_out(kg) != gram_out(kg) - id) return nlohmann::json("A_out != M_out - I");
  if (line_adjacency_in(kg) != gram_in(kg) - id) return nlohmann::json("A_in != M_in - I");
  const auto a = line_adjacency_out(kg), b = line_adjacency_in(kg);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& ti = kg.triple(i);
      const auto& tj = kg.triple(j);
      if (a(i, j) != (i != j && ti.head == tj.head ? 1 : 0) || b(i, j) != (i != j && ti.tail == tj.tail ? 1 : 0))
        return nlohmann::json("line operator entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                              ") disagrees with shared-endpoint definition");
    }
  return std::nullopt;
}

Witness rank_check(const KnowledgeGraph& kg) {
  const auto rh = rank_exact(head_incidence(kg)), rt = rank_exact(tail_incidence(kg));
  if (rh != distinct_heads(kg))
    return nlohmann::json("rank(H_head) = " + std::to_string(rh) + " but |E_h| = " + std::to_string(distinct_heads(kg)));
  if (rt != distinct_tails(kg))
    return nlohmann::json("rank(H_tail) = " + std::to_string(rt) + " but |E_t| = " + std::to_string(distinct_tails(kg)));
  if (rh > kg.entity_count()) return nlohmann::json("rank exceeds n");
  return std::nullopt;
}

Witness spectrum_check(const KnowledgeGraph& kg, bool out) {
  const auto r = out ? spectrum_numeric(line_adjacency_out(kg), spectrum_formula(kg))
                     : spectrum_numeric(line_adjacency_in(kg), spectrum_formula_in(kg));
  if (!(r.max_deviation < kEigenTolerance))
    return nlohmann::json{{"max_deviation", std::isfinite(r.max_deviation) ? nlohmann::json(r.max_deviation) : nlohmann::json("inf")},
                          {"formula", r.exact_eigenvalues},
                          {"numeric", r.numeric_eigenvalues}};
  return std::nullopt;
}

Witness adjacency_consistency(const KnowledgeGraph& kg) {
  const auto a = line_adjacency_out(kg), b = line_adjacency_in(kg);
  const auto lo = build_out_line(kg), li = build_in_line(kg);
  for (std::size_t i = 0; i < kg.triple_count(); ++i)
    for (std::size_t j = 0; j < kg.triple_count(); ++j)
      if ((a(i, j) == 1) != lo.has_edge(i, j) || (b(i, j) == 1) != li.has_edge(i, j))
        return nlohmann::json("digraph edge t" + std::to_string(i + 1) + "->t" + std::to_string(j + 1) +
                              " disagrees with the line operator");
  return std::nullopt;
}

Witness scc_theorem(const KnowledgeGraph& kg) {
  const auto r = verify_scc_theorem(kg);
  if (!r.ok) return nlohmann::json(r.failures);
  return std::nullopt;
}

std::vector<std::size_t> iota_vec(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

/// Longest-path level of every entity in an acyclic graph.
std::vector<std::size_t> levels(const KnowledgeGraph& kg) {
  std::vector<std::size_t> lvl(kg.entity_count(), 0);
  for (std::size_t round = 0; round < kg.entity_count(); ++round)
    for (const auto& t : kg.triples()) lvl[t.tail] = std::max(lvl[t.tail], lvl[t.head] + 1);
  return lvl;
}

/// Functor C(K) → chain sending entities to their level.
Functor collapse_to_chain(const FreeCategory& cat) {
  const auto& kg = *cat.graph();
  const auto lvl = levels(kg);
  const std::size_t k = lvl.empty() ? 1 : *std::max_element(lvl.begin(), lvl.end()) + 1;
  auto chain = std::make_shared<const FiniteCategory>(FiniteCategory::chain(k));
  std::vector<std::size_t> gens;
  for (const auto& t : kg.triples()) gens.push_back(chain->hom(lvl[t.head], lvl[t.tail]).front());
  return extend_functor(cat, lvl, gens, chain);
}

Witness universal_property(const FreeCategory& cat, CategoryPtr self) {
  const auto& kg = *cat.graph();
  std::vector<std::size_t> gens;
  for (std::size_t j = 0; j < kg.triple_count(); ++j) gens.push_back(cat.generator(j));
  const auto F = extend_functor(cat, iota_vec(kg.entity_count()), gens, self);
  if (auto v = functor_violations(F); !v.empty()) return nlohmann::json(v);
  if (F.morphism_map != iota_vec(cat.morphism_count()))
    return nlohmann::json("extension of the identity assignment is not the identity functor");
  if (!agrees_with_extension(F, cat)) return nlohmann::json("identity functor disagrees with its extension");
  const auto G = collapse_to_chain(cat);
  if (auto v = functor_violations(G); !v.empty()) return nlohmann::json(v);
  if (!agrees_with_extension(G, cat)) return nlohmann::json("chain functor disagrees with its extension");
  return std::nullopt;
}

Witness pullback_functorial(const SieveSpace& space) {
  const auto& c = space.category();
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (auto s : space.sieves(e)) {
      if (space.pullback(s, c.identity(e)) != s) return nlohmann::json("id*S != S for " + describe(space, {e, s}));
      for (auto g : c.into(e))
        for (auto h : c.into(c.morphism(g).source)) {
          const auto gh = c.then(h, g);
          if (space.pullback(s, gh) != space.pullback(space.pullback(s, g), h))
            return nlohmann::json("(g.h)*S != h*(g*S) for " + describe(space, {e, s}));
        }
    }
  return std::nullopt;
}

Witness saturation_idempotent(const Site& site) {
  const auto& space = *site.space;
  Coverage cov(space.object_count());
  for (std::size_t e = 0; e < space.object_count(); ++e)
    for (auto s : site.topology.covering[e]) cov[e].push_back(space.members(e, s));
  if (generate_topology(space, cov) != site.topology)
    return nlohmann::json("saturating the " + site.name + " topology's own sieves changed it");
  return std::nullopt;
}

Witness axioms(const Site& site) {
  const auto r = verify_topology_axioms(site);
  if (!r.ok) return nlohmann::json{{"topology", site.name}, {"failures", r.failures}};
  return std::nullopt;
}

/// aF is a sheaf, a(aF) has the same section counts, and F → aF is
/// bijective exactly when F is a sheaf.
Witness sheafify_properties(const Presheaf& F, const Site& site) {
  const auto a = sheafify(F, site);
  const auto& aF = a.sheaf();
  if (!is_sheaf(aF, site).is_sheaf) return nlohmann::json("aF is not a sheaf");
  if (!is_natural(a.unit, F, aF)) return nlohmann::json("unit F -> aF is not natural");
  const auto aaF = sheafify(aF, site).sheaf();
  bool bijective = true;
  for (std::size_t e = 0; e < F.category().object_count(); ++e) {
    if (aaF.size(e) != aF.size(e)) return nlohmann::json("a(aF) and aF differ in size at object " + std::to_string(e));
    std::vector<std::size_t> img = a.unit.components[e];
    std::sort(img.begin(), img.end());
    if (img.size() != aF.size(e) || std::adjacent_find(img.begin(), img.end()) != img.end()) bijective = false;
  }
  if (bijective != is_sheaf(F, site).is_sheaf)
    return nlohmann::json(bijective ? "unit is bijective but F is not a sheaf" : "F is a sheaf but the unit is not bijective");
  return std::nullopt;
}

Witness omega_properties(const Site& site) {
  const auto cat = site.space->category_ptr();
  const auto O = omega(site);
  const auto r = is_sheaf(O, site);
  if (!r.is_sheaf) return nlohmann::json{{"topology", site.name}, {"omega_not_sheaf", r.message}};
  const auto subs = count_subsheaves(terminal_presheaf(cat), site);
  const auto points = global_sections(O).size();
  if (subs != points)
    return nlohmann::json{{"topology", site.name}, {"subsheaves_of_terminal", subs}, {"hom_1_omega", points}};
  return std::nullopt;
}

}  // namespace

bool VerifyReport::passed() const { return count(CheckStatus::fail) == 0; }

std::size_t VerifyReport::count(CheckStatus s) const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [&](const auto& c) { return c.status == s; }));
}

nlohmann::json VerifyReport::to_json(bool timings) const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"name", c.name},
                     {"status", c.status == CheckStatus::pass ? "pass" : c.status == CheckStatus::fail ? "fail" : "skipped"}};
    if (!c.witness.is_null()) j[c.status == CheckStatus::skipped ? "reason" : "witness"] = c.witness;
    if (timings) j["wall_ms"] = c.wall_ms;
    list.push_back(std::move(j));
  }
  return {{"seed", seed},
          {"checks", list},
          {"summary",
           {{"pass", count(CheckStatus::pass)}, {"fail", count(CheckStatus::fail)}, {"skipped", count(CheckStatus::skipped)}}},
          {"ok", passed()}};
}

void verify_graph(const KgPtr& kgp, const VerifyOptions& opt, VerifyReport& report) {
  const auto& kg = *kgp;
  run(report, "kg.hom_laws", [&]() -> Witness {
    const auto id = KgHomomorphism::identity(kgp);
    if (!check_hom(id).ok) return nlohmann::json("identity is not a homomorphism");
    if (!(compose_homs(id, id) == id)) return nlohmann::json("id . id != id");
    if (!(parse_kg(serialize_kg(kg)) == kg)) return nlohmann::json("serialization does not round-trip");
    return std::nullopt;
  });
  run(report, "incidence.column_sums", [&] { return column_sums(kg); });
  run(report, "incidence.gram_symmetric", [&] { return gram_symmetric(kg); });
  run(report, "incidence.line_operators", [&] { return line_operators(kg); });
  run(report, "incidence.rank", [&] { return rank_check(kg); });
  run(report, "incidence.spectrum_out", [&] { return spectrum_check(kg, true); });
  run(report, "incidence.spectrum_in", [&] { return spectrum_check(kg, false); });
  run(report, "line.adjacency_consistency", [&] { return adjacency_consistency(kg); });
  run(report, "line.scc_theorem", [&] { return scc_theorem(kg); });
  run(report, "line.functor_identity", [&]() -> Witness {
    const auto lm = induced_line_map(KgHomomorphism::identity(kgp));
    if (!lm.ok || lm.vertex_map != iota_vec(kg.triple_count())) return nlohmann::json("L(id) is not the identity");
    return std::nullopt;
  });

  std::shared_ptr<const FreeCategory> cat;
  std::string no_cat;
  try {
    cat = std::make_shared<const FreeCategory>(build_free_category(kgp, opt.max_path_length));
    if (!cat->closed()) no_cat = "free category is truncated by --max-path-length (cyclic graph or bound below the longest path)";
  } catch (const Error& e) {
    no_cat = e.what();
  }
  auto need_cat = [&] {
    if (!cat || !cat->closed()) throw Skip{no_cat};
  };

  run(report, "freecat.dom_cod", [&]() -> Witness {
    if (!cat) throw Skip{no_cat};
    for (std::size_t j = 0; j < kg.triple_count(); ++j) {
      const auto& p = cat->morphism(cat->generator(j));
      if (p.source != kg.triple(j).head || p.target != kg.triple(j).tail)
        return nlohmann::json("generator t" + std::to_string(j + 1) + " has wrong domain or codomain");
    }
    for (std::size_t e = 0; e < kg.entity_count(); ++e) {
      const auto& h = cat->hom(e, e);
      if (h.empty() || h.front() != cat->identity(e)) return nlohmann::json("missing identity at " + kg.entities()[e]);
      if (cat->closed() && h.size() != 1) return nlohmann::json("acyclic graph has a non-identity endomorphism");
    }
    return std::nullopt;
  });
  run(report, "freecat.walk_count", [&]() -> Witness {
    need_cat();
    if (cat->morphism_count() != walk_count(kg))
      return nlohmann::json{{"enumerated", cat->morphism_count()}, {"walk_oracle", walk_count(kg)}};
    return std::nullopt;
  });
  run(report, "freecat.fibres", [&]() -> Witness {
    const auto f = fibres(kg);
    Partition ph, pt;
    for (const auto& b : f.by_head)
      if (!b.empty()) ph.blocks.push_back(b);
    for (const auto& b : f.by_tail)
      if (!b.empty()) pt.blocks.push_back(b);
    if (!same_partition(ph, head_partition(kg)) || !same_partition(pt, tail_partition(kg)))
      return nlohmann::json("fibres differ from the line-digraph partitions");
    return std::nullopt;
  });

  CategoryPtr self;
  if (cat && cat->closed()) self = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(*cat));
  run(report, "freecat.universal_property", [&]() -> Witness {
    need_cat();
    return universal_property(*cat, self);
  });
  run(report, "freecat.functor_identity", [&]() -> Witness {
    need_cat();
    const auto F = induced_functor(KgHomomorphism::identity(kgp), *cat, *cat, self, self);
    if (!(F == identity_functor(self))) return nlohmann::json("C(id) is not the identity functor");
    return std::nullopt;
  });

  std::shared_ptr<const SieveSpace> space;
  std::string no_space = no_cat;
  if (cat && cat->closed()) {
    try {
      space = std::make_shared<const SieveSpace>(cat, opt.sieve_cap);
    } catch (const Error& e) {
      no_space = std::string("size cap: ") + e.what();
    }
  }
  std::optional<Site> path, atomic;
  if (space) {
    path = path_site(space, opt.coverage);
    atomic = atomic_site(space);
  }
  auto need_site = [&] {
    if (!space) throw Skip{no_space};
  };
  run(report, "sites.path_axioms", [&] { need_site(); return axioms(*path); });
  run(report, "sites.atomic_axioms", [&] { need_site(); return axioms(*atomic); });
  run(report, "sites.inclusion", [&]() -> Witness {
    need_site();
    if (!check_inclusion(*atomic, *path)) return nlohmann::json("an atomic covering sieve does not cover in the path topology");
    return std::nullopt;
  });
  run(report, "sites.identity_site_morphism", [&]() -> Witness {
    need_site();
    const auto r = check_site_morphism(identity_functor(self), *atomic, *path);
    if (!r.ok) return nlohmann::json(r.failures);
    return std::nullopt;
  });
  run(report, "sites.saturation_idempotent", [&]() -> Witness {
    need_site();
    if (auto w = saturation_idempotent(*path)) return w;
    return saturation_idempotent(*atomic);
  });
  run(report, "sites.pullback_functorial", [&] { need_site(); return pullback_functorial(*space); });

  constexpr std::size_t kTinyObjects = 8;
  auto need_tiny = [&] {
    need_site();
    if (kg.entity_count() > kTinyObjects)
      throw Skip{"sheaf enumeration is limited to graphs with at most " + std::to_string(kTinyObjects) + " entities"};
  };
  run(report, "sheaves.terminal_is_sheaf", [&]() -> Witness {
    need_site();
    const auto one = terminal_presheaf(cat);
    if (!is_sheaf(one, *path).is_sheaf || !is_sheaf(one, *atomic).is_sheaf) return nlohmann::json("terminal presheaf is not a sheaf");
    return std::nullopt;
  });
  run(report, "sheaves.omega", [&]() -> Witness {
    need_tiny();
    if (auto w = omega_properties(*path)) return w;
    return omega_properties(*atomic);
  });
  run(report, "sheaves.sheafify", [&]() -> Witness {
    need_tiny();
    Rng rng(opt.seed);
    for (std::size_t k = 0; k < 5; ++k) {
      const auto F = random_presheaf(rng, cat, opt.section_cap);
      if (auto w = sheafify_properties(F, *path)) return nlohmann::json{{"instance", k}, {"failure", *w}, {"presheaf", presheaf_to_json(F)}};
    }
    return std::nullopt;
  });
  run(report, "sheaves.direct_image", [&]() -> Witness {
    need_tiny();
    Rng rng(opt.seed + 1);
    for (std::size_t k = 0; k < 5; ++k) {
      const auto F = random_presheaf(rng, cat, opt.section_cap);
      if (!is_sheaf(direct_image(F), *atomic).is_sheaf) return nlohmann::json{{"instance", k}, {"presheaf", presheaf_to_json(F)}};
    }
    return std::nullopt;
  });
  if (opt.presheaf) {
    run(report, "sheaves.input_is_sheaf", [&]() -> Witness {
      need_site();
      const auto F = load_presheaf(cat, *opt.presheaf);
      const auto r = is_sheaf(F, *path);
      if (!r.is_sheaf) return sheaf_check_to_json(r, F, *path);
      return std::nullopt;
    });
  }
  run(report, "sheaves.adjunction", [&]() -> Witness {
    need_tiny();
    Rng rng(opt.seed + 2);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto F = random_presheaf(rng, cat, std::min<std::size_t>(2, opt.section_cap));
      const auto H = random_presheaf(rng, cat, std::min<std::size_t>(2, opt.section_cap));
      const auto G = sheafify(H, *path).sheaf();
      const auto cap = std::max({opt.section_cap, G.max_section_count(), F.max_section_count()});
      const auto r = check_adjunction(F, G, *path, cap);
      if (!r.ok) return nlohmann::json{{"instance", k}, {"failure", r.message}};
      const auto p = check_preserves_products(F, H, *path);
      if (!p.ok) return nlohmann::json{{"instance", k}, {"failure", p.message}};
    }
    return std::nullopt;
  });
}

// --- random suites --------------------------------------------------------

std::optional<nlohmann::json> suite_incidence_line(Rng& rng, std::size_t cases, std::size_t max_entities,
                                                   std::size_t max_triples) {
  for (std::size_t k = 0; k < cases; ++k) {
    const auto kg = k % 5 == 4 ? random_shared_head_kg(rng, std::min<std::size_t>(max_triples, 30))
                               : random_kg(rng, max_entities, max_triples);
    for (auto check : {column_sums, gram_symmetric, line_operators, rank_check, adjacency_consistency, scc_theorem})
      if (auto w = check(kg)) return case_witness(k, kg, w->dump());
    if (auto w = spectrum_check(kg, true)) return case_witness(k, kg, w->dump());
    if (auto w = spectrum_check(kg, false)) return case_witness(k, kg, w->dump());
  }
  return std::nullopt;
}

std::optional<nlohmann::json> suite_categories(Rng& rng, std::size_t cases, std::size_t max_entities,
                                               std::size_t max_triples) {
  for (std::size_t k = 0; k < cases; ++k) {
    auto kgp = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, max_entities, max_triples));
    const auto& kg = *kgp;
    const auto cat = build_free_category(kgp);
    if (cat.morphism_count() != walk_count(kg))
      return case_witness(k, kg, "morphism count " + std::to_string(cat.morphism_count()) + " != walk oracle " +
                                     std::to_string(walk_count(kg)));
    auto self = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(cat));
    if (auto w = universal_property(cat, self)) return case_witness(k, kg, w->dump());

    auto [k2, f] = random_hom(rng, kgp, 2, true);
    auto [k3, g] = random_hom(rng, k2, 2, true);
    const auto gf = compose_homs(g, f);
    if (!check_hom(f).ok || !check_hom(g).ok || !check_hom(gf).ok) return case_witness(k, kg, "hom composition left KG");
    const auto c2 = build_free_category(k2), c3 = build_free_category(k3);
    auto s2 = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(c2));
    auto s3 = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(c3));
    const auto Cf = induced_functor(f, cat, c2, self, s2);
    const auto Cg = induced_functor(g, c2, c3, s2, s3);
    const auto Cgf = induced_functor(gf, cat, c3, self, s3);
    for (const auto* F : {&Cf, &Cg, &Cgf})
      if (auto v = functor_violations(*F); !v.empty()) return case_witness(k, kg, "induced functor: " + v.front());
    if (!(Cgf == compose_functors(Cg, Cf))) return case_witness(k, kg, "C(g.f) != C(g).C(f)");
    const auto Lf = induced_line_map(f), Lg = induced_line_map(g), Lgf = induced_line_map(gf);
    if (!Lf.ok || !Lg.ok || !Lgf.ok) return case_witness(k, kg, "line map does not preserve edges");
    if (Lgf.vertex_map != compose_maps(Lg.vertex_map, Lf.vertex_map)) return case_witness(k, kg, "L(g.f) != L(g).L(f)");
  }
  return std::nullopt;
}

std::optional<nlohmann::json> suite_topology(Rng& rng, std::size_t cases, std::size_t sieve_cap) {
  std::size_t done = 0;
  for (std::size_t attempt = 0; done < cases && attempt < cases * 20; ++attempt) {
    auto kgp = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, 6, 8));
    auto cat = std::make_shared<const FreeCategory>(build_free_category(kgp));
    std::shared_ptr<const SieveSpace> space;
    try {
      space = std::make_shared<const SieveSpace>(cat, sieve_cap);
    } catch (const SizeError&) {
      continue;
    }
    const auto k = done++;
    const auto path = path_site(space), literal = path_site(space, PathCoverage::literal), atomic = atomic_site(space);
    for (const auto* s : {&path, &literal, &atomic}) {
      if (auto w = axioms(*s)) return case_witness(k, *kgp, w->dump());
      if (auto w = saturation_idempotent(*s)) return case_witness(k, *kgp, w->dump());
    }
    if (!check_inclusion(atomic, path)) return case_witness(k, *kgp, "J_atom is not included in J_path");
    if (!check_inclusion(atomic, literal)) return case_witness(k, *kgp, "J_atom is not included in the literal topology");
    if (!check_inclusion(path, literal)) return case_witness(k, *kgp, "path topology is not included in the literal one");
    for (std::size_t e = 0; e < cat->object_count(); ++e)
      if (atomic.topology.covering[e].size() != 1)
        return case_witness(k, *kgp, "atomic topology has a non-maximal covering sieve");
    if (auto w = pullback_functorial(*space)) return case_witness(k, *kgp, w->dump());
  }
  if (done < cases) return nlohmann::json("could only generate " + std::to_string(done) + " graphs within the sieve cap");
  return std::nullopt;
}

namespace {

struct TinySite {
  KgPtr kg;
  std::shared_ptr<const FreeCategory> cat;
  std::shared_ptr<const SieveSpace> space;
};

TinySite tiny_site(Rng& rng, std::size_t max_objects) {
  auto kgp = std::make_shared<const KnowledgeGraph>(random_acyclic_kg(rng, max_objects, max_objects + 1));
  auto cat = std::make_shared<const FreeCategory>(build_free_category(kgp));
  auto space = std::make_shared<const SieveSpace>(cat, kMaxSieveCap);
  return {kgp, cat, space};
}

}  // namespace

std::optional<nlohmann::json> suite_sheafification(Rng& rng, std::size_t cases, std::size_t max_objects,
                                                   std::size_t max_sections) {
  for (std::size_t k = 0; k < cases; ++k) {
    const auto t = tiny_site(rng, max_objects);
    const auto site = path_site(t.space);
    const auto F = random_presheaf(rng, t.cat, max_sections);
    if (auto w = sheafify_properties(F, site)) return case_witness(k, *t.kg, w->dump());
    // A sheaf input: sheafify once more and check the unit is bijective.
    const auto aF = sheafify(F, site).sheaf();
    if (auto w = sheafify_properties(aF, site)) return case_witness(k, *t.kg, "on aF: " + w->dump());
  }
  return std::nullopt;
}

std::optional<nlohmann::json> suite_adjunction(Rng& rng, std::size_t cases, std::size_t max_objects,
                                               std::size_t max_sections) {
  for (std::size_t k = 0; k < cases; ++k) {
    const auto t = tiny_site(rng, max_objects);
    const auto site = path_site(t.space);
    const auto F = random_presheaf(rng, t.cat, max_sections);
    const auto H = random_presheaf(rng, t.cat, max_sections);
    const auto G = sheafify(H, site).sheaf();
    const auto r = check_adjunction(F, G, site, std::max({max_sections, G.max_section_count(), F.max_section_count()}));
    if (!r.ok) return case_witness(k, *t.kg, r.message);
    if (k < 3) {
      const auto p = check_preserves_products(F, H, site);
      if (!p.ok) return case_witness(k, *t.kg, p.message);
    }
  }
  return std::nullopt;
}

std::optional<nlohmann::json> suite_omega(Rng& rng, std::size_t cases, std::size_t max_objects) {
  for (std::size_t k = 0; k < cases; ++k) {
    const auto t = tiny_site(rng, max_objects);
    for (const auto& site : {path_site(t.space), atomic_site(t.space)})
      if (auto w = omega_properties(site)) return case_witness(k, *t.kg, w->dump());
  }
  return std::nullopt;
}

void verify_random(const VerifyOptions& opt, VerifyReport& report) {
  Rng rng(opt.seed);
  const std::size_t n = opt.cases;
  run(report, "random.incidence_line", [&] { return suite_incidence_line(rng, n, opt.max_size, 3 * opt.max_size); });
  run(report, "random.categories", [&] { return suite_categories(rng, std::max<std::size_t>(1, n / 2), 8, 12); });
  run(report, "random.topology", [&] { return suite_topology(rng, std::min<std::size_t>(n, 50), opt.sieve_cap); });
  run(report, "random.sheafification",
      [&] { return suite_sheafification(rng, std::min<std::size_t>(n, 30), 4, opt.section_cap); });
  run(report, "random.adjunction",
      [&] { return suite_adjunction(rng, std::min<std::size_t>(n, 20), 4, std::min<std::size_t>(2, opt.section_cap)); });
  run(report, "random.omega", [&] { return suite_omega(rng, std::min<std::size_t>(n, 10), 4); });
}

}  // namespace kgtopos
