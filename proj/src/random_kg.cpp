#include "kgtopos/random_kg.hpp"

#include <algorithm>
#include <set>

namespace kgtopos {

namespace {

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<std::string> names(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Drops predicates no triple uses, keeping relative order.
KnowledgeGraph assemble(std::size_t n, std::size_t pool, std::vector<Triple> triples) {
  std::vector<bool> used(pool, false);
  for (const auto& t : triples) used[t.predicate] = true;
  std::vector<std::size_t> remap(pool, 0);
  std::vector<std::string> preds;
  for (std::size_t p = 0; p < pool; ++p)
    if (used[p]) {
      remap[p] = preds.size();
      preds.push_back("p" + std::to_string(p));
    }
  for (auto& t : triples) t.predicate = remap[t.predicate];
  return KnowledgeGraph(names("e", n), std::move(preds), std::move(triples));
}

}  // namespace

KnowledgeGraph random_kg(Rng& rng, std::size_t max_entities, std::size_t max_triples, std::size_t predicate_pool) {
  const std::size_t n = uniform(rng, 1, std::max<std::size_t>(1, max_entities));
  const std::size_t possible = n * n * predicate_pool;
  const std::size_t m = std::min(uniform(rng, 0, max_triples), possible);
  std::set<Triple> seen;
  std::vector<Triple> triples;
  while (triples.size() < m) {
    Triple t{uniform(rng, 0, n - 1), uniform(rng, 0, predicate_pool - 1), uniform(rng, 0, n - 1)};
    if (seen.insert(t).second) triples.push_back(t);
  }
  return assemble(n, predicate_pool, std::move(triples));
}

KnowledgeGraph random_acyclic_kg(Rng& rng, std::size_t max_entities, std::size_t max_triples,
                                 std::size_t predicate_pool) {
  const std::size_t n = uniform(rng, 1, std::max<std::size_t>(1, max_entities));
  const std::size_t possible = n * (n - 1) / 2 * predicate_pool;
  const std::size_t m = std::min(uniform(rng, 0, max_triples), possible);
  std::set<Triple> seen;
  std::vector<Triple> triples;
  while (triples.size() < m) {
    std::size_t a = uniform(rng, 0, n - 1), b = uniform(rng, 0, n - 1);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    Triple t{a, uniform(rng, 0, predicate_pool - 1), b};
    if (seen.insert(t).second) triples.push_back(t);
  }
  return assemble(n, predicate_pool, std::move(triples));
}

KnowledgeGraph random_shared_head_kg(Rng& rng, std::size_t max_triples) {
  const std::size_t m = uniform(rng, 1, std::max<std::size_t>(1, max_triples));
  std::vector<Triple> triples;
  for (std::size_t j = 0; j < m; ++j) triples.push_back({0, 0, j + 1});
  return assemble(m + 1, 1, std::move(triples));
}

HomPair random_hom(Rng& rng, const KgPtr& source, std::size_t extra, bool keep_acyclic) {
  const auto& src = *source;
  const std::size_t n = src.entity_count();
  std::vector<std::size_t> emap(n);
  std::size_t target_n;
  if (keep_acyclic) {
    // Monotone map; merging i and i+1 only when no triple joins them.
    std::set<std::pair<std::size_t, std::size_t>> joined;
    for (const auto& t : src.triples()) joined.insert({t.head, t.tail});
    std::size_t cur = uniform(rng, 0, 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        bool may_merge = true;
        for (std::size_t k = 0; k < i; ++k)
          if (emap[k] == cur && (joined.contains({k, i}) || joined.contains({i, k}))) may_merge = false;
        if (!may_merge || uniform(rng, 0, 2) != 0) cur += uniform(rng, 1, 2);
      }
      emap[i] = cur;
    }
    target_n = (n ? emap.back() : 0) + 1 + uniform(rng, 0, 1);
  } else {
    target_n = uniform(rng, 1, n + 1);
    for (auto& e : emap) e = uniform(rng, 0, target_n - 1);
  }
  const std::size_t target_pool = std::max<std::size_t>(1, src.predicate_count());
  std::vector<std::size_t> pmap(src.predicate_count());
  for (auto& p : pmap) p = uniform(rng, 0, target_pool - 1);

  std::set<Triple> seen;
  std::vector<Triple> triples;
  for (const auto& t : src.triples()) {
    Triple u{emap[t.head], pmap[t.predicate], emap[t.tail]};
    if (seen.insert(u).second) triples.push_back(u);
  }
  for (std::size_t k = 0; k < extra * 4 && triples.size() < src.triple_count() + extra; ++k) {
    std::size_t a = uniform(rng, 0, target_n - 1), b = uniform(rng, 0, target_n - 1);
    if (keep_acyclic) {
      if (a == b) continue;
      if (a > b) std::swap(a, b);
    }
    Triple u{a, uniform(rng, 0, target_pool - 1), b};
    if (seen.insert(u).second) triples.push_back(u);
  }
  // Keep every predicate so that pmap stays valid.
  auto target = std::make_shared<const KnowledgeGraph>(names("e", target_n), names("p", target_pool), std::move(triples));
  HomPair out{target, KgHomomorphism{source, target, emap, pmap}};
  return out;
}

Presheaf random_presheaf(Rng& rng, std::shared_ptr<const FreeCategory> category, std::size_t max_sections,
                         std::size_t min_sections) {
  const auto& kg = *category->graph();
  std::vector<std::vector<std::string>> secs(kg.entity_count());
  for (std::size_t e = 0; e < kg.entity_count(); ++e) {
    const auto size = uniform(rng, min_sections, max_sections);
    for (std::size_t x = 0; x < size; ++x) secs[e].push_back(kg.entities()[e] + "." + std::to_string(x));
  }
  // A restriction out of a nonempty set into an empty one is impossible;
  // give such heads one section.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : kg.triples())
      if (!secs[t.tail].empty() && secs[t.head].empty()) {
        secs[t.head].push_back(kg.entities()[t.head] + ".0");
        changed = true;
      }
  }
  std::vector<std::vector<std::size_t>> gens(kg.triple_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    for (std::size_t x = 0; x < secs[t.tail].size(); ++x) gens[j].push_back(uniform(rng, 0, secs[t.head].size() - 1));
  }
  return Presheaf(std::move(category), std::move(secs), std::move(gens));
}

}  // namespace kgtopos
