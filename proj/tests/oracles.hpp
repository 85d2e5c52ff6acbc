#pragma once
// Brute-force reference implementations used only by the tests. They share
// no algorithmic code with the library beyond its data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include <boost/rational.hpp>

#include "kgtopos/free_category.hpp"
#include "kgtopos/incidence.hpp"
#include "kgtopos/kg.hpp"
#include "kgtopos/line_digraph.hpp"
#include "kgtopos/sheaves.hpp"
#include "kgtopos/sites.hpp"

namespace oracle {

using kgtopos::FreeCategory;
using kgtopos::KnowledgeGraph;
using kgtopos::Presheaf;

// Gaussian elimination over the rationals.
inline std::size_t rank(const kgtopos::IntMatrix& m) {
  using Q = boost::rational<std::int64_t>;
  std::vector<std::vector<Q>> a(m.rows(), std::vector<Q>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a[i][j] = Q(m(i, j));
  std::size_t r = 0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(m.cols()) && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == Q(0)) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (i != r && a[i][c] != Q(0)) {
        const Q f = a[i][c] / a[r][c];
        for (std::size_t j = c; j < a[i].size(); ++j) a[i][j] -= f * a[r][j];
      }
    ++r;
  }
  return r;
}

// Strongly connected components from the Floyd-Warshall reachability closure,
// returned as a sorted set of sorted blocks.
inline std::set<std::vector<std::size_t>> scc(const kgtopos::Digraph& g) {
  const auto n = g.vertex_count();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) {
    r[v][v] = true;
    for (auto w : g.adjacency[v]) r[v][w] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  std::set<std::vector<std::size_t>> out;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> b;
    for (std::size_t w = 0; w < n; ++w)
      if (r[v][w] && r[w][v]) b.push_back(w);
    out.insert(b);
  }
  return out;
}

inline std::set<std::vector<std::size_t>> as_set(const kgtopos::Partition& p) {
  std::set<std::vector<std::size_t>> out;
  for (auto b : p.blocks) {
    std::sort(b.begin(), b.end());
    out.insert(b);
  }
  return out;
}

// Number of paths (including identities) by depth-first enumeration.
inline std::size_t path_count(const KnowledgeGraph& kg) {
  std::function<std::size_t(std::size_t)> from = [&](std::size_t v) -> std::size_t {
    std::size_t c = 1;
    for (const auto& t : kg.triples())
      if (t.head == v) c += from(t.tail);
    return c;
  };
  std::size_t total = 0;
  for (std::size_t v = 0; v < kg.entity_count(); ++v) total += from(v);
  return total;
}

// Composition through arrow concatenation, looked up by path.
inline std::size_t then(const FreeCategory& c, std::size_t f, std::size_t g) {
  auto p = c.morphism(f).arrows;
  const auto& q = c.morphism(g).arrows;
  p.insert(p.end(), q.begin(), q.end());
  kgtopos::Path path{c.morphism(f).source, c.morphism(g).target, p};
  return *c.find(path);
}

inline std::vector<std::size_t> into(const FreeCategory& c, std::size_t e) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < c.morphism_count(); ++f)
    if (c.morphism(f).target == e) out.push_back(f);
  return out;
}

using MorphismSet = std::set<std::size_t>;

// All subsets of the morphisms into e that are closed under precomposition.
inline std::vector<MorphismSet> sieves(const FreeCategory& c, std::size_t e) {
  const auto in = into(c, e);
  std::vector<MorphismSet> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << in.size()); ++mask) {
    MorphismSet s;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (mask >> i & 1) s.insert(in[i]);
    bool closed = true;
    for (auto f : s)
      for (auto h : into(c, c.morphism(f).source))
        if (!s.contains(then(c, h, f))) closed = false;
    if (closed) out.push_back(s);
  }
  return out;
}

inline MorphismSet members(const kgtopos::SieveSpace& space, std::size_t e, kgtopos::SieveMask m) {
  const auto v = space.members(e, m);
  return {v.begin(), v.end()};
}

inline MorphismSet pullback(const FreeCategory& c, const MorphismSet& s, std::size_t g) {
  MorphismSet out;
  for (auto h : into(c, c.morphism(g).source))
    if (s.contains(then(c, h, g))) out.insert(h);
  return out;
}

// Checks the three topology axioms directly on morphism sets.
inline bool topology_axioms(const kgtopos::Site& site) {
  const auto& c = site.category();
  const auto& space = *site.space;
  std::vector<std::set<MorphismSet>> cov(c.object_count());
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (auto m : site.topology.covering[e]) cov[e].insert(members(space, e, m));
  for (std::size_t e = 0; e < c.object_count(); ++e) {
    const auto all = into(c, e);
    if (!cov[e].contains(MorphismSet(all.begin(), all.end()))) return false;
    for (const auto& s : cov[e])
      for (auto g : all)
        if (!cov[c.morphism(g).source].contains(pullback(c, s, g))) return false;
    for (const auto& s : cov[e])
      for (const auto& r : sieves(c, e)) {
        bool locally = true;
        for (auto g : s)
          if (!cov[c.morphism(g).source].contains(pullback(c, r, g))) locally = false;
        if (locally && !cov[e].contains(r)) return false;
      }
  }
  return true;
}

// Every choice of values over all sieve members, kept when compatible.
inline std::vector<std::map<std::size_t, std::size_t>> matching_families(const Presheaf& F, const MorphismSet& s) {
  const auto& c = F.category();
  std::vector<std::size_t> mem(s.begin(), s.end());
  std::vector<std::map<std::size_t, std::size_t>> out;
  std::map<std::size_t, std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == mem.size()) {
      for (auto f : mem)
        for (auto h : into(c, c.morphism(f).source))
          if (F.restrict(h, cur[f]) != cur[then(c, h, f)]) return;
      out.push_back(cur);
      return;
    }
    for (std::size_t x = 0; x < F.size(c.morphism(mem[i]).source); ++x) {
      cur[mem[i]] = x;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

// Sheaf condition by counting amalgamations of every matching family.
inline bool is_sheaf(const Presheaf& F, const kgtopos::Site& site) {
  const auto& c = F.category();
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (auto m : site.topology.covering[e]) {
      const auto s = members(*site.space, e, m);
      for (const auto& fam : matching_families(F, s)) {
        std::size_t count = 0;
        for (std::size_t x = 0; x < F.size(e); ++x) {
          bool ok = true;
          for (const auto& [f, v] : fam)
            if (F.restrict(f, x) != v) ok = false;
          count += ok;
        }
        if (count != 1) return false;
      }
    }
  return true;
}

// All natural transformations F → G by trying every component tuple.
inline std::size_t nat_count(const Presheaf& F, const Presheaf& G) {
  const auto& c = F.category();
  const auto n = c.object_count();
  std::vector<std::vector<std::size_t>> comp(n);
  std::size_t count = 0;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t e, std::size_t x) {
    if (e == n) {
      for (std::size_t f = 0; f < c.morphism_count(); ++f) {
        const auto& p = c.morphism(f);
        for (std::size_t y = 0; y < F.size(p.target); ++y)
          if (comp[p.source][F.restrict(f, y)] != G.restrict(f, comp[p.target][y])) return;
      }
      ++count;
      return;
    }
    if (x == F.size(e)) return rec(e + 1, 0);
    comp[e].resize(F.size(e));
    for (std::size_t v = 0; v < G.size(e); ++v) {
      comp[e][x] = v;
      rec(e, x + 1);
    }
  };
  rec(0, 0);
  return count;
}

// Subpresheaves of F (subsets closed under restriction) that are sheaves.
inline std::size_t subsheaf_count(const Presheaf& F, const kgtopos::Site& site) {
  const auto& c = F.category();
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (std::size_t x = 0; x < F.size(e); ++x) slots.push_back({e, x});
  std::size_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    std::set<std::pair<std::size_t, std::size_t>> in;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (mask >> i & 1) in.insert(slots[i]);
    bool closed = true;
    for (const auto& [e, x] : in)
      for (auto f : into(c, e))
        if (!in.contains({c.morphism(f).source, F.restrict(f, x)})) closed = false;
    if (!closed) continue;
    // Sheaf condition for the subobject: each matching family valued in the
    // subobject whose F-amalgamation exists must have it in the subobject.
    bool sheaf = true;
    for (std::size_t e = 0; e < c.object_count() && sheaf; ++e)
      for (auto m : site.topology.covering[e]) {
        for (const auto& fam : matching_families(F, members(*site.space, e, m))) {
          bool inside = true;
          for (const auto& [f, v] : fam)
            if (!in.contains({c.morphism(f).source, v})) inside = false;
          if (!inside) continue;
          for (std::size_t x = 0; x < F.size(e); ++x) {
            bool amalg = true;
            for (const auto& [f, v] : fam)
              if (F.restrict(f, x) != v) amalg = false;
            if (amalg && !in.contains({e, x})) sheaf = false;
          }
        }
      }
    count += sheaf;
  }
  return count;
}

// Functors C(K) → D agreeing with the given object and generator assignment,
// found by trying every morphism image for every non-generator.
inline std::size_t extension_count(const FreeCategory& c, const kgtopos::FiniteCategory& d,
                                   const std::vector<std::size_t>& objects, const std::vector<std::size_t>& generators) {
  const auto m = c.morphism_count();
  std::vector<std::size_t> image(m, kgtopos::kNoMorphism);
  for (std::size_t j = 0; j < generators.size(); ++j) image[c.generator(j)] = generators[j];
  std::vector<std::size_t> free;
  for (std::size_t f = 0; f < m; ++f)
    if (image[f] == kgtopos::kNoMorphism) free.push_back(f);
  std::size_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == free.size()) {
      for (std::size_t e = 0; e < c.object_count(); ++e)
        if (image[c.identity(e)] != d.identity(objects[e])) return;
      for (std::size_t f = 0; f < m; ++f)
        for (std::size_t g = 0; g < m; ++g)
          if (c.morphism(f).target == c.morphism(g).source && image[then(c, f, g)] != d.then(image[f], image[g]))
            return;
      ++count;
      return;
    }
    const auto& p = c.morphism(free[i]);
    for (auto k : d.hom(objects[p.source], objects[p.target])) {
      image[free[i]] = k;
      rec(i + 1);
    }
  };
  rec(0);
  return count;
}

}  // namespace oracle
