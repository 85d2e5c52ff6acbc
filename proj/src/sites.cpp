#include "kgtopos/sites.hpp"

#include <algorithm>
#include <bit>

#include "kgtopos/error.hpp"

namespace kgtopos {

namespace {

constexpr std::size_t kMaxWitnesses = 32;

void note(AxiomReport& r, std::string what) {
  r.ok = false;
  if (r.failures.size() < kMaxWitnesses) r.failures.push_back(std::move(what));
}

}  // namespace

SieveSpace::SieveSpace(std::shared_ptr<const FreeCategory> category, std::size_t cap)
    : category_(std::move(category)), cap_(cap) {
  const auto& c = *category_;
  if (!c.closed()) throw InfinityError("sites need a closed free category (acyclic graph)");
  if (cap_ > kMaxSieveCap) throw SizeError("sieve cap may not exceed " + std::to_string(kMaxSieveCap));
  const auto& kg = *c.graph();
  for (std::size_t e = 0; e < c.object_count(); ++e)
    if (c.into(e).size() > cap_)
      throw SizeError("object '" + kg.entities()[e] + "' has " + std::to_string(c.into(e).size()) +
                      " incoming morphisms (sieve cap " + std::to_string(cap_) +
                      "); use a smaller graph or raise --sieve-cap");

  bit_.assign(c.morphism_count(), 0);
  maximal_.assign(c.object_count(), 0);
  for (std::size_t e = 0; e < c.object_count(); ++e) {
    const auto& in = c.into(e);
    for (std::size_t k = 0; k < in.size(); ++k) bit_[in[k]] = k;
    maximal_[e] = in.size() == 64 ? ~SieveMask{0} : (SieveMask{1} << in.size()) - 1;
  }
  precompose_.assign(c.morphism_count(), {});
  down_.assign(c.morphism_count(), 0);
  for (std::size_t g = 0; g < c.morphism_count(); ++g) {
    const auto& in = c.into(c.morphism(g).source);
    for (auto h : in) {
      const auto gh = c.then(h, g);
      if (gh == kNoMorphism) throw InfinityError("composite missing from the free category");
      precompose_[g].push_back(gh);
      down_[g] |= SieveMask{1} << bit_[gh];
    }
  }
  sieves_.assign(c.object_count(), {});
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (SieveMask m = 0;; ++m) {
      if (is_sieve(e, m)) sieves_[e].push_back(m);
      if (m == maximal_[e]) break;
    }
}

bool SieveSpace::is_sieve(std::size_t object, SieveMask mask) const {
  if (mask & ~maximal_.at(object)) return false;
  const auto& in = incoming(object);
  for (SieveMask rest = mask; rest; rest &= rest - 1) {
    const auto k = static_cast<std::size_t>(std::countr_zero(rest));
    if ((down_[in[k]] & mask) != down_[in[k]]) return false;
  }
  return true;
}

SieveMask SieveSpace::generated(std::size_t object, const std::vector<std::size_t>& family) const {
  SieveMask m = 0;
  for (auto f : family) {
    if (category_->morphism(f).target != object)
      throw TypingError("family member " + category_->describe(f) + " does not end at the object");
    m |= down_[f];
  }
  return m;
}

SieveMask SieveSpace::pullback(SieveMask s, std::size_t g) const {
  const auto& pre = precompose_.at(g);
  SieveMask out = 0;
  for (std::size_t k = 0; k < pre.size(); ++k)
    if (s >> bit_[pre[k]] & 1) out |= SieveMask{1} << k;
  return out;
}

std::vector<std::size_t> SieveSpace::members(std::size_t object, SieveMask mask) const {
  std::vector<std::size_t> out;
  const auto& in = incoming(object);
  for (std::size_t k = 0; k < in.size(); ++k)
    if (mask >> k & 1) out.push_back(in[k]);
  return out;
}

std::vector<Sieve> enumerate_sieves(const SieveSpace& space, std::size_t object) {
  std::vector<Sieve> out;
  for (auto m : space.sieves(object)) out.push_back({object, m});
  return out;
}

std::size_t Topology::covering_count() const {
  std::size_t n = 0;
  for (const auto& c : covering) n += c.size();
  return n;
}

bool literal_path_cover(const FreeCategory& cat, std::size_t object, const std::vector<std::size_t>& family) {
  for (auto f : family)
    if (cat.morphism(f).target != object) throw TypingError("family member does not end at the object");
  std::vector<bool> reachable(cat.object_count(), false);
  for (auto p : cat.out_of(object))
    if (!cat.morphism(p).is_identity()) reachable[cat.morphism(p).target] = true;
  for (std::size_t target = 0; target < cat.object_count(); ++target) {
    if (!reachable[target]) continue;
    bool witnessed = false;
    for (auto f : family) {
      for (auto p : cat.hom(object, target)) {
        if (cat.morphism(p).is_identity()) continue;
        if (cat.then(f, p) != kNoMorphism) {
          witnessed = true;
          break;
        }
      }
      if (witnessed) break;
    }
    if (!witnessed) return false;
  }
  return true;
}

Coverage path_factoring_coverage(const SieveSpace& space) {
  const auto& c = space.category();
  Coverage cov(c.object_count());
  for (std::size_t e = 0; e < c.object_count(); ++e) {
    cov[e].push_back({c.identity(e)});
    std::vector<std::size_t> gens;
    for (auto f : c.into(e))
      if (c.morphism(f).length() == 1) gens.push_back(f);
    if (!gens.empty()) cov[e].push_back(std::move(gens));
  }
  return cov;
}

Coverage literal_coverage(const SieveSpace& space) {
  const auto& c = space.category();
  Coverage cov(c.object_count());
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (auto f : c.into(e)) {
      // Each nonempty family satisfies the literal condition; singletons
      // generate the same topology as all of them.
      if (literal_path_cover(c, e, {f})) cov[e].push_back({f});
    }
  return cov;
}

Coverage isomorphism_coverage(const SieveSpace& space) {
  const auto& c = space.category();
  Coverage cov(c.object_count());
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (auto f : c.into(e)) {
      const auto src = c.morphism(f).source;
      for (auto g : c.hom(e, src))
        if (c.then(f, g) == c.identity(src) && c.then(g, f) == c.identity(e)) {
          cov[e].push_back({f});
          break;
        }
    }
  return cov;
}

Topology generate_topology(const SieveSpace& space, const Coverage& coverage) {
  const std::size_t n = space.object_count();
  if (coverage.size() != n) throw TypingError("coverage must list families for every object");
  const auto& c = space.category();
  Topology J;
  J.covering.assign(n, {});
  for (std::size_t e = 0; e < n; ++e) {
    J.covering[e].insert(space.maximal(e));
    for (const auto& family : coverage[e])
      if (!family.empty()) J.covering[e].insert(space.generated(e, family));
  }

  bool changed = true;
  while (changed) {
    changed = false;
    // Stability under pullback.
    for (std::size_t e = 0; e < n; ++e) {
      const std::vector<SieveMask> current(J.covering[e].begin(), J.covering[e].end());
      for (auto s : current)
        for (auto g : c.into(e)) {
          const auto d = c.morphism(g).source;
          if (J.covering[d].insert(space.pullback(s, g)).second) changed = true;
        }
    }
    // Transitivity (local character): R covers if some covering S has every
    // f*R covering.
    for (std::size_t e = 0; e < n; ++e) {
      const auto& in = space.incoming(e);
      for (auto r : space.sieves(e)) {
        if (J.covering[e].contains(r)) continue;
        SieveMask good = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          const auto f = in[k];
          if (J.covering[c.morphism(f).source].contains(space.pullback(r, f))) good |= SieveMask{1} << k;
        }
        const bool covered = std::any_of(J.covering[e].begin(), J.covering[e].end(),
                                         [&](SieveMask s) { return (s & good) == s; });
        if (covered) {
          J.covering[e].insert(r);
          changed = true;
        }
      }
    }
  }
  return J;
}

Topology atomic_topology(const SieveSpace& space) {
  return generate_topology(space, isomorphism_coverage(space));
}

Site path_site(SieveSpacePtr space, PathCoverage kind) {
  Site s{space, {}, kind == PathCoverage::factoring ? "path" : "path-literal"};
  s.topology = generate_topology(*space, kind == PathCoverage::factoring ? path_factoring_coverage(*space)
                                                                         : literal_coverage(*space));
  return s;
}

Site atomic_site(SieveSpacePtr space) {
  Site s{space, atomic_topology(*space), "atomic"};
  return s;
}

std::string describe(const SieveSpace& space, const Sieve& s) {
  const auto& c = space.category();
  std::string out = "{";
  bool first = true;
  for (auto f : space.members(s.object, s.members)) {
    if (!first) out += ", ";
    out += c.describe(f);
    first = false;
  }
  return out + "} on " + c.graph()->entities()[s.object];
}

AxiomReport verify_topology_axioms(const Site& site) {
  AxiomReport r;
  const auto& space = *site.space;
  const auto& c = space.category();
  const auto& J = site.topology;
  if (J.covering.size() != c.object_count()) {
    note(r, "topology is not defined on exactly the category's objects");
    return r;
  }
  for (std::size_t e = 0; e < c.object_count(); ++e) {
    for (auto s : J.covering[e])
      if (!space.is_sieve(e, s)) note(r, "covering set " + describe(space, {e, s}) + " is not a sieve");
    if (!J.covers(e, space.maximal(e)))
      note(r, "maximality: maximal sieve on " + c.graph()->entities()[e] + " does not cover");
  }
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (auto s : J.covering[e])
      for (auto g : c.into(e)) {
        const auto d = c.morphism(g).source;
        const auto pb = space.pullback(s, g);
        if (!J.covers(d, pb))
          note(r, "stability: pullback of " + describe(space, {e, s}) + " along " + c.describe(g) +
                      " is " + describe(space, {d, pb}) + ", not covering");
      }
  for (std::size_t e = 0; e < c.object_count(); ++e) {
    const auto& in = space.incoming(e);
    for (auto rs : space.sieves(e)) {
      if (J.covers(e, rs)) continue;
      SieveMask good = 0;
      for (std::size_t k = 0; k < in.size(); ++k)
        if (J.covers(c.morphism(in[k]).source, space.pullback(rs, in[k]))) good |= SieveMask{1} << k;
      for (auto s : J.covering[e])
        if ((s & good) == s) {
          note(r, "transitivity: " + describe(space, {e, rs}) + " is locally covering over " +
                      describe(space, {e, s}) + " but does not cover");
          break;
        }
    }
  }
  return r;
}

bool check_inclusion(const Site& a, const Site& b) {
  if (a.space != b.space) throw TypingError("topologies are on different categories");
  for (std::size_t e = 0; e < a.topology.covering.size(); ++e)
    for (auto s : a.topology.covering[e])
      if (!b.topology.covers(e, s)) return false;
  return true;
}

AxiomReport check_site_morphism(const Functor& F, const Site& source, const Site& target) {
  AxiomReport r;
  const auto& sc = source.category();
  if (F.object_map.size() != sc.object_count() || F.morphism_map.size() != sc.morphism_count())
    throw TypingError("functor does not match the source site's category");
  for (std::size_t e = 0; e < sc.object_count(); ++e)
    for (auto s : source.topology.covering[e]) {
      const auto fe = F.object_map[e];
      std::vector<std::size_t> image;
      for (auto f : source.space->members(e, s)) image.push_back(F.morphism_map[f]);
      const auto generated = target.space->generated(fe, image);
      if (!target.topology.covers(fe, generated))
        note(r, "covering sieve " + describe(*source.space, {e, s}) + " maps to " +
                    describe(*target.space, {fe, generated}) + ", which does not cover");
    }
  return r;
}

nlohmann::json topology_to_json(const Site& site) {
  const auto& c = site.category();
  nlohmann::json objs = nlohmann::json::object();
  for (std::size_t e = 0; e < c.object_count(); ++e) {
    nlohmann::json sieves = nlohmann::json::array();
    for (auto s : site.topology.covering[e]) {
      nlohmann::json members = nlohmann::json::array();
      for (auto f : site.space->members(e, s)) members.push_back(c.describe(f));
      sieves.push_back(members);
    }
    objs[c.graph()->entities()[e]] = sieves;
  }
  return {{"topology", site.name}, {"objects", c.graph()->entities()}, {"covering_sieves", objs}};
}

}  // namespace kgtopos
