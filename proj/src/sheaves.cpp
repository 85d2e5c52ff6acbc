#include "kgtopos/sheaves.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <set>

#include "kgtopos/error.hpp"

namespace kgtopos {

// ---------------------------------------------------------------------------
// Presheaf

Presheaf::Presheaf(std::shared_ptr<const FreeCategory> category, std::vector<std::vector<std::string>> sections,
                   std::vector<std::vector<std::size_t>> generator_restrictions)
    : category_(std::move(category)),
      sections_(std::move(sections)),
      generators_(std::move(generator_restrictions)) {
  const auto& c = *category_;
  const auto& kg = *c.graph();
  if (!c.closed()) throw InfinityError("presheaves need a closed free category");
  if (sections_.size() != c.object_count()) throw PresheafError("one section set per object required");
  if (generators_.size() != kg.triple_count()) throw PresheafError("one restriction per generator required");
  for (std::size_t e = 0; e < sections_.size(); ++e) {
    std::set<std::string> seen(sections_[e].begin(), sections_[e].end());
    if (seen.size() != sections_[e].size())
      throw PresheafError("duplicate section label at " + kg.entities()[e]);
  }
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    const auto& t = kg.triple(j);
    if (generators_[j].size() != sections_[t.tail].size())
      throw PresheafError("restriction along t" + std::to_string(j + 1) + " is not total on F(" +
                          kg.entities()[t.tail] + ")");
    for (auto v : generators_[j])
      if (v >= sections_[t.head].size())
        throw PresheafError("restriction along t" + std::to_string(j + 1) + " leaves F(" + kg.entities()[t.head] + ")");
  }
  // Proper prefixes have smaller ids, so one pass in id order suffices.
  maps_.assign(c.morphism_count(), {});
  for (std::size_t id = 0; id < c.morphism_count(); ++id) {
    const Path& p = c.morphism(id);
    if (p.is_identity()) {
      maps_[id].resize(sections_[p.source].size());
      std::iota(maps_[id].begin(), maps_[id].end(), std::size_t{0});
      continue;
    }
    if (p.length() == 1) {
      maps_[id] = generators_[p.arrows[0]];
      continue;
    }
    Path prefix{p.source, kg.triple(p.arrows.back()).head,
                std::vector<std::size_t>(p.arrows.begin(), p.arrows.end() - 1)};
    const auto& pre = maps_.at(*c.find(prefix));
    const auto& last = generators_[p.arrows.back()];
    for (auto x : last) maps_[id].push_back(pre[x]);
  }
}

std::optional<std::size_t> Presheaf::find_label(std::size_t object, const std::string& label) const {
  const auto& s = sections_.at(object);
  auto it = std::find(s.begin(), s.end(), label);
  if (it == s.end()) return std::nullopt;
  return static_cast<std::size_t>(it - s.begin());
}

std::size_t Presheaf::max_section_count() const {
  std::size_t m = 0;
  for (const auto& s : sections_) m = std::max(m, s.size());
  return m;
}

Presheaf load_presheaf(std::shared_ptr<const FreeCategory> category, const nlohmann::json& data) {
  const auto& kg = *category->graph();
  try {
    const auto& secs = data.at("sections");
    if (!secs.is_object()) throw SchemaError("\"sections\" must be an object");
    for (auto it = secs.begin(); it != secs.end(); ++it)
      if (!kg.entity_index(it.key())) throw SchemaError("sections given for unknown object '" + it.key() + "'");
    std::vector<std::vector<std::string>> sections;
    for (const auto& e : kg.entities()) {
      if (!secs.contains(e)) throw SchemaError("no section set for object '" + e + "'");
      sections.push_back(secs.at(e).get<std::vector<std::string>>());
    }
    auto index_of = [&](std::size_t object, const std::string& label, const std::string& where) {
      const auto& s = sections[object];
      auto it = std::find(s.begin(), s.end(), label);
      if (it == s.end())
        throw SchemaError(where + ": '" + label + "' is not a section of " + kg.entities()[object]);
      return static_cast<std::size_t>(it - s.begin());
    };
    auto read_map = [&](const nlohmann::json& m, const Path& p, const std::string& key) {
      if (!m.is_object()) throw SchemaError("restriction '" + key + "' must be an object");
      std::vector<std::size_t> f(sections[p.target].size(), kNoMorphism);
      for (auto it = m.begin(); it != m.end(); ++it) {
        const auto from = index_of(p.target, it.key(), key);
        f[from] = index_of(p.source, it.value().get<std::string>(), key);
      }
      for (std::size_t x = 0; x < f.size(); ++x)
        if (f[x] == kNoMorphism)
          throw SchemaError("restriction '" + key + "' is undefined on '" + sections[p.target][x] + "'");
      return f;
    };

    const auto& rest = data.at("restrictions");
    if (!rest.is_object()) throw SchemaError("\"restrictions\" must be an object");
    std::vector<std::vector<std::size_t>> gens(kg.triple_count());
    std::vector<bool> given(kg.triple_count(), false);
    std::vector<std::pair<Path, std::vector<std::size_t>>> extra;
    for (auto it = rest.begin(); it != rest.end(); ++it) {
      const Path p = parse_path(it.key(), kg);
      auto f = read_map(it.value(), p, it.key());
      if (p.length() == 1) {
        gens[p.arrows[0]] = std::move(f);
        given[p.arrows[0]] = true;
      } else {
        extra.emplace_back(p, std::move(f));
      }
    }
    for (std::size_t j = 0; j < kg.triple_count(); ++j)
      if (!given[j]) throw SchemaError("no restriction for generator t" + std::to_string(j + 1));

    Presheaf F(category, std::move(sections), std::move(gens));
    for (const auto& [p, f] : extra) {
      auto id = category->find(p);
      if (!id) throw SchemaError("path " + describe(p, kg) + " is not a morphism of the category");
      if (F.restriction(*id) != f) {
        std::string w = describe(p, kg);
        for (std::size_t x = 0; x < f.size(); ++x)
          if (F.restrict(*id, x) != f[x]) {
            w += " on '" + F.label(p.target, x) + "': given '" + F.label(p.source, f[x]) +
                 "', composite of generators gives '" + F.label(p.source, F.restrict(*id, x)) + "'";
            break;
          }
        throw PresheafError("functoriality violated along " + w);
      }
    }
    return F;
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("presheaf JSON: ") + ex.what());
  }
}

nlohmann::json presheaf_to_json(const Presheaf& F) {
  const auto& kg = *F.category().graph();
  nlohmann::json secs = nlohmann::json::object();
  for (std::size_t e = 0; e < kg.entity_count(); ++e) secs[kg.entities()[e]] = F.sections(e);
  nlohmann::json rest = nlohmann::json::object();
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    nlohmann::json m = nlohmann::json::object();
    for (std::size_t x = 0; x < F.size(t.tail); ++x)
      m[F.label(t.tail, x)] = F.label(t.head, F.generator_restrictions()[j][x]);
    rest["t" + std::to_string(j + 1)] = m;
  }
  return {{"sections", secs}, {"restrictions", rest}};
}

Presheaf constant_presheaf(std::shared_ptr<const FreeCategory> category, std::vector<std::string> labels) {
  const auto n = category->object_count();
  const auto m = category->graph()->triple_count();
  std::vector<std::size_t> id(labels.size());
  std::iota(id.begin(), id.end(), std::size_t{0});
  return Presheaf(category, std::vector<std::vector<std::string>>(n, labels),
                  std::vector<std::vector<std::size_t>>(m, id));
}

Presheaf terminal_presheaf(std::shared_ptr<const FreeCategory> category) {
  return constant_presheaf(std::move(category), {"*"});
}

Presheaf product_presheaf(const Presheaf& F, const Presheaf& G) {
  const auto& c = F.category();
  const auto& kg = *c.graph();
  std::vector<std::vector<std::string>> secs(c.object_count());
  for (std::size_t e = 0; e < c.object_count(); ++e)
    for (std::size_t x = 0; x < F.size(e); ++x)
      for (std::size_t y = 0; y < G.size(e); ++y) secs[e].push_back("(" + F.label(e, x) + "," + G.label(e, y) + ")");
  std::vector<std::vector<std::size_t>> gens(kg.triple_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    const auto& fj = F.generator_restrictions()[j];
    const auto& gj = G.generator_restrictions()[j];
    for (std::size_t x = 0; x < F.size(t.tail); ++x)
      for (std::size_t y = 0; y < G.size(t.tail); ++y) gens[j].push_back(fj[x] * G.size(t.head) + gj[y]);
  }
  return Presheaf(F.category_ptr(), std::move(secs), std::move(gens));
}

// ---------------------------------------------------------------------------
// Matching families

namespace {

std::size_t position(SieveMask mask, std::size_t bit) {
  return static_cast<std::size_t>(std::popcount(mask & ((SieveMask{1} << bit) - 1)));
}

/// Members of a sieve, its basis, and how every member derives from a basis
/// element: member = basis ∘ h.
struct SieveStructure {
  std::vector<std::size_t> members;
  std::vector<std::size_t> basis;            // positions into members
  std::vector<std::size_t> basis_of;         // per member: position of its basis element
  std::vector<std::size_t> via;              // per member: h (morphism id)
};

SieveStructure analyse(const SieveSpace& space, const Sieve& s) {
  const auto& c = space.category();
  const auto& kg = *c.graph();
  SieveStructure st;
  st.members = space.members(s.object, s.members);
  st.basis_of.resize(st.members.size());
  st.via.resize(st.members.size());
  for (std::size_t i = 0; i < st.members.size(); ++i) {
    const Path& f = c.morphism(st.members[i]);
    const std::size_t k = f.length();
    // Shortest suffix of f (possibly the identity) lying in the sieve.
    for (std::size_t l = 0; l <= k; ++l) {
      std::size_t suffix;
      if (l == 0) {
        suffix = c.identity(s.object);
      } else {
        const std::size_t from = kg.triple(f.arrows[k - l]).head;
        suffix = *c.find(Path{from, f.target, std::vector<std::size_t>(f.arrows.end() - l, f.arrows.end())});
      }
      if (!(s.members >> space.bit(suffix) & 1)) continue;
      const std::size_t mid = c.morphism(suffix).source;
      const std::size_t h = *c.find(Path{f.source, mid, std::vector<std::size_t>(f.arrows.begin(), f.arrows.end() - l)});
      st.basis_of[i] = position(s.members, space.bit(suffix));
      st.via[i] = h;
      if (suffix == st.members[i]) st.basis.push_back(i);
      break;
    }
  }
  return st;
}

std::vector<std::size_t> derive_values(const Presheaf& F, const SieveStructure& st,
                                       const std::vector<std::size_t>& basis_values) {
  std::vector<std::size_t> v(st.members.size());
  std::vector<std::size_t> at(st.members.size(), kNoMorphism);
  for (std::size_t b = 0; b < st.basis.size(); ++b) at[st.basis[b]] = basis_values[b];
  for (std::size_t i = 0; i < st.members.size(); ++i) v[i] = F.restrict(st.via[i], at[st.basis_of[i]]);
  return v;
}

/// Visits every assignment of the basis, lexicographically.
template <typename Visit>
void for_each_basis_assignment(const Presheaf& F, const SieveSpace& space, const SieveStructure& st, Visit&& visit) {
  const auto& c = space.category();
  std::vector<std::size_t> sizes;
  for (auto b : st.basis) sizes.push_back(F.size(c.morphism(st.members[b]).source));
  for (auto n : sizes)
    if (n == 0) return;
  std::vector<std::size_t> cur(sizes.size(), 0);
  while (true) {
    if (!visit(cur)) return;
    std::size_t k = cur.size();
    while (k > 0) {
      --k;
      if (++cur[k] < sizes[k]) break;
      cur[k] = 0;
      if (k == 0) return;
    }
    if (cur.empty()) return;
  }
}

std::size_t family_count(const Presheaf& F, const SieveSpace& space, const SieveStructure& st) {
  const auto& c = space.category();
  std::size_t n = 1;
  for (auto b : st.basis) {
    const auto k = F.size(c.morphism(st.members[b]).source);
    if (k == 0) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / k) return std::numeric_limits<std::size_t>::max();
    n *= k;
  }
  return n;
}

}  // namespace

bool is_compatible(const Presheaf& F, const SieveSpace& space, const MatchingFamily& x) {
  const auto& c = space.category();
  const auto members = space.members(x.sieve.object, x.sieve.members);
  if (x.values.size() != members.size()) return false;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto f = members[i];
    const auto d = c.morphism(f).source;
    if (x.values[i] >= F.size(d)) return false;
    const auto& into = space.incoming(d);
    for (std::size_t k = 0; k < into.size(); ++k) {
      const auto fh = space.precompose(f, k);
      const auto pos = position(x.sieve.members, space.bit(fh));
      if (x.values[pos] != F.restrict(into[k], x.values[i])) return false;
    }
  }
  return true;
}

std::vector<MatchingFamily> matching_families(const Presheaf& F, const SieveSpace& space, const Sieve& s,
                                              std::size_t cap) {
  const auto st = analyse(space, s);
  if (family_count(F, space, st) > cap)
    throw SizeError("more than " + std::to_string(cap) + " matching families on " + describe(space, s));
  std::vector<MatchingFamily> out;
  for_each_basis_assignment(F, space, st, [&](const std::vector<std::size_t>& b) {
    out.push_back({s, derive_values(F, st, b)});
    return true;
  });
  return out;
}

MatchingFamily family_from_values(const Presheaf& F, const SieveSpace& space, const Sieve& s,
                                  const std::map<std::size_t, std::size_t>& values) {
  const auto st = analyse(space, s);
  std::vector<std::size_t> basis_values;
  for (auto b : st.basis) {
    auto it = values.find(st.members[b]);
    if (it == values.end())
      throw GluingError("no value given for " + space.category().describe(st.members[b]));
    basis_values.push_back(it->second);
  }
  for (std::size_t b = 0; b < st.basis.size(); ++b)
    if (basis_values[b] >= F.size(space.category().morphism(st.members[st.basis[b]]).source))
      throw GluingError("value out of range");
  MatchingFamily x{s, derive_values(F, st, basis_values)};
  for (const auto& [f, v] : values) {
    if (!(s.members >> space.bit(f) & 1) || space.category().morphism(f).target != s.object)
      throw GluingError(space.category().describe(f) + " is not a member of the sieve");
    if (x.values[position(s.members, space.bit(f))] != v)
      throw GluingError("given values are not compatible at " + space.category().describe(f));
  }
  return x;
}

MatchingFamily restrict_section(const Presheaf& F, const SieveSpace& space, const Sieve& s, std::size_t section) {
  MatchingFamily x{s, {}};
  for (auto f : space.members(s.object, s.members)) x.values.push_back(F.restrict(f, section));
  return x;
}

// ---------------------------------------------------------------------------
// Sheaf condition

SheafCheck is_sheaf(const Presheaf& F, const Site& site) {
  const auto& space = *site.space;
  const auto& kg = *space.category().graph();
  SheafCheck r;
  for (std::size_t e = 0; e < space.object_count(); ++e)
    for (auto mask : site.topology.covering[e]) {
      const Sieve s{e, mask};
      const auto st = analyse(space, s);
      // Amalgamation map F(e) → Match(S) must be a bijection.
      std::map<std::vector<std::size_t>, std::size_t> hit;
      for (std::size_t x = 0; x < F.size(e); ++x) {
        auto fam = restrict_section(F, space, s, x).values;
        auto [it, fresh] = hit.emplace(std::move(fam), x);
        if (!fresh) {
          r.is_sheaf = false;
          r.sieve = s;
          r.family = MatchingFamily{s, it->first};
          r.amalgamations = 2;
          r.message = "sections '" + F.label(e, it->second) + "' and '" + F.label(e, x) + "' of " +
                      kg.entities()[e] + " restrict to the same family on " + describe(space, s);
          return r;
        }
      }
      if (hit.size() == family_count(F, space, st)) continue;
      for_each_basis_assignment(F, space, st, [&](const std::vector<std::size_t>& b) {
        auto v = derive_values(F, st, b);
        if (hit.contains(v)) return true;
        r.is_sheaf = false;
        r.sieve = s;
        r.family = MatchingFamily{s, std::move(v)};
        r.amalgamations = 0;
        r.message = "a matching family on " + describe(space, s) + " has no amalgamation";
        return false;
      });
      if (!r.is_sheaf) return r;
    }
  return r;
}

std::size_t glue(const Presheaf& F, const Site& site, const MatchingFamily& family) {
  const auto& space = *site.space;
  const auto e = family.sieve.object;
  if (!site.topology.covers(e, family.sieve.members))
    throw GluingError(describe(space, family.sieve) + " is not a covering sieve");
  if (!is_compatible(F, space, family)) throw GluingError("family is not compatible");
  std::vector<std::size_t> found;
  for (std::size_t x = 0; x < F.size(e); ++x)
    if (restrict_section(F, space, family.sieve, x).values == family.values) found.push_back(x);
  if (found.empty()) throw GluingError("no amalgamation exists: the presheaf is not a sheaf");
  if (found.size() > 1)
    throw UniquenessError(std::to_string(found.size()) + " amalgamations exist: the presheaf is not a sheaf");
  return found.front();
}

std::vector<std::vector<std::size_t>> global_sections(const Presheaf& F, std::size_t cap) {
  const auto& c = F.category();
  const auto& kg = *c.graph();
  const std::size_t n = c.object_count();
  // Constraints attached to the later of the two objects a generator joins.
  std::vector<std::vector<std::size_t>> checks(n);
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    checks[std::max(t.head, t.tail)].push_back(j);
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(n, 0);
  auto consistent = [&](std::size_t e) {
    for (auto j : checks[e]) {
      const auto& t = kg.triple(j);
      if (F.generator_restrictions()[j][cur[t.tail]] != cur[t.head]) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t e) -> void {
    if (e == n) {
      if (out.size() >= cap) throw SizeError("more than " + std::to_string(cap) + " global sections");
      out.push_back(cur);
      return;
    }
    for (std::size_t x = 0; x < F.size(e); ++x) {
      cur[e] = x;
      if (consistent(e)) self(self, e + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Natural transformations

bool is_natural(const NatTransformation& a, const Presheaf& F, const Presheaf& G) {
  const auto& kg = *F.category().graph();
  if (a.components.size() != F.category().object_count()) return false;
  for (std::size_t e = 0; e < a.components.size(); ++e) {
    if (a.components[e].size() != F.size(e)) return false;
    for (auto v : a.components[e])
      if (v >= G.size(e)) return false;
  }
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    for (std::size_t x = 0; x < F.size(t.tail); ++x)
      if (G.generator_restrictions()[j][a.components[t.tail][x]] !=
          a.components[t.head][F.generator_restrictions()[j][x]])
        return false;
  }
  return true;
}

NatTransformation identity_nat(const Presheaf& F) {
  NatTransformation a;
  for (std::size_t e = 0; e < F.category().object_count(); ++e) {
    a.components.emplace_back(F.size(e));
    std::iota(a.components.back().begin(), a.components.back().end(), std::size_t{0});
  }
  return a;
}

NatTransformation compose_nat(const NatTransformation& b, const NatTransformation& a) {
  NatTransformation out;
  for (std::size_t e = 0; e < a.components.size(); ++e) {
    out.components.emplace_back();
    for (auto v : a.components[e]) out.components.back().push_back(b.components.at(e).at(v));
  }
  return out;
}

std::vector<NatTransformation> enumerate_nat_transformations(const Presheaf& F, const Presheaf& G,
                                                             std::size_t section_cap, std::size_t result_cap) {
  const auto& kg = *F.category().graph();
  const std::size_t n = F.category().object_count();
  if (section_cap)
    for (std::size_t e = 0; e < n; ++e)
      if (F.size(e) > section_cap || G.size(e) > section_cap)
        throw SizeError("section set at '" + kg.entities()[e] + "' exceeds the section cap " +
                        std::to_string(section_cap));

  // One variable per (object, section of F); a naturality constraint for each
  // generator j: h → t and x ∈ F(t) ties (t, x) to (h, F(j)(x)).
  std::vector<std::pair<std::size_t, std::size_t>> vars;
  std::vector<std::vector<std::size_t>> var_id(n);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t x = 0; x < F.size(e); ++x) {
      var_id[e].push_back(vars.size());
      vars.push_back({e, x});
    }
  struct Constraint {
    std::size_t generator, tail_var, head_var;
  };
  std::vector<std::vector<Constraint>> at(vars.size());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    for (std::size_t x = 0; x < F.size(t.tail); ++x) {
      Constraint c{j, var_id[t.tail][x], var_id[t.head][F.generator_restrictions()[j][x]]};
      at[std::max(c.tail_var, c.head_var)].push_back(c);
    }
  }
  std::vector<std::size_t> value(vars.size(), 0);
  std::vector<NatTransformation> out;
  auto rec = [&](auto&& self, std::size_t v) -> void {
    if (v == vars.size()) {
      if (out.size() >= result_cap)
        throw SizeError("more than " + std::to_string(result_cap) + " natural transformations");
      NatTransformation a;
      a.components.resize(n);
      for (std::size_t e = 0; e < n; ++e)
        for (auto id : var_id[e]) a.components[e].push_back(value[id]);
      out.push_back(std::move(a));
      return;
    }
    const auto e = vars[v].first;
    for (std::size_t y = 0; y < G.size(e); ++y) {
      value[v] = y;
      bool ok = true;
      for (const auto& c : at[v])
        if (G.generator_restrictions()[c.generator][value[c.tail_var]] != value[c.head_var]) {
          ok = false;
          break;
        }
      if (ok) self(self, v + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Plus construction

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<std::size_t> restrict_values(const SieveSpace& space, std::size_t object, SieveMask from, SieveMask to,
                                         const std::vector<std::size_t>& values) {
  std::vector<std::size_t> out;
  const auto& in = space.incoming(object);
  for (std::size_t k = 0; k < in.size(); ++k)
    if (to >> k & 1) out.push_back(values[position(from, k)]);
  return out;
}

/// Pullback of a family on S along g: values on g*S.
std::vector<std::size_t> pull_values(const SieveSpace& space, SieveMask s, std::size_t g,
                                     const std::vector<std::size_t>& values, SieveMask pulled) {
  std::vector<std::size_t> out;
  const auto d = space.category().morphism(g).source;
  for (std::size_t k = 0; k < space.incoming(d).size(); ++k)
    if (pulled >> k & 1) out.push_back(values[position(s, space.bit(space.precompose(g, k)))]);
  return out;
}

std::string family_label(const Presheaf& F, const SieveSpace& space, std::size_t object, SieveMask s,
                         const std::vector<std::size_t>& values) {
  const auto st = analyse(space, Sieve{object, s});
  std::string out = "<";
  for (std::size_t b = 0; b < st.basis.size(); ++b) {
    const auto f = st.members[st.basis[b]];
    if (b) out += ',';
    out += space.category().describe(f) + "=" + F.label(space.category().morphism(f).source, values[st.basis[b]]);
  }
  return out + ">";
}

}  // namespace

PlusStage plus_construction(const Presheaf& F, const Site& site, std::size_t cap) {
  const auto& space = *site.space;
  const auto& c = space.category();
  const auto& kg = *c.graph();
  const std::size_t n = c.object_count();
  PlusStage st;
  st.class_of.resize(n);
  st.representative.resize(n);
  st.unit.components.resize(n);
  std::vector<std::vector<std::string>> labels(n);

  for (std::size_t e = 0; e < n; ++e) {
    // Maximal sieve first so that classes hit by the unit come first.
    std::vector<SieveMask> covers{space.maximal(e)};
    for (auto s : site.topology.covering[e])
      if (s != space.maximal(e)) covers.push_back(s);

    std::vector<PlusStage::Entry> entries;
    std::vector<std::size_t> sieve_of;  // index into covers
    for (std::size_t i = 0; i < covers.size(); ++i) {
      for (auto& x : matching_families(F, space, Sieve{e, covers[i]}, cap)) {
        entries.push_back({covers[i], std::move(x.values)});
        sieve_of.push_back(i);
        if (entries.size() > cap) throw SizeError("plus construction exceeds " + std::to_string(cap) + " families");
      }
    }
    UnionFind uf(entries.size());
    // x ~ y iff they agree on some covering T below both; group by T.
    for (auto t : covers) {
      std::map<std::vector<std::size_t>, std::size_t> first;
      for (std::size_t k = 0; k < entries.size(); ++k) {
        if ((entries[k].sieve & t) != t) continue;
        auto key = restrict_values(space, e, entries[k].sieve, t, entries[k].values);
        auto [it, fresh] = first.emplace(std::move(key), k);
        if (!fresh) uf.unite(it->second, k);
      }
    }
    std::map<std::size_t, std::size_t> class_id;  // root -> class
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto root = uf.find(k);
      auto [it, fresh] = class_id.emplace(root, st.representative[e].size());
      if (fresh) {
        st.representative[e].push_back(entries[root]);
        labels[e].push_back("");
      }
      st.class_of[e].emplace(entries[k], it->second);
    }
    // Unit: s ↦ class of its restriction to the maximal sieve.
    for (std::size_t x = 0; x < F.size(e); ++x) {
      auto fam = restrict_section(F, space, Sieve{e, space.maximal(e)}, x).values;
      const auto cls = st.class_of[e].at({space.maximal(e), std::move(fam)});
      st.unit.components[e].push_back(cls);
      if (labels[e][cls].empty()) labels[e][cls] = F.label(e, x);
    }
    for (std::size_t cls = 0; cls < labels[e].size(); ++cls)
      if (labels[e][cls].empty()) {
        const auto& rep = st.representative[e][cls];
        labels[e][cls] = family_label(F, space, e, rep.sieve, rep.values);
      }
    // Labels from families cannot collide with each other, but could with an
    // original label; disambiguate deterministically.
    std::set<std::string> used;
    for (auto& l : labels[e])
      while (!used.insert(l).second) l += "'";
  }

  std::vector<std::vector<std::size_t>> gens(kg.triple_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto g = c.generator(j);
    const auto& t = kg.triple(j);
    for (const auto& rep : st.representative[t.tail]) {
      const auto pulled = space.pullback(rep.sieve, g);
      auto v = pull_values(space, rep.sieve, g, rep.values, pulled);
      gens[j].push_back(st.class_of[t.head].at({pulled, std::move(v)}));
    }
  }
  st.result = Presheaf(F.category_ptr(), std::move(labels), std::move(gens));
  return st;
}

Sheafification sheafify(const Presheaf& F, const Site& site, std::size_t cap) {
  Sheafification a;
  a.first = plus_construction(F, site, cap);
  a.second = plus_construction(a.first.result, site, cap);
  a.unit = compose_nat(a.second.unit, a.first.unit);
  return a;
}

namespace {

NatTransformation plus_map(const NatTransformation& alpha, const PlusStage& src, const PlusStage& dst,
                           const SieveSpace& space) {
  NatTransformation out;
  out.components.resize(space.object_count());
  for (std::size_t e = 0; e < space.object_count(); ++e) {
    const auto members = space.incoming(e);
    for (const auto& rep : src.representative[e]) {
      std::vector<std::size_t> v;
      std::size_t i = 0;
      for (std::size_t k = 0; k < members.size(); ++k)
        if (rep.sieve >> k & 1) {
          const auto d = space.category().morphism(members[k]).source;
          v.push_back(alpha.components[d][rep.values[i++]]);
        }
      out.components[e].push_back(dst.class_of[e].at({rep.sieve, std::move(v)}));
    }
  }
  return out;
}

}  // namespace

NatTransformation sheafify_map(const NatTransformation& alpha, const Sheafification& aF, const Sheafification& aG,
                               const Site& site) {
  const auto once = plus_map(alpha, aF.first, aG.first, *site.space);
  return plus_map(once, aF.second, aG.second, *site.space);
}

Presheaf direct_image(const Presheaf& F) { return F; }

Presheaf inverse_image(const Presheaf& F, const Site& path_site) { return sheafify(F, path_site).sheaf(); }

ProductCheck check_preserves_products(const Presheaf& F, const Presheaf& G, const Site& site) {
  ProductCheck r;
  const auto P = product_presheaf(F, G);
  NatTransformation p1, p2;
  for (std::size_t e = 0; e < F.category().object_count(); ++e) {
    p1.components.emplace_back();
    p2.components.emplace_back();
    for (std::size_t x = 0; x < F.size(e); ++x)
      for (std::size_t y = 0; y < G.size(e); ++y) {
        p1.components.back().push_back(x);
        p2.components.back().push_back(y);
      }
  }
  const auto aP = sheafify(P, site), aF = sheafify(F, site), aG = sheafify(G, site);
  const auto q1 = sheafify_map(p1, aP, aF, site);
  const auto q2 = sheafify_map(p2, aP, aG, site);
  const auto& kg = *F.category().graph();
  for (std::size_t e = 0; e < kg.entity_count(); ++e) {
    const auto want = aF.sheaf().size(e) * aG.sheaf().size(e);
    std::set<std::pair<std::size_t, std::size_t>> image;
    for (std::size_t z = 0; z < aP.sheaf().size(e); ++z) image.insert({q1.components[e][z], q2.components[e][z]});
    if (aP.sheaf().size(e) != want || image.size() != want) {
      r.ok = false;
      r.message = "at " + kg.entities()[e] + ": |a(FxG)| = " + std::to_string(aP.sheaf().size(e)) +
                  ", |aF x aG| = " + std::to_string(want) + ", distinct images " + std::to_string(image.size());
      return r;
    }
  }
  return r;
}

AdjunctionReport check_adjunction(const Presheaf& F, const Presheaf& G, const Site& path_site,
                                  std::size_t section_cap) {
  AdjunctionReport r;
  const auto& kg = *F.category().graph();
  for (std::size_t e = 0; e < kg.entity_count(); ++e)
    if (F.size(e) > section_cap || G.size(e) > section_cap)
      throw SizeError("section set at '" + kg.entities()[e] + "' exceeds the section cap " + std::to_string(section_cap));
  if (!is_sheaf(G, path_site).is_sheaf) {
    r.ok = false;
    r.message = "G is not a sheaf on the path site";
    return r;
  }
  const auto a = sheafify(F, path_site);
  const auto left = enumerate_nat_transformations(a.sheaf(), G, 0);
  const auto right = enumerate_nat_transformations(F, direct_image(G), 0);
  r.left_count = left.size();
  r.right_count = right.size();
  std::set<std::vector<std::vector<std::size_t>>> right_set;
  for (const auto& t : right) right_set.insert(t.components);
  std::set<std::vector<std::vector<std::size_t>>> images;
  bool lands = true;
  for (const auto& phi : left) {
    auto psi = compose_nat(phi, a.unit);
    if (!right_set.contains(psi.components)) lands = false;
    images.insert(std::move(psi.components));
  }
  r.bijection = lands && images.size() == left.size() && images.size() == right.size();
  r.ok = r.bijection && r.left_count == r.right_count;
  if (!r.ok)
    r.message = "Hom(g*F, G) has " + std::to_string(r.left_count) + " elements, Hom(F, g_*G) has " +
                std::to_string(r.right_count) + (r.bijection ? "" : "; unit precomposition is not a bijection");
  return r;
}

// ---------------------------------------------------------------------------
// Subobject classifier

bool is_closed_sieve(const Site& site, const Sieve& s) {
  const auto& space = *site.space;
  const auto& in = space.incoming(s.object);
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (s.members >> k & 1) continue;
    const auto d = space.category().morphism(in[k]).source;
    if (site.topology.covers(d, space.pullback(s.members, in[k]))) return false;
  }
  return true;
}

Presheaf omega(const Site& site) {
  const auto& space = *site.space;
  const auto& c = space.category();
  const auto& kg = *c.graph();
  const std::size_t n = c.object_count();
  std::vector<std::vector<SieveMask>> closed(n);
  std::vector<std::vector<std::string>> labels(n);
  for (std::size_t e = 0; e < n; ++e)
    for (auto m : space.sieves(e))
      if (is_closed_sieve(site, {e, m})) {
        closed[e].push_back(m);
        std::string l = "{";
        bool first = true;
        for (auto f : space.members(e, m)) {
          if (!first) l += ',';
          l += c.describe(f);
          first = false;
        }
        labels[e].push_back(l + "}");
      }
  std::vector<std::vector<std::size_t>> gens(kg.triple_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    for (auto m : closed[t.tail]) {
      const auto pb = space.pullback(m, c.generator(j));
      auto it = std::find(closed[t.head].begin(), closed[t.head].end(), pb);
      if (it == closed[t.head].end()) throw PresheafError("pullback of a closed sieve is not closed");
      gens[j].push_back(static_cast<std::size_t>(it - closed[t.head].begin()));
    }
  }
  return Presheaf(space.category_ptr(), std::move(labels), std::move(gens));
}

std::size_t count_subsheaves(const Presheaf& F, const Site& site, std::size_t cap) {
  const auto& c = F.category();
  const auto& kg = *c.graph();
  const std::size_t n = c.object_count();
  std::size_t total_bits = 0;
  for (std::size_t e = 0; e < n; ++e) total_bits += F.size(e);
  if (total_bits >= 63 || (std::size_t{1} << total_bits) > cap)
    throw SizeError("too many section subsets to enumerate subsheaves");

  std::vector<std::size_t> offset(n, 0);
  for (std::size_t e = 1; e < n; ++e) offset[e] = offset[e - 1] + F.size(e - 1);
  std::size_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total_bits); ++mask) {
    auto in = [&](std::size_t e, std::size_t x) { return (mask >> (offset[e] + x)) & 1; };
    bool closed_under_restriction = true;
    for (std::size_t j = 0; j < kg.triple_count() && closed_under_restriction; ++j) {
      const auto& t = kg.triple(j);
      for (std::size_t x = 0; x < F.size(t.tail); ++x)
        if (in(t.tail, x) && !in(t.head, F.generator_restrictions()[j][x])) {
          closed_under_restriction = false;
          break;
        }
    }
    if (!closed_under_restriction) continue;
    std::vector<std::vector<std::string>> secs(n);
    std::vector<std::vector<std::size_t>> idx(n);
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t x = 0; x < F.size(e); ++x)
        if (in(e, x)) {
          idx[e].push_back(x);
          secs[e].push_back(F.label(e, x));
        }
    std::vector<std::vector<std::size_t>> gens(kg.triple_count());
    for (std::size_t j = 0; j < kg.triple_count(); ++j) {
      const auto& t = kg.triple(j);
      for (auto x : idx[t.tail]) {
        const auto y = F.generator_restrictions()[j][x];
        gens[j].push_back(static_cast<std::size_t>(std::find(idx[t.head].begin(), idx[t.head].end(), y) -
                                                   idx[t.head].begin()));
      }
    }
    if (is_sheaf(Presheaf(F.category_ptr(), std::move(secs), std::move(gens)), site).is_sheaf) ++count;
  }
  return count;
}

nlohmann::json family_to_json(const MatchingFamily& x, const Presheaf& F, const SieveSpace& space) {
  nlohmann::json j = nlohmann::json::object();
  const auto members = space.members(x.sieve.object, x.sieve.members);
  for (std::size_t i = 0; i < members.size(); ++i)
    j[space.category().describe(members[i])] = F.label(space.category().morphism(members[i]).source, x.values[i]);
  return j;
}

nlohmann::json sheaf_check_to_json(const SheafCheck& r, const Presheaf& F, const Site& site) {
  nlohmann::json j{{"is_sheaf", r.is_sheaf}, {"topology", site.name}};
  if (!r.is_sheaf) {
    nlohmann::json w{{"sieve", describe(*site.space, *r.sieve)}, {"amalgamations", r.amalgamations},
                     {"message", r.message}};
    if (r.family) w["family"] = family_to_json(*r.family, F, *site.space);
    j["counterexample"] = w;
  }
  return j;
}

}  // namespace kgtopos
