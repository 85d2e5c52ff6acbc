#include "kgtopos/free_category.hpp"

#include <algorithm>
#include <sstream>

#include "kgtopos/error.hpp"
#include "kgtopos/incidence.hpp"

namespace kgtopos {

Path identity_path(std::size_t object) { return Path{object, object, {}}; }

Path generator_path(const KnowledgeGraph& kg, std::size_t triple) {
  const auto& t = kg.triple(triple);
  return Path{t.head, t.tail, {triple}};
}

Path compose(const Path& first, const Path& second) {
  if (first.target != second.source)
    throw CompositionError("paths are not composable: target of the first is not the source of the second");
  Path p{first.source, second.target, first.arrows};
  p.arrows.insert(p.arrows.end(), second.arrows.begin(), second.arrows.end());
  return p;
}

std::string describe(const Path& p, const KnowledgeGraph& kg) {
  if (p.is_identity()) return "id:" + kg.entities().at(p.source);
  std::string s;
  for (std::size_t k = 0; k < p.arrows.size(); ++k) {
    if (k) s += '.';
    s += 't' + std::to_string(p.arrows[k] + 1);
  }
  return s;
}

Path parse_path(const std::string& descriptor, const KnowledgeGraph& kg) {
  if (descriptor.rfind("id:", 0) == 0) {
    auto e = kg.entity_index(descriptor.substr(3));
    if (!e) throw SchemaError("unknown entity in path '" + descriptor + "'");
    return identity_path(*e);
  }
  std::vector<std::size_t> arrows;
  std::stringstream ss(descriptor);
  std::string part;
  while (std::getline(ss, part, '.')) {
    std::size_t idx = 0;
    bool ok = part.size() > 1 && part[0] == 't';
    for (std::size_t k = 1; ok && k < part.size(); ++k) {
      ok = part[k] >= '0' && part[k] <= '9';
      idx = idx * 10 + static_cast<std::size_t>(part[k] - '0');
    }
    if (!ok || idx == 0 || idx > kg.triple_count())
      throw SchemaError("bad path descriptor '" + descriptor + "'");
    arrows.push_back(idx - 1);
  }
  if (arrows.empty()) throw SchemaError("empty path descriptor");
  Path p = generator_path(kg, arrows[0]);
  for (std::size_t k = 1; k < arrows.size(); ++k) p = compose(p, generator_path(kg, arrows[k]));
  return p;
}

namespace {

// Returns a cycle as a triple sequence, or empty if the entity digraph is acyclic.
std::vector<std::size_t> find_cycle(const KnowledgeGraph& kg) {
  const std::size_t n = kg.entity_count();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t j = 0; j < kg.triple_count(); ++j) out[kg.triple(j).head].push_back(j);
  std::vector<int> colour(n, 0);
  std::vector<std::size_t> via(n, kNoMorphism);
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      if (k == out[v].size()) {
        colour[v] = 2;
        stack.pop_back();
        continue;
      }
      const std::size_t j = out[v][k++];
      const std::size_t w = kg.triple(j).tail;
      if (colour[w] == 1) {
        std::vector<std::size_t> cycle{j};
        for (std::size_t x = v; x != w; x = kg.triple(via[x]).head) cycle.push_back(via[x]);
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (colour[w] == 0) {
        colour[w] = 1;
        via[w] = j;
        stack.push_back({w, 0});
      }
    }
  }
  return {};
}

std::size_t longest_path(const KnowledgeGraph& kg) {
  // Acyclic: relax edges n times.
  std::vector<std::size_t> best(kg.entity_count(), 0);
  std::size_t longest = 0;
  for (std::size_t round = 0; round < kg.entity_count(); ++round) {
    bool changed = false;
    for (const auto& t : kg.triples())
      if (best[t.tail] < best[t.head] + 1) {
        best[t.tail] = best[t.head] + 1;
        longest = std::max(longest, best[t.tail]);
        changed = true;
      }
    if (!changed) break;
  }
  return longest;
}

}  // namespace

FreeCategory build_free_category(KgPtr kg, std::optional<std::size_t> max_length, std::size_t path_cap) {
  if (!kg) throw DomainError("null knowledge graph");
  const auto cycle = find_cycle(*kg);
  if (!cycle.empty() && !max_length) {
    std::string w = kg->entities()[kg->triple(cycle.front()).head];
    for (auto j : cycle) w += " -" + kg->predicates()[kg->triple(j).predicate] + "-> " + kg->entities()[kg->triple(j).tail];
    throw InfinityError("graph has a cycle (" + w + "); supply a maximum path length");
  }

  FreeCategory c;
  c.kg_ = kg;
  c.max_length_ = max_length;
  c.closed_ = cycle.empty() && (!max_length || *max_length >= longest_path(*kg));

  const std::size_t n = kg->entity_count();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t j = 0; j < kg->triple_count(); ++j) out[kg->triple(j).head].push_back(j);

  std::vector<Path> nonidentity;
  std::vector<Path> stack;
  for (std::size_t j = 0; j < kg->triple_count(); ++j) stack.push_back(generator_path(*kg, j));
  while (!stack.empty()) {
    Path p = std::move(stack.back());
    stack.pop_back();
    if (!max_length || p.length() < *max_length)
      for (auto j : out[p.target]) {
        Path q = p;
        q.arrows.push_back(j);
        q.target = kg->triple(j).tail;
        stack.push_back(std::move(q));
      }
    if (max_length && p.length() > *max_length) continue;
    nonidentity.push_back(std::move(p));
    if (nonidentity.size() + n > path_cap)
      throw SizeError("free category exceeds " + std::to_string(path_cap) + " morphisms");
  }
  std::sort(nonidentity.begin(), nonidentity.end(),
            [](const Path& a, const Path& b) { return a.arrows < b.arrows; });

  for (std::size_t e = 0; e < n; ++e) c.paths_.push_back(identity_path(e));
  for (auto& p : nonidentity) c.paths_.push_back(std::move(p));

  c.into_.assign(n, {});
  c.out_of_.assign(n, {});
  c.generators_.assign(kg->triple_count(), kNoMorphism);
  for (std::size_t id = 0; id < c.paths_.size(); ++id) {
    const Path& p = c.paths_[id];
    c.lookup_.emplace(p, id);
    c.hom_[{p.source, p.target}].push_back(id);
    c.into_[p.target].push_back(id);
    c.out_of_[p.source].push_back(id);
    if (p.length() == 1) c.generators_[p.arrows[0]] = id;
  }
  // Identity ids precede all others, so each hom list is already identity-first
  // and lexicographic.
  return c;
}

const std::vector<std::size_t>& FreeCategory::hom(std::size_t a, std::size_t b) const {
  static const std::vector<std::size_t> empty;
  auto it = hom_.find({a, b});
  return it == hom_.end() ? empty : it->second;
}

std::optional<std::size_t> FreeCategory::find(const Path& p) const {
  auto it = lookup_.find(p);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t FreeCategory::then(std::size_t first, std::size_t second) const {
  const Path& a = paths_.at(first);
  const Path& b = paths_.at(second);
  if (a.target != b.source) return kNoMorphism;
  if (a.is_identity()) return second;
  if (b.is_identity()) return first;
  auto id = find(compose(a, b));
  return id ? *id : kNoMorphism;
}

nlohmann::json free_category_to_json(const FreeCategory& c) {
  const auto& kg = *c.graph();
  nlohmann::json gens = nlohmann::json::array();
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    gens.push_back({{"id", "t" + std::to_string(j + 1)},
                    {"head", kg.entities()[t.head]},
                    {"predicate", kg.predicates()[t.predicate]},
                    {"tail", kg.entities()[t.tail]}});
  }
  nlohmann::json homs = nlohmann::json::array();
  for (std::size_t a = 0; a < c.object_count(); ++a)
    for (std::size_t b = 0; b < c.object_count(); ++b) {
      const auto& h = c.hom(a, b);
      if (h.empty()) continue;
      nlohmann::json paths = nlohmann::json::array();
      for (auto id : h) paths.push_back(c.describe(id));
      homs.push_back({{"source", kg.entities()[a]}, {"target", kg.entities()[b]}, {"paths", paths}});
    }
  nlohmann::json j{{"objects", kg.entities()},
                   {"generators", gens},
                   {"morphism_count", c.morphism_count()},
                   {"closed", c.closed()},
                   {"hom_sets", homs}};
  if (c.max_length()) j["max_length"] = *c.max_length();
  return j;
}

Fibres fibres(const KnowledgeGraph& kg) {
  Fibres f;
  f.by_head.assign(kg.entity_count(), {});
  f.by_tail.assign(kg.entity_count(), {});
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    f.by_head[kg.triple(j).head].push_back(j);
    f.by_tail[kg.triple(j).tail].push_back(j);
  }
  return f;
}

std::size_t walk_count(const KnowledgeGraph& kg) {
  const auto n = static_cast<Eigen::Index>(kg.entity_count());
  const IntMatrix a = head_incidence(kg) * tail_incidence(kg).transpose();
  IntMatrix power = IntMatrix::Identity(n, n);
  std::int64_t total = n;
  for (Eigen::Index k = 1; k <= n; ++k) {
    power = power * a;
    total += power.sum();
  }
  return static_cast<std::size_t>(total);
}

// ---------------------------------------------------------------------------
// FiniteCategory

void FiniteCategory::index() {
  out_of_.assign(objects_, {});
  position_in_out_.assign(arrows_.size(), 0);
  for (std::size_t f = 0; f < arrows_.size(); ++f) {
    if (arrows_[f].dom >= objects_ || arrows_[f].cod >= objects_)
      throw TypingError("arrow " + std::to_string(f) + " has an out-of-range endpoint");
    position_in_out_[f] = out_of_[arrows_[f].dom].size();
    out_of_[arrows_[f].dom].push_back(f);
    hom_[{arrows_[f].dom, arrows_[f].cod}].push_back(f);
  }
  if (identities_.size() != objects_) throw TypingError("one identity per object required");
  table_.assign(arrows_.size(), {});
}

void FiniteCategory::validate() const {
  auto fail = [](const std::string& what) { throw TypingError("category law violated: " + what); };
  for (std::size_t x = 0; x < objects_; ++x) {
    const auto i = identities_[x];
    if (i >= arrows_.size() || arrows_[i].dom != x || arrows_[i].cod != x)
      fail("identity of object " + std::to_string(x) + " is not an endomorphism");
  }
  for (std::size_t f = 0; f < arrows_.size(); ++f) {
    if (then(identities_[arrows_[f].dom], f) != f || then(f, identities_[arrows_[f].cod]) != f)
      fail("identity law at arrow " + std::to_string(f));
    for (auto g : out_of_[arrows_[f].cod]) {
      const auto fg = then(f, g);
      if (fg >= arrows_.size() || arrows_[fg].dom != arrows_[f].dom || arrows_[fg].cod != arrows_[g].cod)
        fail("composite of " + std::to_string(f) + " and " + std::to_string(g) + " is ill-typed");
      for (auto h : out_of_[arrows_[g].cod])
        if (then(fg, h) != then(f, then(g, h)))
          fail("associativity at (" + std::to_string(f) + "," + std::to_string(g) + "," +
               std::to_string(h) + ")");
    }
  }
}

std::size_t FiniteCategory::then(std::size_t f, std::size_t g) const {
  if (arrows_.at(f).cod != arrows_.at(g).dom) return kNoMorphism;
  return table_[f][position_in_out_[g]];
}

const std::vector<std::size_t>& FiniteCategory::hom(std::size_t a, std::size_t b) const {
  static const std::vector<std::size_t> empty;
  auto it = hom_.find({a, b});
  return it == hom_.end() ? empty : it->second;
}

FiniteCategory FiniteCategory::from_free(const FreeCategory& c) {
  if (!c.closed())
    throw InfinityError("free category is not closed under composition (cyclic graph or bound too small)");
  std::vector<Arrow> arrows;
  for (const auto& p : c.morphisms()) arrows.push_back({p.source, p.target});
  std::vector<std::size_t> ids;
  for (std::size_t x = 0; x < c.object_count(); ++x) ids.push_back(c.identity(x));
  return FiniteCategory(c.object_count(), std::move(arrows), std::move(ids),
                        [&](std::size_t f, std::size_t g) { return c.then(f, g); });
}

FiniteCategory FiniteCategory::chain(std::size_t k) {
  // One arrow a -> b for each a <= b.
  std::vector<Arrow> arrows;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> id;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      id[{a, b}] = arrows.size();
      arrows.push_back({a, b});
    }
  std::vector<std::size_t> ids;
  for (std::size_t a = 0; a < k; ++a) ids.push_back(id[{a, a}]);
  const auto snapshot = arrows;
  return FiniteCategory(k, std::move(arrows), std::move(ids), [&](std::size_t f, std::size_t g) {
    return id.at({snapshot[f].dom, snapshot[g].cod});
  });
}

// ---------------------------------------------------------------------------
// Functors

std::vector<std::string> functor_violations(const Functor& F) {
  std::vector<std::string> v;
  const auto& s = *F.source;
  const auto& t = *F.target;
  if (F.object_map.size() != s.object_count() || F.morphism_map.size() != s.morphism_count()) {
    v.push_back("maps are not total on the source");
    return v;
  }
  for (auto x : F.object_map)
    if (x >= t.object_count()) v.push_back("object image out of range");
  for (auto f : F.morphism_map)
    if (f >= t.morphism_count()) v.push_back("morphism image out of range");
  if (!v.empty()) return v;
  for (std::size_t x = 0; x < s.object_count(); ++x)
    if (F.morphism_map[s.identity(x)] != t.identity(F.object_map[x]))
      v.push_back("identity of object " + std::to_string(x) + " not preserved");
  for (std::size_t f = 0; f < s.morphism_count(); ++f) {
    const auto& a = s.arrow(f);
    const auto& b = t.arrow(F.morphism_map[f]);
    if (b.dom != F.object_map[a.dom] || b.cod != F.object_map[a.cod])
      v.push_back("morphism " + std::to_string(f) + " maps with wrong domain or codomain");
  }
  if (!v.empty()) return v;
  for (std::size_t f = 0; f < s.morphism_count(); ++f)
    for (auto g : s.out_of(s.arrow(f).cod))
      if (F.morphism_map[s.then(f, g)] != t.then(F.morphism_map[f], F.morphism_map[g]))
        v.push_back("composite of " + std::to_string(f) + " and " + std::to_string(g) + " not preserved");
  return v;
}

Functor compose_functors(const Functor& g, const Functor& f) {
  if (f.target != g.source) throw CompositionError("functors are not composable");
  Functor h{f.source, g.target, {}, {}};
  for (auto x : f.object_map) h.object_map.push_back(g.object_map.at(x));
  for (auto m : f.morphism_map) h.morphism_map.push_back(g.morphism_map.at(m));
  return h;
}

Functor identity_functor(CategoryPtr c) {
  Functor f{c, c, {}, {}};
  for (std::size_t x = 0; x < c->object_count(); ++x) f.object_map.push_back(x);
  for (std::size_t m = 0; m < c->morphism_count(); ++m) f.morphism_map.push_back(m);
  return f;
}

Functor extend_functor(const FreeCategory& cat, const std::vector<std::size_t>& object_assignment,
                       const std::vector<std::size_t>& generator_assignment, CategoryPtr target) {
  const auto& kg = *cat.graph();
  if (!cat.closed()) throw InfinityError("cannot extend a functor from an unclosed free category");
  if (object_assignment.size() != kg.entity_count() || generator_assignment.size() != kg.triple_count())
    throw TypingError("assignments must cover every object and generator");
  for (auto x : object_assignment)
    if (x >= target->object_count()) throw TypingError("object assignment out of range");
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto g = generator_assignment[j];
    if (g >= target->morphism_count()) throw TypingError("generator assignment out of range");
    const auto& a = target->arrow(g);
    const auto& t = kg.triple(j);
    if (a.dom != object_assignment[t.head] || a.cod != object_assignment[t.tail])
      throw TypingError("generator t" + std::to_string(j + 1) + " is assigned an arrow with mismatched domain or codomain");
  }
  Functor F{std::make_shared<const FiniteCategory>(FiniteCategory::from_free(cat)), target,
            object_assignment, {}};
  for (const auto& p : cat.morphisms()) {
    std::size_t m = target->identity(object_assignment[p.source]);
    for (auto j : p.arrows) m = target->then(m, generator_assignment[j]);
    F.morphism_map.push_back(m);
  }
  return F;
}

bool agrees_with_extension(const Functor& candidate, const FreeCategory& cat) {
  std::vector<std::size_t> gens;
  for (std::size_t j = 0; j < cat.graph()->triple_count(); ++j)
    gens.push_back(candidate.morphism_map.at(cat.generator(j)));
  const auto ext = extend_functor(cat, candidate.object_map, gens, candidate.target);
  return ext.morphism_map == candidate.morphism_map;
}

Functor induced_functor(const KgHomomorphism& f, const FreeCategory& source, const FreeCategory& target,
                        CategoryPtr source_cat, CategoryPtr target_cat) {
  const auto hc = check_hom(f);
  if (!hc.ok) throw DomainError("not a homomorphism: triple t" + std::to_string(hc.violations.front() + 1) + " has no image");
  if (!(*source.graph() == *f.source) || !(*target.graph() == *f.target))
    throw TypingError("free categories do not match the homomorphism's graphs");
  if (!source.closed() || !target.closed())
    throw InfinityError("induced functor needs closed free categories");
  if (!source_cat) source_cat = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(source));
  if (!target_cat) target_cat = std::make_shared<const FiniteCategory>(FiniteCategory::from_free(target));

  std::vector<std::size_t> triple_map;
  for (const auto& t : f.source->triples()) triple_map.push_back(*f.target->triple_index(f.image(t)));

  Functor F{source_cat, target_cat, f.entity_map, {}};
  for (const auto& p : source.morphisms()) {
    Path q{f.entity_map[p.source], f.entity_map[p.target], {}};
    for (auto j : p.arrows) q.arrows.push_back(triple_map[j]);
    auto id = target.find(q);
    if (!id) throw InfinityError("image path " + describe(q, *f.target) + " is not enumerated in the target");
    F.morphism_map.push_back(*id);
  }
  return F;
}

}  // namespace kgtopos
