#include "kgtopos/kg.hpp"

#include <algorithm>
#include <sstream>

#include "kgtopos/error.hpp"

namespace kgtopos {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct OrderedNames {
  std::vector<std::string> names;
  std::map<std::string, std::size_t, std::less<>> index;

  std::size_t intern(std::string_view s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    names.emplace_back(s);
    index.emplace(std::string(s), names.size() - 1);
    return names.size() - 1;
  }
};

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<EntityId> entities,
                               std::vector<PredicateId> predicates,
                               std::vector<Triple> triples)
    : entities_(std::move(entities)),
      predicates_(std::move(predicates)),
      triples_(std::move(triples)) {
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (entities_[i].empty()) throw DomainError("empty entity name");
    if (!entity_lookup_.emplace(entities_[i], i).second)
      throw DomainError("duplicate entity '" + entities_[i] + "'");
  }
  for (std::size_t i = 0; i < predicates_.size(); ++i) {
    if (predicates_[i].empty()) throw DomainError("empty predicate name");
    if (!predicate_lookup_.emplace(predicates_[i], i).second)
      throw DomainError("duplicate predicate '" + predicates_[i] + "'");
  }
  for (std::size_t j = 0; j < triples_.size(); ++j) {
    const Triple& t = triples_[j];
    if (t.head >= entities_.size() || t.tail >= entities_.size() ||
        t.predicate >= predicates_.size())
      throw DomainError("triple " + std::to_string(j + 1) + " references an unknown entity or predicate");
    if (!triple_lookup_.emplace(t, j).second)
      throw DuplicateError(j + 1, "duplicate triple " + triple_label(j));
  }
}

std::optional<std::size_t> KnowledgeGraph::entity_index(std::string_view name) const {
  auto it = entity_lookup_.find(name);
  if (it == entity_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> KnowledgeGraph::predicate_index(std::string_view name) const {
  auto it = predicate_lookup_.find(name);
  if (it == predicate_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> KnowledgeGraph::triple_index(const Triple& t) const {
  auto it = triple_lookup_.find(t);
  if (it == triple_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string KnowledgeGraph::triple_label(std::size_t j) const {
  const Triple& t = triples_.at(j);
  return entities_[t.head] + " --" + predicates_[t.predicate] + "--> " + entities_[t.tail];
}

KnowledgeGraph parse_kg(std::string_view text) {
  OrderedNames entities, predicates;
  std::vector<Triple> triples;
  std::map<Triple, std::size_t> seen;  // triple -> line number

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (fields.front() == "@entities" || fields.front() == "@predicates") {
      if (!triples.empty())
        throw ParseError(line_no, "directive " + std::string(fields.front()) + " after the first triple");
      auto& names = fields.front() == "@entities" ? entities : predicates;
      for (std::size_t k = 1; k < fields.size(); ++k) {
        if (names.index.contains(fields[k]))
          throw DuplicateError(line_no, "duplicate declaration of '" + std::string(fields[k]) + "'");
        names.intern(fields[k]);
      }
    } else if (fields.front().front() == '@') {
      throw ParseError(line_no, "unknown directive " + std::string(fields.front()));
    } else {
      if (fields.size() != 3)
        throw ParseError(line_no, "expected 3 fields (head predicate tail), found " +
                                      std::to_string(fields.size()));
      Triple t;
      t.head = entities.intern(fields[0]);
      t.predicate = predicates.intern(fields[1]);
      t.tail = entities.intern(fields[2]);
      auto [it, inserted] = seen.emplace(t, line_no);
      if (!inserted)
        throw DuplicateError(line_no, "duplicate triple (first seen on line " +
                                          std::to_string(it->second) + ")");
      triples.push_back(t);
    }
    if (end == text.size()) break;
  }
  return KnowledgeGraph(std::move(entities.names), std::move(predicates.names), std::move(triples));
}

std::string serialize_kg(const KnowledgeGraph& g) {
  // Directives are needed only when first-appearance order would differ.
  OrderedNames ents, preds;
  for (const Triple& t : g.triples()) {
    ents.intern(g.entities()[t.head]);
    preds.intern(g.predicates()[t.predicate]);
    ents.intern(g.entities()[t.tail]);
  }
  std::ostringstream os;
  if (ents.names != g.entities()) {
    os << "@entities";
    for (const auto& e : g.entities()) os << ' ' << e;
    os << '\n';
  }
  if (preds.names != g.predicates()) {
    os << "@predicates";
    for (const auto& p : g.predicates()) os << ' ' << p;
    os << '\n';
  }
  for (const Triple& t : g.triples())
    os << g.entities()[t.head] << ' ' << g.predicates()[t.predicate] << ' ' << g.entities()[t.tail] << '\n';
  return os.str();
}

nlohmann::json kg_to_json(const KnowledgeGraph& g) {
  nlohmann::json triples = nlohmann::json::array();
  for (const Triple& t : g.triples())
    triples.push_back({g.entities()[t.head], g.predicates()[t.predicate], g.entities()[t.tail]});
  return {{"entities", g.entities()}, {"predicates", g.predicates()}, {"triples", triples}};
}

KnowledgeGraph kg_from_json(const nlohmann::json& j) {
  try {
    auto entities = j.at("entities").get<std::vector<std::string>>();
    auto predicates = j.at("predicates").get<std::vector<std::string>>();
    OrderedNames e, p;
    for (const auto& s : entities) e.intern(s);
    for (const auto& s : predicates) p.intern(s);
    std::vector<Triple> triples;
    for (const auto& row : j.at("triples")) {
      auto f = row.get<std::vector<std::string>>();
      if (f.size() != 3) throw SchemaError("triple entries must have 3 fields");
      auto h = e.index.find(f[0]), q = p.index.find(f[1]), t = e.index.find(f[2]);
      if (h == e.index.end() || q == p.index.end() || t == e.index.end())
        throw SchemaError("triple names an undeclared entity or predicate");
      triples.push_back({h->second, q->second, t->second});
    }
    return KnowledgeGraph(std::move(entities), std::move(predicates), std::move(triples));
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("knowledge graph JSON: ") + ex.what());
  }
}

KgHomomorphism KgHomomorphism::from_names(KgPtr source, KgPtr target,
                                          const std::map<EntityId, EntityId>& entities,
                                          const std::map<PredicateId, PredicateId>& predicates) {
  KgHomomorphism f{source, target, {}, {}};
  for (const auto& e : source->entities()) {
    auto it = entities.find(e);
    if (it == entities.end()) throw DomainError("entity map undefined on '" + e + "'");
    auto idx = target->entity_index(it->second);
    if (!idx) throw DomainError("entity map sends '" + e + "' outside the target");
    f.entity_map.push_back(*idx);
  }
  for (const auto& p : source->predicates()) {
    auto it = predicates.find(p);
    if (it == predicates.end()) throw DomainError("predicate map undefined on '" + p + "'");
    auto idx = target->predicate_index(it->second);
    if (!idx) throw DomainError("predicate map sends '" + p + "' outside the target");
    f.predicate_map.push_back(*idx);
  }
  return f;
}

KgHomomorphism KgHomomorphism::identity(KgPtr g) {
  KgHomomorphism f{g, g, {}, {}};
  for (std::size_t i = 0; i < g->entity_count(); ++i) f.entity_map.push_back(i);
  for (std::size_t i = 0; i < g->predicate_count(); ++i) f.predicate_map.push_back(i);
  return f;
}

HomCheck check_hom(const KgHomomorphism& f) {
  if (!f.source || !f.target) throw DomainError("homomorphism without source or target");
  if (f.entity_map.size() != f.source->entity_count() ||
      f.predicate_map.size() != f.source->predicate_count())
    throw DomainError("homomorphism maps are not total on the source");
  for (auto e : f.entity_map)
    if (e >= f.target->entity_count()) throw DomainError("entity map leaves the target");
  for (auto p : f.predicate_map)
    if (p >= f.target->predicate_count()) throw DomainError("predicate map leaves the target");

  HomCheck out;
  for (std::size_t j = 0; j < f.source->triple_count(); ++j) {
    if (!f.target->triple_index(f.image(f.source->triple(j)))) {
      out.ok = false;
      out.violations.push_back(j);
    }
  }
  return out;
}

KgHomomorphism compose_homs(const KgHomomorphism& g, const KgHomomorphism& f) {
  if (!f.target || !g.source || !(*f.target == *g.source))
    throw CompositionError("target of the first homomorphism is not the source of the second");
  KgHomomorphism out{f.source, g.target, {}, {}};
  for (auto e : f.entity_map) out.entity_map.push_back(g.entity_map.at(e));
  for (auto p : f.predicate_map) out.predicate_map.push_back(g.predicate_map.at(p));
  return out;
}

}  // namespace kgtopos
