#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kgtopos {

using EntityId = std::string;
using PredicateId = std::string;

/// A triple stored by index into the owning graph's entity and predicate lists.
struct Triple {
  std::size_t head = 0;
  std::size_t predicate = 0;
  std::size_t tail = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Finite directed edge-labelled multigraph with a fixed canonical ordering of
/// entities, predicates and triples. Immutable once constructed.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Validates the invariants (no duplicate names, no duplicate triples,
  /// triple indices in range). Throws DomainError / DuplicateError.
  KnowledgeGraph(std::vector<EntityId> entities,
                 std::vector<PredicateId> predicates,
                 std::vector<Triple> triples);

  std::size_t entity_count() const noexcept { return entities_.size(); }
  std::size_t predicate_count() const noexcept { return predicates_.size(); }
  std::size_t triple_count() const noexcept { return triples_.size(); }

  const std::vector<EntityId>& entities() const noexcept { return entities_; }
  const std::vector<PredicateId>& predicates() const noexcept { return predicates_; }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const Triple& triple(std::size_t j) const { return triples_.at(j); }

  std::optional<std::size_t> entity_index(std::string_view name) const;
  std::optional<std::size_t> predicate_index(std::string_view name) const;
  std::optional<std::size_t> triple_index(const Triple& t) const;

  /// "h --p--> t" label used by the DOT and JSON exporters.
  std::string triple_label(std::size_t j) const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.entities_ == b.entities_ && a.predicates_ == b.predicates_ &&
           a.triples_ == b.triples_;
  }

 private:
  std::vector<EntityId> entities_;
  std::vector<PredicateId> predicates_;
  std::vector<Triple> triples_;
  std::map<std::string, std::size_t, std::less<>> entity_lookup_;
  std::map<std::string, std::size_t, std::less<>> predicate_lookup_;
  std::map<Triple, std::size_t> triple_lookup_;
};

using KgPtr = std::shared_ptr<const KnowledgeGraph>;

/// Parses a triple file. Entities, predicates and triples are ordered by first
/// appearance (heads before tails within a line). Optional directives
///   @entities  e1 e2 ...
///   @predicates p1 p2 ...
/// declare items (and their order) ahead of use, which allows isolated
/// entities and unused predicates.
KnowledgeGraph parse_kg(std::string_view text);

/// Inverse of parse_kg: parse_kg(serialize_kg(g)) == g for every graph.
std::string serialize_kg(const KnowledgeGraph& g);

nlohmann::json kg_to_json(const KnowledgeGraph& g);
KnowledgeGraph kg_from_json(const nlohmann::json& j);

/// Structure-preserving map between knowledge graphs, stored by index.
struct KgHomomorphism {
  KgPtr source;
  KgPtr target;
  std::vector<std::size_t> entity_map;
  std::vector<std::size_t> predicate_map;

  /// Builds a homomorphism from name maps; throws DomainError if a map is not
  /// total on the source or names something outside the target.
  static KgHomomorphism from_names(KgPtr source, KgPtr target,
                                   const std::map<EntityId, EntityId>& entities,
                                   const std::map<PredicateId, PredicateId>& predicates);

  static KgHomomorphism identity(KgPtr g);

  /// Image of a source triple (not necessarily a target triple).
  Triple image(const Triple& t) const {
    return {entity_map.at(t.head), predicate_map.at(t.predicate), entity_map.at(t.tail)};
  }

  friend bool operator==(const KgHomomorphism& a, const KgHomomorphism& b) {
    return *a.source == *b.source && *a.target == *b.target &&
           a.entity_map == b.entity_map && a.predicate_map == b.predicate_map;
  }
};

struct HomCheck {
  bool ok = true;
  std::vector<std::size_t> violations;  // source triple indices
};

/// True iff every source triple maps onto a target triple.
HomCheck check_hom(const KgHomomorphism& f);

/// g ∘ f. Throws CompositionError unless target(f) == source(g).
KgHomomorphism compose_homs(const KgHomomorphism& g, const KgHomomorphism& f);

}  // namespace kgtopos
