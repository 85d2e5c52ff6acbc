#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgtopos/kg.hpp"

namespace kgtopos {

/// A morphism of the free category: a composable sequence of triples, read
/// left to right (tail of arrows[k] is the head of arrows[k+1]). The empty
/// sequence is the identity at `source` (== `target`).
struct Path {
  std::size_t source = 0;
  std::size_t target = 0;
  std::vector<std::size_t> arrows;

  bool is_identity() const noexcept { return arrows.empty(); }
  std::size_t length() const noexcept { return arrows.size(); }

  friend bool operator==(const Path&, const Path&) = default;
  friend auto operator<=>(const Path&, const Path&) = default;
};

Path identity_path(std::size_t object);
Path generator_path(const KnowledgeGraph& kg, std::size_t triple);

/// Diagrammatic composite: `first` then `second`. Throws CompositionError.
Path compose(const Path& first, const Path& second);

/// "id:A" for identities, "t1.t3" (1-based triple indices) otherwise.
std::string describe(const Path& p, const KnowledgeGraph& kg);
/// Inverse of describe. Throws SchemaError / CompositionError.
Path parse_path(const std::string& descriptor, const KnowledgeGraph& kg);

inline constexpr std::size_t kNoMorphism = static_cast<std::size_t>(-1);

/// C(K) with every hom-set enumerated. Morphism ids: identities 0..n-1 (in
/// entity order), then non-identity paths in lexicographic arrow order.
class FreeCategory {
 public:
  const KgPtr& graph() const noexcept { return kg_; }
  std::size_t object_count() const noexcept { return kg_->entity_count(); }
  std::size_t morphism_count() const noexcept { return paths_.size(); }
  const Path& morphism(std::size_t id) const { return paths_.at(id); }
  const std::vector<Path>& morphisms() const noexcept { return paths_; }
  std::optional<std::size_t> max_length() const noexcept { return max_length_; }

  /// True when hom-sets are closed under composition (acyclic graph, bound
  /// absent or at least the longest path).
  bool closed() const noexcept { return closed_; }

  std::size_t identity(std::size_t object) const { return object; }
  std::size_t generator(std::size_t triple) const { return generators_.at(triple); }

  /// Ids in hom(a, b), lexicographic by arrow sequence (identity first).
  const std::vector<std::size_t>& hom(std::size_t a, std::size_t b) const;
  /// Ids with the given codomain / domain, ascending.
  const std::vector<std::size_t>& into(std::size_t object) const { return into_.at(object); }
  const std::vector<std::size_t>& out_of(std::size_t object) const { return out_of_.at(object); }

  std::optional<std::size_t> find(const Path& p) const;
  /// Id of `first` then `second`, kNoMorphism if not composable or beyond the bound.
  std::size_t then(std::size_t first, std::size_t second) const;

  std::string describe(std::size_t id) const { return kgtopos::describe(paths_.at(id), *kg_); }

 private:
  friend FreeCategory build_free_category(KgPtr, std::optional<std::size_t>, std::size_t);
  KgPtr kg_;
  std::optional<std::size_t> max_length_;
  bool closed_ = true;
  std::vector<Path> paths_;
  std::vector<std::size_t> generators_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> hom_;
  std::vector<std::vector<std::size_t>> into_, out_of_;
  std::map<Path, std::size_t> lookup_;
};

/// Enumerates C(K). Without a bound the graph must be acyclic (InfinityError
/// names a cycle otherwise). Throws SizeError past `path_cap` morphisms.
FreeCategory build_free_category(KgPtr kg, std::optional<std::size_t> max_length = std::nullopt,
                                 std::size_t path_cap = 1'000'000);

nlohmann::json free_category_to_json(const FreeCategory& c);

struct Fibres {
  std::vector<std::vector<std::size_t>> by_head;  // entity -> triples with that head
  std::vector<std::vector<std::size_t>> by_tail;
};

/// Domain and codomain fibres of the generators.
Fibres fibres(const KnowledgeGraph& kg);

/// Number of walks of length 1..n in the entity digraph plus n identities,
/// from powers of the entity adjacency matrix. Equals the morphism count of
/// C(K) for acyclic K.
std::size_t walk_count(const KnowledgeGraph& kg);

/// Explicit finite category; the category laws are validated on construction.
class FiniteCategory {
 public:
  struct Arrow {
    std::size_t dom;
    std::size_t cod;
  };

  /// `compose(f, g)` must return the id of f-then-g for every composable
  /// pair. Throws TypingError if a law fails.
  template <typename ComposeFn>
  FiniteCategory(std::size_t objects, std::vector<Arrow> arrows, std::vector<std::size_t> identities,
                 ComposeFn&& compose)
      : objects_(objects), arrows_(std::move(arrows)), identities_(std::move(identities)) {
    index();
    for (std::size_t f = 0; f < arrows_.size(); ++f) {
      const auto& next = out_of_[arrows_[f].cod];
      table_[f].resize(next.size());
      for (std::size_t k = 0; k < next.size(); ++k) table_[f][k] = compose(f, next[k]);
    }
    validate();
  }

  /// Builds the category of a closed free category (same morphism ids).
  /// Throws InfinityError when `c` is not closed.
  static FiniteCategory from_free(const FreeCategory& c);
  /// Total order 0 < 1 < ... < k-1 as a category.
  static FiniteCategory chain(std::size_t k);

  std::size_t object_count() const noexcept { return objects_; }
  std::size_t morphism_count() const noexcept { return arrows_.size(); }
  const Arrow& arrow(std::size_t f) const { return arrows_.at(f); }
  std::size_t identity(std::size_t object) const { return identities_.at(object); }
  const std::vector<std::size_t>& out_of(std::size_t object) const { return out_of_.at(object); }
  const std::vector<std::size_t>& hom(std::size_t a, std::size_t b) const;
  /// f then g; kNoMorphism if not composable.
  std::size_t then(std::size_t f, std::size_t g) const;

 private:
  void index();
  void validate() const;

  std::size_t objects_ = 0;
  std::vector<Arrow> arrows_;
  std::vector<std::size_t> identities_;
  std::vector<std::vector<std::size_t>> out_of_;
  std::vector<std::size_t> position_in_out_;
  std::vector<std::vector<std::size_t>> table_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> hom_;
};

using CategoryPtr = std::shared_ptr<const FiniteCategory>;

struct Functor {
  CategoryPtr source;
  CategoryPtr target;
  std::vector<std::size_t> object_map;
  std::vector<std::size_t> morphism_map;

  friend bool operator==(const Functor& a, const Functor& b) {
    return a.object_map == b.object_map && a.morphism_map == b.morphism_map;
  }
};

/// Every violated functor law, as a readable witness; empty iff a functor.
std::vector<std::string> functor_violations(const Functor& f);

/// G ∘ F. Throws CompositionError unless F.target is G.source.
Functor compose_functors(const Functor& g, const Functor& f);

Functor identity_functor(CategoryPtr c);

/// Universal property of C(K): the unique functor C(K) → target agreeing with
/// the object and generator assignments. Throws TypingError on a dom/cod
/// mismatch and InfinityError when `cat` is not closed.
Functor extend_functor(const FreeCategory& cat, const std::vector<std::size_t>& object_assignment,
                       const std::vector<std::size_t>& generator_assignment, CategoryPtr target);

/// True iff `candidate` equals the extension of its own object and generator
/// values on every morphism of `cat`.
bool agrees_with_extension(const Functor& candidate, const FreeCategory& cat);

/// C(f): C(K) → C(K') mapping paths arrowwise. Both free categories must be
/// closed; the given ones are used as source and target.
Functor induced_functor(const KgHomomorphism& f, const FreeCategory& source,
                        const FreeCategory& target, CategoryPtr source_cat = nullptr,
                        CategoryPtr target_cat = nullptr);

}  // namespace kgtopos
