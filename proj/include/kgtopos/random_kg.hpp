#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "kgtopos/free_category.hpp"
#include "kgtopos/kg.hpp"
#include "kgtopos/sheaves.hpp"

namespace kgtopos {

using Rng = std::mt19937_64;

/// Entities e0..e{n-1}, predicates p0..; loops and parallel triples allowed.
/// n ∈ [1, max_entities], m ∈ [0, max_triples] (capped by the number of
/// distinct possible triples).
KnowledgeGraph random_kg(Rng& rng, std::size_t max_entities, std::size_t max_triples,
                         std::size_t predicate_pool = 4);

/// Every triple goes from a lower to a higher entity index, so the entity
/// digraph is acyclic.
KnowledgeGraph random_acyclic_kg(Rng& rng, std::size_t max_entities, std::size_t max_triples,
                                 std::size_t predicate_pool = 3);

/// Graph where every triple shares the same head.
KnowledgeGraph random_shared_head_kg(Rng& rng, std::size_t max_triples);

struct HomPair {
  KgPtr target;
  KgHomomorphism hom;
};

/// A homomorphism out of `source` into a freshly built target containing the
/// image triples plus `extra` random triples. With `keep_acyclic`, the entity
/// map is monotone and never merges the ends of a triple, and extra triples
/// respect the order, so an acyclic source yields an acyclic target.
HomPair random_hom(Rng& rng, const KgPtr& source, std::size_t extra, bool keep_acyclic);

/// Section sets of size [min_sections, max_sections], random restrictions.
Presheaf random_presheaf(Rng& rng, std::shared_ptr<const FreeCategory> category, std::size_t max_sections,
                         std::size_t min_sections = 1);

}  // namespace kgtopos
