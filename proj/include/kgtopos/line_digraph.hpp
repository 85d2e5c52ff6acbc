#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kgtopos/kg.hpp"

namespace kgtopos {

/// Digraph on vertices 0..n-1; neighbour lists are sorted and duplicate-free.
struct Digraph {
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t vertex_count() const noexcept { return adjacency.size(); }
  std::size_t edge_count() const;
  bool has_edge(std::size_t u, std::size_t v) const;
  std::vector<std::size_t> in_degrees() const;
};

/// Set partition of 0..n-1. Compare with `same_partition`, which ignores the
/// order of blocks and of elements inside a block.
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;

  /// Sorted blocks, ordered by smallest element.
  Partition canonical() const;
  /// Blocks pairwise disjoint and covering 0..n-1.
  bool is_partition_of(std::size_t n) const;
};

bool same_partition(const Partition& a, const Partition& b);

/// Out-line digraph: edge τi→τj iff i≠j and the triples share a head.
Digraph build_out_line(const KnowledgeGraph& kg);
/// In-line digraph: edge τi→τj iff i≠j and the triples share a tail.
Digraph build_in_line(const KnowledgeGraph& kg);

/// Strongly connected components (iterative Tarjan), blocks in discovery order.
Partition scc(const Digraph& g);

/// Nonempty head fibres T_e, ordered by entity.
Partition head_partition(const KnowledgeGraph& kg);
Partition tail_partition(const KnowledgeGraph& kg);

struct SccTheoremReport {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Checks scc(L_out) = head fibres, scc(L_in) = tail fibres and that each
/// vertex in a fibre of size m_e has in- and out-degree m_e − 1.
SccTheoremReport verify_scc_theorem(const KnowledgeGraph& kg);

struct LineMap {
  std::vector<std::size_t> vertex_map;  // source triple -> target triple
  bool ok = true;
  std::vector<std::string> failures;    // missing edge images
};

/// Vertex map induced on line digraphs by a homomorphism, with a check that
/// every L_out and L_in edge maps to an edge (or collapses onto a vertex when
/// two triples share an image). Throws DomainError if f is not a homomorphism.
LineMap induced_line_map(const KgHomomorphism& f);

/// Composite of vertex maps, `second` after `first`.
std::vector<std::size_t> compose_maps(const std::vector<std::size_t>& second,
                                      const std::vector<std::size_t>& first);

/// DOT export; vertices labelled "h --p--> t" in triple order.
std::string to_dot(const Digraph& g, const KnowledgeGraph& kg, const std::string& name);

}  // namespace kgtopos
