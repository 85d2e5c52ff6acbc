#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgtopos/kg.hpp"

namespace kgtopos {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Exact integer matrix used for every structural identity.
using IntMatrix = Matrix<std::int64_t>;

/// n×m head-incidence matrix: entry (i,j) = 1 iff entity i is the head of triple j.
template <typename Scalar = std::int64_t>
Matrix<Scalar> head_incidence(const KnowledgeGraph& kg) {
  Matrix<Scalar> h = Matrix<Scalar>::Zero(kg.entity_count(), kg.triple_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) h(kg.triple(j).head, j) = Scalar(1);
  return h;
}

/// n×m tail-incidence matrix.
template <typename Scalar = std::int64_t>
Matrix<Scalar> tail_incidence(const KnowledgeGraph& kg) {
  Matrix<Scalar> t = Matrix<Scalar>::Zero(kg.entity_count(), kg.triple_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) t(kg.triple(j).tail, j) = Scalar(1);
  return t;
}

/// M_out = Hᵀ H over head incidence: (i,j) = 1 iff triples i and j share a head.
template <typename Scalar = std::int64_t>
Matrix<Scalar> gram_out(const KnowledgeGraph& kg) {
  const auto h = head_incidence<Scalar>(kg);
  return h.transpose() * h;
}

template <typename Scalar = std::int64_t>
Matrix<Scalar> gram_in(const KnowledgeGraph& kg) {
  const auto t = tail_incidence<Scalar>(kg);
  return t.transpose() * t;
}

/// A_out = M_out − I: adjacency of the out-line digraph.
template <typename Scalar = std::int64_t>
Matrix<Scalar> line_adjacency_out(const KnowledgeGraph& kg) {
  const auto m = static_cast<Eigen::Index>(kg.triple_count());
  return gram_out<Scalar>(kg) - Matrix<Scalar>::Identity(m, m);
}

template <typename Scalar = std::int64_t>
Matrix<Scalar> line_adjacency_in(const KnowledgeGraph& kg) {
  const auto m = static_cast<Eigen::Index>(kg.triple_count());
  return gram_in<Scalar>(kg) - Matrix<Scalar>::Identity(m, m);
}

/// Rank over the rationals, by fraction-free (Bareiss) elimination in
/// arbitrary precision.
std::size_t rank_exact(const IntMatrix& m);

/// Number of distinct heads |E_h| (resp. tails).
std::size_t distinct_heads(const KnowledgeGraph& kg);
std::size_t distinct_tails(const KnowledgeGraph& kg);

/// Eigenvalues of A_out from head-fibre sizes: m_e − 1 for every head e, and
/// −1 with multiplicity m − |E_h|. Sorted ascending.
std::vector<std::int64_t> spectrum_formula(const KnowledgeGraph& kg);

/// Tail-fibre analogue for A_in.
std::vector<std::int64_t> spectrum_formula_in(const KnowledgeGraph& kg);

struct SpectrumReport {
  std::vector<std::int64_t> exact_eigenvalues;  // sorted
  std::vector<double> numeric_eigenvalues;      // sorted
  double max_deviation = 0.0;
};

/// Sorted eigenvalues of a symmetric integer matrix. Throws SymmetryError.
std::vector<double> symmetric_eigenvalues(const IntMatrix& a);

/// Numeric eigenvalues of `a` matched against `exact` after sorting.
/// A size mismatch yields an infinite deviation.
SpectrumReport spectrum_numeric(const IntMatrix& a, std::vector<std::int64_t> exact);

/// Row per line, comma-separated integers, trailing newline after each row.
std::string to_csv(const IntMatrix& m);

}  // namespace kgtopos
