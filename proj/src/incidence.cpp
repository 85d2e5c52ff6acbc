#include "kgtopos/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "kgtopos/error.hpp"

namespace kgtopos {

using boost::multiprecision::cpp_int;

std::size_t rank_exact(const IntMatrix& m) {
  const auto rows = m.rows(), cols = m.cols();
  std::vector<std::vector<cpp_int>> a(rows, std::vector<cpp_int>(cols));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a[i][j] = m(i, j);

  // Bareiss: every division below is exact.
  cpp_int prev = 1;
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
    Eigen::Index pivot = rank;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (Eigen::Index i = rank + 1; i < rows; ++i) {
      for (Eigen::Index j = col + 1; j < cols; ++j)
        a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return static_cast<std::size_t>(rank);
}

namespace {

std::vector<std::int64_t> fibre_spectrum(const KnowledgeGraph& kg, bool heads) {
  std::vector<std::int64_t> fibre(kg.entity_count(), 0);
  for (const auto& t : kg.triples()) ++fibre[heads ? t.head : t.tail];
  std::vector<std::int64_t> ev;
  for (auto size : fibre) {
    if (size == 0) continue;
    ev.push_back(size - 1);
    for (std::int64_t k = 1; k < size; ++k) ev.push_back(-1);
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::size_t count_distinct(const KnowledgeGraph& kg, bool heads) {
  std::set<std::size_t> s;
  for (const auto& t : kg.triples()) s.insert(heads ? t.head : t.tail);
  return s.size();
}

}  // namespace

std::size_t distinct_heads(const KnowledgeGraph& kg) { return count_distinct(kg, true); }
std::size_t distinct_tails(const KnowledgeGraph& kg) { return count_distinct(kg, false); }

std::vector<std::int64_t> spectrum_formula(const KnowledgeGraph& kg) { return fibre_spectrum(kg, true); }
std::vector<std::int64_t> spectrum_formula_in(const KnowledgeGraph& kg) { return fibre_spectrum(kg, false); }

std::vector<double> symmetric_eigenvalues(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw SymmetryError("matrix is not square");
  if (a != a.transpose()) throw SymmetryError("matrix is not symmetric");
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix<double>> solver(a.cast<double>(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SymmetryError("eigensolver did not converge");
  const auto& v = solver.eigenvalues();
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

SpectrumReport spectrum_numeric(const IntMatrix& a, std::vector<std::int64_t> exact) {
  SpectrumReport r;
  r.numeric_eigenvalues = symmetric_eigenvalues(a);
  std::sort(exact.begin(), exact.end());
  r.exact_eigenvalues = std::move(exact);
  if (r.exact_eigenvalues.size() != r.numeric_eigenvalues.size()) {
    r.max_deviation = std::numeric_limits<double>::infinity();
    return r;
  }
  for (std::size_t i = 0; i < r.exact_eigenvalues.size(); ++i)
    r.max_deviation = std::max(
        r.max_deviation,
        std::abs(static_cast<double>(r.exact_eigenvalues[i]) - r.numeric_eigenvalues[i]));
  return r;
}

std::string to_csv(const IntMatrix& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace kgtopos
