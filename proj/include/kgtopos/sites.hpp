#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgtopos/free_category.hpp"

namespace kgtopos {

/// Subset of the morphisms into an object; bit k is `category.into(object)[k]`.
using SieveMask = std::uint64_t;

struct Sieve {
  std::size_t object = 0;
  SieveMask members = 0;

  friend bool operator==(const Sieve&, const Sieve&) = default;
  friend auto operator<=>(const Sieve&, const Sieve&) = default;
};

inline constexpr std::size_t kDefaultSieveCap = 12;
inline constexpr std::size_t kMaxSieveCap = 24;

/// Sieve lattice of a closed free category: incoming morphisms per object,
/// precomposition tables and pullbacks. Objects with more than `cap`
/// incoming morphisms are rejected with SizeError.
class SieveSpace {
 public:
  SieveSpace(std::shared_ptr<const FreeCategory> category, std::size_t cap = kDefaultSieveCap);

  const FreeCategory& category() const noexcept { return *category_; }
  const std::shared_ptr<const FreeCategory>& category_ptr() const noexcept { return category_; }
  std::size_t object_count() const noexcept { return category_->object_count(); }
  std::size_t cap() const noexcept { return cap_; }

  /// Morphisms into `object`, in bit order.
  const std::vector<std::size_t>& incoming(std::size_t object) const { return category_->into(object); }
  /// Bit position of morphism `f` among the morphisms into its codomain.
  std::size_t bit(std::size_t f) const { return bit_.at(f); }

  SieveMask maximal(std::size_t object) const { return maximal_.at(object); }
  /// All sieves on `object` in ascending mask order.
  const std::vector<SieveMask>& sieves(std::size_t object) const { return sieves_.at(object); }

  bool is_sieve(std::size_t object, SieveMask mask) const;
  /// Smallest sieve containing the given morphisms (all with codomain `object`).
  SieveMask generated(std::size_t object, const std::vector<std::size_t>& family) const;
  /// g*S = { h : g∘h ∈ S }, a sieve on dom g. `s` is a sieve on cod g.
  SieveMask pullback(SieveMask s, std::size_t g) const;
  /// Morphism ids of a mask.
  std::vector<std::size_t> members(std::size_t object, SieveMask mask) const;

  /// Morphism id of g∘h (h then g), where h is the k-th morphism into dom g.
  std::size_t precompose(std::size_t g, std::size_t k) const { return precompose_.at(g).at(k); }

 private:
  std::shared_ptr<const FreeCategory> category_;
  std::size_t cap_;
  std::vector<std::size_t> bit_;
  std::vector<SieveMask> maximal_;
  std::vector<SieveMask> down_;                        // per morphism: its principal sieve
  std::vector<std::vector<std::size_t>> precompose_;  // per morphism g: g∘h for each h into dom g
  std::vector<std::vector<SieveMask>> sieves_;
};

using SieveSpacePtr = std::shared_ptr<const SieveSpace>;

std::vector<Sieve> enumerate_sieves(const SieveSpace& space, std::size_t object);

/// Covering sieves per object.
struct Topology {
  std::vector<std::set<SieveMask>> covering;

  bool covers(std::size_t object, SieveMask s) const { return covering.at(object).contains(s); }
  std::size_t covering_count() const;
  friend bool operator==(const Topology&, const Topology&) = default;
};

struct Site {
  SieveSpacePtr space;
  Topology topology;
  std::string name;

  const FreeCategory& category() const { return space->category(); }
};

/// Per object, a list of generating families (morphism ids into that object).
using Coverage = std::vector<std::vector<std::vector<std::size_t>>>;

/// Literal covering condition on a family into `object`: every entity reachable
/// from `object` by a path of length ≥ 1 is reachable from some member's
/// domain by a path through `object`.
bool literal_path_cover(const FreeCategory& cat, std::size_t object, const std::vector<std::size_t>& family);

/// Path-factoring coverage: per object, {id} and the family of all
/// generators into it (when nonempty). A family covers exactly when every
/// non-identity path into the object factors through a member.
Coverage path_factoring_coverage(const SieveSpace& space);
/// Literal coverage: every nonempty family (singletons suffice after saturation).
Coverage literal_coverage(const SieveSpace& space);
/// Families of isomorphisms.
Coverage isomorphism_coverage(const SieveSpace& space);

/// Smallest topology containing the sieves generated by the coverage, by
/// fixed-point saturation (maximality, pullback stability, transitivity).
/// Empty families are ignored.
Topology generate_topology(const SieveSpace& space, const Coverage& coverage);

enum class PathCoverage { factoring, literal };

Site path_site(SieveSpacePtr space, PathCoverage kind = PathCoverage::factoring);
Site atomic_site(SieveSpacePtr space);
Topology atomic_topology(const SieveSpace& space);

struct AxiomReport {
  bool ok = true;
  std::vector<std::string> failures;  // capped at 32 witnesses
};

/// Exhaustive maximality / stability / transitivity check.
AxiomReport verify_topology_axioms(const Site& site);

/// Every covering sieve of `a` covers in `b`. Throws TypingError when the
/// topologies live on different sieve spaces.
bool check_inclusion(const Site& a, const Site& b);

/// For each covering sieve of the source, the sieve generated by its image
/// under F must cover in the target. F's morphism ids are free-category ids.
AxiomReport check_site_morphism(const Functor& F, const Site& source, const Site& target);

/// Per object, the covering sieves as lists of path descriptors.
nlohmann::json topology_to_json(const Site& site);

std::string describe(const SieveSpace& space, const Sieve& s);

}  // namespace kgtopos
