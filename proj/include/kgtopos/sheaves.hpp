#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgtopos/sites.hpp"

namespace kgtopos {

/// Finite presheaf on a closed free category. Sections are labelled; each
/// generator τ: h → t carries a restriction F(t) → F(h). Restrictions along
/// longer paths are the composites, cached per morphism id.
class Presheaf {
 public:
  Presheaf() = default;
  /// Throws PresheafError if a restriction is ill-sized or leaves its codomain.
  Presheaf(std::shared_ptr<const FreeCategory> category, std::vector<std::vector<std::string>> sections,
           std::vector<std::vector<std::size_t>> generator_restrictions);

  const FreeCategory& category() const { return *category_; }
  const std::shared_ptr<const FreeCategory>& category_ptr() const { return category_; }

  std::size_t size(std::size_t object) const { return sections_.at(object).size(); }
  const std::vector<std::string>& sections(std::size_t object) const { return sections_.at(object); }
  const std::string& label(std::size_t object, std::size_t s) const { return sections_.at(object).at(s); }
  std::optional<std::size_t> find_label(std::size_t object, const std::string& label) const;

  /// F(f): F(cod f) → F(dom f) for a morphism id.
  const std::vector<std::size_t>& restriction(std::size_t morphism) const { return maps_.at(morphism); }
  std::size_t restrict(std::size_t morphism, std::size_t section) const { return maps_.at(morphism).at(section); }
  const std::vector<std::vector<std::size_t>>& generator_restrictions() const { return generators_; }

  std::size_t max_section_count() const;

 private:
  std::shared_ptr<const FreeCategory> category_;
  std::vector<std::vector<std::string>> sections_;
  std::vector<std::vector<std::size_t>> generators_;
  std::vector<std::vector<std::size_t>> maps_;
};

/// Parses {"sections": {object: [labels]}, "restrictions": {path: {cod: dom}}}.
/// Every generator "tK" needs a restriction; entries for longer paths or
/// identities are checked against the composite. Throws SchemaError for
/// missing/unknown data and PresheafError (naming the path) for a
/// functoriality violation.
Presheaf load_presheaf(std::shared_ptr<const FreeCategory> category, const nlohmann::json& data);
nlohmann::json presheaf_to_json(const Presheaf& F);

Presheaf terminal_presheaf(std::shared_ptr<const FreeCategory> category);
/// Same label set at every object, identity restrictions.
Presheaf constant_presheaf(std::shared_ptr<const FreeCategory> category, std::vector<std::string> labels);

/// Sectionwise product, labels "(x,y)".
Presheaf product_presheaf(const Presheaf& F, const Presheaf& G);

/// Compatible choice of sections along a sieve; values[k] belongs to the k-th
/// member (ascending morphism id) and lies in F(dom member).
struct MatchingFamily {
  Sieve sieve;
  std::vector<std::size_t> values;

  friend bool operator==(const MatchingFamily&, const MatchingFamily&) = default;
};

/// x_{f∘h} = F(h)(x_f) for every member f and every h into dom f.
bool is_compatible(const Presheaf& F, const SieveSpace& space, const MatchingFamily& x);

/// All matching families on a sieve, in lexicographic order of the values on
/// the sieve's basis (members with no proper suffix in the sieve). Throws
/// SizeError past `cap` families.
std::vector<MatchingFamily> matching_families(const Presheaf& F, const SieveSpace& space, const Sieve& s,
                                              std::size_t cap = 1'000'000);

/// Extends values given on the sieve's basis (or on any member set that
/// determines them) to a matching family. Throws GluingError on conflict.
MatchingFamily family_from_values(const Presheaf& F, const SieveSpace& space, const Sieve& s,
                                  const std::map<std::size_t, std::size_t>& values);

/// Restriction of a section to a sieve.
MatchingFamily restrict_section(const Presheaf& F, const SieveSpace& space, const Sieve& s, std::size_t section);

struct SheafCheck {
  bool is_sheaf = true;
  std::optional<Sieve> sieve;            // counterexample
  std::optional<MatchingFamily> family;
  std::size_t amalgamations = 0;
  std::string message;
};

/// Sheaf condition: each matching family on each covering sieve has exactly
/// one amalgamation.
SheafCheck is_sheaf(const Presheaf& F, const Site& site);

/// The unique amalgamation. GluingError if none (or family incompatible /
/// sieve not covering), UniquenessError if several.
std::size_t glue(const Presheaf& F, const Site& site, const MatchingFamily& family);

/// Assignments e ↦ s_e commuting with every restriction. Throws SizeError
/// past `cap` results.
std::vector<std::vector<std::size_t>> global_sections(const Presheaf& F, std::size_t cap = 1'000'000);

struct NatTransformation {
  std::vector<std::vector<std::size_t>> components;  // per object: F(e) -> G(e)

  friend bool operator==(const NatTransformation&, const NatTransformation&) = default;
};

bool is_natural(const NatTransformation& a, const Presheaf& F, const Presheaf& G);
NatTransformation identity_nat(const Presheaf& F);
/// b ∘ a.
NatTransformation compose_nat(const NatTransformation& b, const NatTransformation& a);

inline constexpr std::size_t kDefaultSectionCap = 3;

/// Every natural transformation F → G, in lexicographic order. Throws
/// SizeError if a section set of F or G exceeds `section_cap` (0 disables)
/// or more than `result_cap` transformations exist.
std::vector<NatTransformation> enumerate_nat_transformations(const Presheaf& F, const Presheaf& G,
                                                             std::size_t section_cap = kDefaultSectionCap,
                                                             std::size_t result_cap = 1'000'000);

/// One application of the plus construction, with the bookkeeping needed to
/// map natural transformations through it.
struct PlusStage {
  struct Entry {
    SieveMask sieve;
    std::vector<std::size_t> values;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };
  Presheaf result;
  NatTransformation unit;                                  // F → F⁺
  std::vector<std::map<Entry, std::size_t>> class_of;      // per object
  std::vector<std::vector<Entry>> representative;          // per object, per class
};

PlusStage plus_construction(const Presheaf& F, const Site& site, std::size_t cap = 1'000'000);

struct Sheafification {
  PlusStage first;
  PlusStage second;
  const Presheaf& sheaf() const { return second.result; }
  NatTransformation unit;  // F → aF
};

/// aF = F⁺⁺ with its canonical map.
Sheafification sheafify(const Presheaf& F, const Site& site, std::size_t cap = 1'000'000);

/// a(α): aF → aG for α: F → G, both sheafified on the same site.
NatTransformation sheafify_map(const NatTransformation& alpha, const Sheafification& aF,
                               const Sheafification& aG, const Site& site);

/// Same presheaf data over the atomic site; always a sheaf there.
Presheaf direct_image(const Presheaf& F);
/// Sheafification on the path site.
Presheaf inverse_image(const Presheaf& F, const Site& path_site);

struct ProductCheck {
  bool ok = true;
  std::string message;
};

/// a(F×G) → aF×aG (induced by the projections) is a sectionwise bijection.
ProductCheck check_preserves_products(const Presheaf& F, const Presheaf& G, const Site& site);

struct AdjunctionReport {
  bool ok = true;
  std::size_t left_count = 0;   // |Hom(g*F, G)| on the path site
  std::size_t right_count = 0;  // |Hom(F, g_*G)| on the atomic site
  bool bijection = false;       // φ ↦ g_*(φ) ∘ unit_F
  std::string message;
};

/// Counts both Hom-sets of the inverse/direct image adjunction and checks
/// that precomposition with the unit is a bijection between them. F is a
/// presheaf (sheaf on the atomic site), G must be a sheaf on `path_site`.
AdjunctionReport check_adjunction(const Presheaf& F, const Presheaf& G, const Site& path_site,
                                  std::size_t section_cap = kDefaultSectionCap);

/// J-closed sieves: S with (f*S covering ⟹ f ∈ S) for every f into e.
bool is_closed_sieve(const Site& site, const Sieve& s);

/// Subobject classifier: Ω(e) = closed sieves on e, restriction by pullback.
Presheaf omega(const Site& site);

/// Subpresheaves of F that are sheaves, by brute force over section subsets.
std::size_t count_subsheaves(const Presheaf& F, const Site& site, std::size_t cap = 1u << 20);

nlohmann::json sheaf_check_to_json(const SheafCheck& r, const Presheaf& F, const Site& site);
nlohmann::json family_to_json(const MatchingFamily& x, const Presheaf& F, const SieveSpace& space);

}  // namespace kgtopos
