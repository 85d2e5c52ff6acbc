#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgtopos/kg.hpp"
#include "kgtopos/random_kg.hpp"
#include "kgtopos/sites.hpp"

namespace kgtopos {

enum class CheckStatus { pass, fail, skipped };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  nlohmann::json witness;  // failure witness or skip reason; null on pass
  double wall_ms = 0.0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::size_t count(CheckStatus s) const;
  /// Wall times are omitted unless requested so that output is reproducible.
  nlohmann::json to_json(bool timings = false) const;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t cases = 200;
  std::size_t max_size = 20;  // entity bound for random incidence graphs
  std::size_t sieve_cap = kDefaultSieveCap;
  std::size_t section_cap = kDefaultSectionCap;
  std::optional<std::size_t> max_path_length;
  PathCoverage coverage = PathCoverage::factoring;
  std::optional<nlohmann::json> presheaf;  // checked for the sheaf condition on the path site
};

/// Every theorem check that applies to one graph. Checks needing a finite
/// site report "skipped" (with the reason) when the graph is cyclic or over
/// the sieve cap.
void verify_graph(const KgPtr& kg, const VerifyOptions& options, VerifyReport& report);

/// Seeded random property suites, one aggregated check per suite.
void verify_random(const VerifyOptions& options, VerifyReport& report);

// Individual random suites, also driven directly by the acceptance tests.
// Each returns a failure witness, or nullopt when every case passes.
std::optional<nlohmann::json> suite_incidence_line(Rng& rng, std::size_t cases, std::size_t max_entities,
                                                   std::size_t max_triples);
std::optional<nlohmann::json> suite_categories(Rng& rng, std::size_t cases, std::size_t max_entities,
                                               std::size_t max_triples);
std::optional<nlohmann::json> suite_topology(Rng& rng, std::size_t cases, std::size_t sieve_cap);
std::optional<nlohmann::json> suite_sheafification(Rng& rng, std::size_t cases, std::size_t max_objects,
                                                   std::size_t max_sections);
std::optional<nlohmann::json> suite_adjunction(Rng& rng, std::size_t cases, std::size_t max_objects,
                                               std::size_t max_sections);
std::optional<nlohmann::json> suite_omega(Rng& rng, std::size_t cases, std::size_t max_objects);

}  // namespace kgtopos
