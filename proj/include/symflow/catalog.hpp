#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "symflow/index_theorems.hpp"

namespace symflow {

struct ExpectedIndex {
  std::string name;  ///< matches an IndexReport lhs_name or term name
  int value = 0;
  std::string provenance;
};

struct CatalogEntry {
  std::string id;
  std::string description;
  std::variant<ClinicProblem, BoundedProblem> problem;
  std::vector<ExpectedIndex> expected;
  std::string oracle;  ///< how the expected integers are known independently

  bool is_clinic() const { return std::holds_alternative<ClinicProblem>(problem); }
  const ClinicProblem& clinic() const;
  const BoundedProblem& bounded() const;
  /// nullptr when the entry pins no value under that name
  const ExpectedIndex* find_expected(const std::string& name) const;
};

/// Entries in a fixed order; the random bounded entry uses the given seed.
std::vector<CatalogEntry> catalog(std::uint64_t seed = 1);

/// Looks up an id; "random-bounded-<k>" builds the random entry with seed k.
/// Throws ConfigError for unknown ids.
CatalogEntry find_entry(const std::string& id);

/// Hyperbolic limits for h-clinic entries and Lagrangian boundary frames; throws on failure.
void validate_entry(const CatalogEntry& e);

BoundedProblem random_bounded_problem(std::uint64_t seed);

}  // namespace symflow
