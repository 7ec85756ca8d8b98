#pragma once

#include <functional>
#include <string>
#include <vector>

namespace buckle {

/// One numeric comparison inside a criterion.
struct Check {
  enum class Relation { at_most, at_least, above, below };

  std::string name;
  double value = 0.0;
  double bound = 0.0;
  Relation relation = Relation::at_most;
  bool passed = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::string error;  ///< exception text when the criterion could not run

  bool passed() const;
  /// "PASS  3  title | name=value (<= bound); ..."
  std::string line() const;
};

struct AcceptanceOptions {
  /// Multiplies every upper bound and divides every lower bound; values below
  /// one tighten the suite for diagnostics.
  double tighten = 1.0;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

/// Criterion titles, indexed from id 1.
const std::vector<std::string>& acceptance_titles();

/// Runs the selected criteria (all when ids is empty), in increasing order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {}, std::vector<int> ids = {});

}  // namespace buckle
