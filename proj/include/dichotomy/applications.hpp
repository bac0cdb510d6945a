#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dichotomy/criteria.hpp"
#include "dichotomy/spec_model.hpp"

namespace dichotomy {

/// True iff the support pattern of P_n is the same for every n >= 1.
bool subshift_support_check(const CanonicalChain& chain);

/// The chain re-indexed by the left shift: P_n -> P_{n+1}, first coordinate
/// distributed as X_2.
CanonicalChain shifted_chain(const CanonicalChain& chain);

enum class ShiftVerdict { nonsingular, singular, not_loc_equivalent };
std::string_view to_string(ShiftVerdict v);

struct ShiftReport {
  bool subshift_supported = false;
  /// Series sum_n sum_{s,t} (sqrt P_n(s,t) - sqrt P_{n-1}(s,t))^2.
  SeriesClassification series_verdict;
  ShiftVerdict verdict = ShiftVerdict::not_loc_equivalent;
  /// Certificate for the class-S hypothesis; the analysis runs regardless.
  ClassMembership class_certificate;
  bool hypothesis_verified = false;
  std::vector<std::string> notes;
};

ShiftReport shift_analysis(const CanonicalChain& chain, std::size_t evidence_horizon = 1000);

enum class StationarizationVerdict { equivalent_stationary_found, singular_to_all_stationary };
std::string_view to_string(StationarizationVerdict v);

struct StationarizationReport {
  bool limit_exists = false;
  std::optional<Matrix> limit_matrix;
  /// Series sum_n sum_{s,t} (sqrt P_n(s,t) - sqrt P(s,t))^2.
  SeriesClassification series_verdict;
  StationarizationVerdict verdict = StationarizationVerdict::singular_to_all_stationary;
  std::optional<Vector> stationary_distribution;
  std::optional<MarkovMeasureSpec> stationary_spec;
  ClassMembership class_certificate;
  bool hypothesis_verified = false;
  std::vector<std::string> notes;
};

/// Stationary law of a primitive stochastic matrix, by a direct linear solve
/// with a power-iteration fallback. Returns nullopt when the matrix is not
/// primitive.
std::optional<Vector> stationary_distribution(const Matrix& p);

/// `initial` (over the working space) is used when the limit matrix is not
/// primitive, where the stationary law need not be unique.
StationarizationReport stationarize(const CanonicalChain& chain,
                                    const std::optional<Vector>& initial = std::nullopt,
                                    std::size_t evidence_horizon = 1000);

std::string shift_report_to_json(const ShiftReport& r, int indent = 2);
std::string shift_report_to_text(const ShiftReport& r);
std::string stationarization_report_to_json(const StationarizationReport& r, int indent = 2);
std::string stationarization_report_to_text(const StationarizationReport& r);

}  // namespace dichotomy
