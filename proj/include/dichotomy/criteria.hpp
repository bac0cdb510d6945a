#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dichotomy/matrix.hpp"
#include "dichotomy/spec_model.hpp"

namespace dichotomy {

/// sum_{s,t} (sqrt P(s,t) - sqrt Q(s,t))^2. Throws IncompatibleError on a
/// dimension mismatch.
double d_n_squared(const Matrix& p, const Matrix& q);

enum class SeriesVerdict { converges, diverges };

struct SeriesClassification {
  SeriesVerdict verdict = SeriesVerdict::converges;
  /// (n, sum_{k<=n} term_k) at logarithmically spaced checkpoints.
  std::vector<std::pair<std::size_t, double>> partial_sums;
  /// Names the symbolic rule that decided the verdict.
  std::string tail_argument;
  /// Decay exponent of the tail terms when they decay like n^-rate; unset for
  /// identically-zero or constant-positive tails.
  std::optional<double> term_decay_rate;

  bool converges() const { return verdict == SeriesVerdict::converges; }
};

/// Classifies sum_n D_n^2(A, B) symbolically over the closed tail families.
/// Partial sums up to `evidence_horizon` are attached as evidence only.
SeriesClassification series_classify(const CanonicalChain& a, const CanonicalChain& b,
                                     std::size_t evidence_horizon = 1000);

/// Local absolute continuity of A w.r.t. B along the natural filtration.
bool loc_abs_continuous(const CanonicalChain& a, const CanonicalChain& b);

enum class MeasureClass { R, S };
enum class MembershipMethod { sufficient_condition, window_estimate, hint };
enum class Conclusion { member, not_member, undetermined };

struct ClassMembership {
  MeasureClass measure_class = MeasureClass::S;
  MembershipMethod method = MembershipMethod::sufficient_condition;
  Conclusion conclusion = Conclusion::undetermined;
  // sufficient_condition witness
  double delta = 0.0;
  std::size_t window = 0;  // M
  // window_estimate witness
  std::size_t horizon = 0;
  double min_probability = 0.0;
  std::string detail;

  bool member() const { return conclusion == Conclusion::member; }
};

/// Checks the delta/M sufficient condition for class S: every transition
/// entry is 0 or >= delta, and every product of M consecutive transition
/// matrices is entrywise positive.
ClassMembership class_s_sufficient(const CanonicalChain& chain, double delta, std::size_t window);

/// Searches for a certificate: delta is the smallest positive transition
/// entry (capped at 1/2, tail bounded symbolically), window from 1 up to the
/// Wielandt bound (d-1)^2+1.
ClassMembership class_s_auto(const CanonicalChain& chain);

/// Finite-window estimate of the liminf in the definition of R or S.
ClassMembership class_window_estimate(const CanonicalChain& chain, MeasureClass cls,
                                      std::size_t horizon);

enum class Verdict { equivalent, mutually_singular, not_A_ac_B, not_loc_equivalent, inconclusive };
enum class AppliedTheorem { A, B, none };

std::string_view to_string(SeriesVerdict v);
std::string_view to_string(MeasureClass c);
std::string_view to_string(MembershipMethod m);
std::string_view to_string(Conclusion c);
std::string_view to_string(Verdict v);
std::string_view to_string(AppliedTheorem t);

struct DecideOptions {
  /// When both are set, class S is checked with exactly (delta, window);
  /// otherwise a certificate is searched for.
  std::optional<double> delta;
  std::optional<std::size_t> window;
  /// Caller asserts membership in S (which implies R) without a certificate.
  bool assume_a_in_s = false;
  bool assume_b_in_s = false;
  std::size_t evidence_horizon = 1000;
};

struct DecisionReport {
  bool loc_ac_A_wrt_B = false;
  bool loc_ac_B_wrt_A = false;
  SeriesClassification series;
  ClassMembership class_A;
  ClassMembership class_B;
  Verdict verdict = Verdict::inconclusive;
  AppliedTheorem applied_theorem = AppliedTheorem::none;
  std::vector<std::string> notes;
};

DecisionReport decide(const CanonicalChain& a, const CanonicalChain& b,
                      const DecideOptions& options = {});

std::string report_to_json(const DecisionReport& report, int indent = 2);
std::string report_to_text(const DecisionReport& report);

}  // namespace dichotomy
