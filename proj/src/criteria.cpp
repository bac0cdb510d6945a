#include "dichotomy/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dichotomy/errors.hpp"
#include "dichotomy/exact_engine.hpp"
#include "dichotomy/json_io.hpp"

namespace dichotomy {

double d_n_squared(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw IncompatibleError("d_n_squared: dimension mismatch");
  CompensatedAccumulator acc;
  for (std::size_t s = 0; s < p.rows(); ++s)
    for (std::size_t t = 0; t < p.cols(); ++t) {
      const double d = std::sqrt(p(s, t)) - std::sqrt(q(s, t));
      acc.add(d * d);
    }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Series classification

namespace {

/// A tail as base + optional perturbation term coefficient*(n+shift)^-alpha.
struct TailForm {
  Matrix base;
  bool has_term = false;
  Matrix coefficient;  // c * Delta
  double alpha = 0.0;
  std::size_t shift = 0;
};

TailForm tail_form(const TailRule& rule) {
  TailForm f;
  if (const auto* c = std::get_if<ConstantTail>(&rule)) {
    f.base = c->matrix;
    return f;
  }
  const auto& p = std::get<PowerPerturbationTail>(rule);
  f.base = p.base;
  if (!p.degenerate()) {
    f.has_term = true;
    f.coefficient = p.coefficient * p.direction;
    f.alpha = p.exponent;
    f.shift = p.index_shift;
  }
  return f;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<std::size_t> checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= horizon && n <= 16; ++n) out.push_back(n);
  for (std::size_t n = 32; n < horizon; n *= 2) out.push_back(n);
  if (horizon > 16) out.push_back(horizon);
  return out;
}

}  // namespace

SeriesClassification series_classify(const CanonicalChain& a, const CanonicalChain& b,
                                     std::size_t evidence_horizon) {
  require_compatible(a, b);
  SeriesClassification out;

  const auto marks = checkpoints(evidence_horizon);
  CompensatedAccumulator running;
  std::size_t next_mark = 0;
  for (std::size_t n = 1; n <= evidence_horizon; ++n) {
    running.add(d_n_squared(transition_at(a, n), transition_at(b, n)));
    if (next_mark < marks.size() && marks[next_mark] == n) {
      out.partial_sums.emplace_back(n, running.value());
      ++next_mark;
    }
  }

  const TailForm ta = tail_form(a.transitions.tail);
  const TailForm tb = tail_form(b.transitions.tail);
  const double limit_gap = d_n_squared(ta.base, tb.base);
  if (limit_gap > 0.0) {
    out.verdict = SeriesVerdict::diverges;
    out.tail_argument = "tail limits differ: D_n^2 -> " + fmt(limit_gap) + " > 0";
    return out;
  }

  // Common limit. The difference of the tails is a sum of at most two power
  // terms; (sqrt(p+e) - sqrt(p))^2 = e^2/(4p) + O(e^3) on the common support,
  // so D_n^2 decays like n^(-2 * leading exponent of the difference).
  std::optional<double> leading;
  std::string argument;
  if (!ta.has_term && !tb.has_term) {
    argument = "tails identical beyond the prefix";
  } else if (ta.has_term != tb.has_term) {
    leading = ta.has_term ? ta.alpha : tb.alpha;
    argument = "constant vs power tail around a common limit";
  } else if (ta.alpha != tb.alpha) {
    leading = std::min(ta.alpha, tb.alpha);
    argument = "power tails with distinct exponents around a common limit";
  } else if (!(ta.coefficient == tb.coefficient)) {
    leading = ta.alpha;
    argument = "power tails with equal exponent and distinct directions";
  } else if (ta.shift != tb.shift) {
    // c((n+a)^-x - (n+b)^-x) = c x (b-a) n^-(x+1) + O(n^-(x+2))
    leading = ta.alpha + 1.0;
    argument = "power tails equal up to an index shift";
  } else {
    argument = "tails identical beyond the prefix";
  }

  if (!leading) {
    out.verdict = SeriesVerdict::converges;
    out.tail_argument = argument + ": terms vanish";
    return out;
  }
  const double rate = 2.0 * *leading;
  out.term_decay_rate = rate;
  out.verdict = rate > 1.0 ? SeriesVerdict::converges : SeriesVerdict::diverges;
  out.tail_argument = argument + ": D_n^2 = Theta(n^-" + fmt(rate) + "), " +
                      (rate > 1.0 ? "exponent > 1" : "exponent <= 1");
  return out;
}

// ---------------------------------------------------------------------------
// Local absolute continuity

namespace {

using StateSet = std::vector<bool>;

StateSet step_reachable(const StateSet& from, const Matrix& p) {
  StateSet out(from.size(), false);
  for (std::size_t s = 0; s < from.size(); ++s)
    if (from[s])
      for (std::size_t t = 0; t < from.size(); ++t)
        if (p(s, t) > 0.0) out[t] = true;
  return out;
}

bool rows_dominated(const StateSet& reach, const Matrix& p, const Matrix& q) {
  for (std::size_t s = 0; s < reach.size(); ++s)
    if (reach[s])
      for (std::size_t t = 0; t < reach.size(); ++t)
        if (p(s, t) > 0.0 && !(q(s, t) > 0.0)) return false;
  return true;
}

}  // namespace

bool loc_abs_continuous(const CanonicalChain& a, const CanonicalChain& b) {
  require_compatible(a, b);
  const std::size_t dim = a.state_count();
  StateSet reach(dim, false);
  for (std::size_t u = 0; u < dim; ++u) {
    if (a.lambda1[u] > 0.0) {
      if (!(b.lambda1[u] > 0.0)) return false;
      reach[u] = true;
    }
  }
  const std::size_t last_explicit =
      std::max(a.transitions.explicit_length(), b.transitions.explicit_length());
  for (std::size_t n = 1; n <= last_explicit; ++n) {
    const Matrix p = transition_at(a, n);
    if (!rows_dominated(reach, p, transition_at(b, n))) return false;
    reach = step_reachable(reach, p);
  }
  // Beyond every prefix both support patterns are constant, so the reachable
  // sets evolve deterministically and repeat after finitely many steps.
  const std::size_t n_tail = last_explicit + 1;
  const Matrix p = transition_at(a, n_tail);
  const Matrix q = transition_at(b, n_tail);
  std::set<StateSet> seen;
  while (seen.insert(reach).second) {
    if (!rows_dominated(reach, p, q)) return false;
    reach = step_reachable(reach, p);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Class membership

namespace {

/// Smallest value any positive transition entry takes at any index, with the
/// power tail bounded below at its first index.
double smallest_positive_entry(const CanonicalChain& chain) {
  double lo = std::numeric_limits<double>::infinity();
  auto scan = [&](const Matrix& m) {
    for (double x : m.data())
      if (x > 0.0) lo = std::min(lo, x);
  };
  for (const auto& m : chain.transitions.prefix) scan(m);
  const auto& tail = chain.transitions.tail;
  if (const auto* c = std::get_if<ConstantTail>(&tail)) {
    scan(c->matrix);
  } else {
    const auto& p = std::get<PowerPerturbationTail>(tail);
    const double scale =
        std::abs(p.coefficient) *
        std::pow(static_cast<double>(chain.transitions.first_tail_index() + p.index_shift),
                 -p.exponent);
    for (std::size_t i = 0; i < p.base.rows(); ++i)
      for (std::size_t j = 0; j < p.base.cols(); ++j)
        if (p.base(i, j) > 0.0) lo = std::min(lo, p.base(i, j) - scale * std::abs(p.direction(i, j)));
  }
  return lo;
}

/// Smallest M such that P_n ... P_{n+M-1} is positive, capped at `limit`
/// (returns limit + 1 when no such M <= limit).
std::size_t positivity_window(const CanonicalChain& chain, std::size_t n, std::size_t limit) {
  BoolMatrix acc = support_pattern(chain, n);
  for (std::size_t len = 1; len <= limit; ++len) {
    if (all_true(acc)) return len;
    acc = boolean_product(acc, support_pattern(chain, n + len));
  }
  return limit + 1;
}

std::size_t window_search_limit(const CanonicalChain& chain) {
  const std::size_t d = chain.state_count();
  return chain.transitions.explicit_length() + (d - 1) * (d - 1) + 1;
}

}  // namespace

ClassMembership class_s_sufficient(const CanonicalChain& chain, double delta, std::size_t window) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2]");
  if (window < 1) throw std::invalid_argument("window M must be >= 1");
  ClassMembership out;
  out.measure_class = MeasureClass::S;
  out.method = MembershipMethod::sufficient_condition;
  out.delta = delta;
  out.window = window;

  const double lo = smallest_positive_entry(chain);
  if (lo < delta) {
    out.conclusion = Conclusion::undetermined;
    out.detail = "a positive transition entry falls below delta (min " + fmt(lo) + ")";
    return out;
  }
  const std::size_t last_start = chain.transitions.first_tail_index();
  for (std::size_t n = 1; n <= last_start; ++n) {
    if (positivity_window(chain, n, window) > window) {
      out.conclusion = Conclusion::undetermined;
      out.detail = "window product starting at n=" + std::to_string(n) + " is not positive";
      return out;
    }
  }
  out.conclusion = Conclusion::member;
  out.detail = "entries are 0 or >= delta and every window of M products is positive";
  return out;
}

ClassMembership class_s_auto(const CanonicalChain& chain) {
  const double delta = std::min(0.5, smallest_positive_entry(chain));
  const std::size_t limit = window_search_limit(chain);
  std::size_t needed = 1;
  for (std::size_t n = 1; n <= chain.transitions.first_tail_index(); ++n) {
    needed = std::max(needed, positivity_window(chain, n, limit));
    if (needed > limit) break;
  }
  if (needed > limit || !(delta > 0.0)) {
    ClassMembership out;
    out.method = MembershipMethod::sufficient_condition;
    out.conclusion = Conclusion::undetermined;
    out.delta = delta;
    out.window = limit;
    out.detail = "no window length up to " + std::to_string(limit) +
                 " makes every window product positive";
    return out;
  }
  return class_s_sufficient(chain, delta, needed);
}

ClassMembership class_window_estimate(const CanonicalChain& chain, MeasureClass cls,
                                      std::size_t horizon) {
  if (horizon < 2) throw std::invalid_argument("window estimate needs horizon >= 2");
  ClassMembership out;
  out.measure_class = cls;
  out.method = MembershipMethod::window_estimate;
  out.horizon = horizon;

  std::vector<Distribution> marg(horizon + 1);
  std::vector<Matrix> kernels(horizon + 1);
  marg[1] = chain.lambda1;
  for (std::size_t k = 1; k < horizon; ++k) {
    kernels[k] = transition_at(chain, k);
    marg[k + 1] = left_multiply(marg[k], kernels[k]);
  }

  double lo = std::numeric_limits<double>::infinity();
  if (cls == MeasureClass::R) {
    for (std::size_t n = (horizon + 1) / 2; n <= horizon; ++n)
      for (double x : marg[n]) lo = std::min(lo, x);
    out.detail = "min of nu(X_n = s) over n in [horizon/2, horizon]";
  } else {
    // f(n, m) = min(n, m - n) for n < m; require 4 f >= horizon.
    const std::size_t dim = chain.state_count();
    for (std::size_t n = 1; n <= horizon; ++n) {
      if (4 * n < horizon) continue;
      Matrix w = Matrix::identity(dim);
      for (std::size_t m = n + 1; m <= horizon; ++m) {
        w = w * kernels[m - 1];
        if (4 * (m - n) < horizon) continue;
        for (std::size_t s = 0; s < dim; ++s)
          for (std::size_t t = 0; t < dim; ++t) lo = std::min(lo, marg[n][s] * w(s, t));
      }
    }
    out.detail = "min of nu(X_n = s, X_m = t) over min(n, m, m - n) >= horizon/4";
  }
  if (!std::isfinite(lo)) lo = 0.0;  // empty window
  out.min_probability = lo;
  out.conclusion = lo > 0.0 ? Conclusion::member : Conclusion::not_member;
  return out;
}

// ---------------------------------------------------------------------------
// Decision

std::string_view to_string(SeriesVerdict v) {
  return v == SeriesVerdict::converges ? "converges" : "diverges";
}
std::string_view to_string(MeasureClass c) { return c == MeasureClass::R ? "R" : "S"; }
std::string_view to_string(MembershipMethod m) {
  switch (m) {
    case MembershipMethod::sufficient_condition: return "sufficient_condition";
    case MembershipMethod::window_estimate: return "window_estimate";
    case MembershipMethod::hint: return "hint";
  }
  return "?";
}
std::string_view to_string(Conclusion c) {
  switch (c) {
    case Conclusion::member: return "member";
    case Conclusion::not_member: return "not_member";
    case Conclusion::undetermined: return "undetermined";
  }
  return "?";
}
std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::equivalent: return "equivalent";
    case Verdict::mutually_singular: return "mutually_singular";
    case Verdict::not_A_ac_B: return "not_A_ac_B";
    case Verdict::not_loc_equivalent: return "not_loc_equivalent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}
std::string_view to_string(AppliedTheorem t) {
  switch (t) {
    case AppliedTheorem::A: return "A";
    case AppliedTheorem::B: return "B";
    case AppliedTheorem::none: return "none";
  }
  return "?";
}

namespace {

bool same_law(const CanonicalChain& a, const CanonicalChain& b) {
  if (a.lambda1 != b.lambda1) return false;
  const std::size_t last =
      std::max(a.transitions.explicit_length(), b.transitions.explicit_length());
  for (std::size_t n = 1; n <= last; ++n)
    if (!(transition_at(a, n) == transition_at(b, n))) return false;
  return a.transitions.tail == b.transitions.tail;
}

ClassMembership certify(const CanonicalChain& chain, const DecideOptions& options, bool assumed) {
  if (assumed) {
    ClassMembership out;
    out.method = MembershipMethod::hint;
    out.conclusion = Conclusion::member;
    out.detail = "membership in S asserted by the caller";
    return out;
  }
  if (options.delta && options.window)
    return class_s_sufficient(chain, *options.delta, *options.window);
  return class_s_auto(chain);
}

}  // namespace

DecisionReport decide(const CanonicalChain& a, const CanonicalChain& b,
                      const DecideOptions& options) {
  require_compatible(a, b);
  DecisionReport r;
  r.loc_ac_A_wrt_B = loc_abs_continuous(a, b);
  r.loc_ac_B_wrt_A = loc_abs_continuous(b, a);
  r.series = series_classify(a, b, options.evidence_horizon);
  r.class_A = certify(a, options, options.assume_a_in_s);
  r.class_B = certify(b, options, options.assume_b_in_s);

  // Membership in S implies membership in R.
  const bool a_in_s = r.class_A.member();
  const bool b_in_s = r.class_B.member();
  const bool converges = r.series.converges();

  if (!r.loc_ac_A_wrt_B && !r.loc_ac_B_wrt_A) {
    r.verdict = Verdict::not_loc_equivalent;
    r.notes.push_back("neither measure is locally absolutely continuous w.r.t. the other");
    return r;
  }
  if (!r.loc_ac_A_wrt_B) {
    r.verdict = Verdict::not_A_ac_B;
    r.notes.push_back("A is not locally absolutely continuous w.r.t. B, so A is not "
                      "absolutely continuous w.r.t. B");
    if (b_in_s) {
      r.applied_theorem = AppliedTheorem::A;
      r.notes.push_back(converges ? "B is absolutely continuous w.r.t. A (series converges)"
                                  : "B is not absolutely continuous w.r.t. A (series diverges)");
    }
    return r;
  }
  if (!r.loc_ac_B_wrt_A) {
    r.verdict = Verdict::not_loc_equivalent;
    r.notes.push_back("B is not locally absolutely continuous w.r.t. A");
    if (a_in_s) {
      r.applied_theorem = AppliedTheorem::A;
      r.notes.push_back(converges ? "A is absolutely continuous w.r.t. B (series converges)"
                                  : "A is not absolutely continuous w.r.t. B (series diverges)");
    }
    return r;
  }

  if (same_law(a, b)) {
    r.verdict = Verdict::equivalent;
    r.applied_theorem = (a_in_s && b_in_s) ? AppliedTheorem::A : AppliedTheorem::none;
    r.notes.push_back("the two measures coincide");
    return r;
  }
  if (converges) {
    if (a_in_s && b_in_s) {
      r.verdict = Verdict::equivalent;
      r.applied_theorem = AppliedTheorem::A;
    } else if (a_in_s || b_in_s) {
      r.verdict = Verdict::inconclusive;
      r.applied_theorem = AppliedTheorem::A;
      r.notes.push_back(a_in_s ? "A is absolutely continuous w.r.t. B; B's class is not certified"
                               : "B is absolutely continuous w.r.t. A; A's class is not certified");
    } else {
      r.verdict = Verdict::inconclusive;
      r.notes.push_back("series converges but neither measure is certified in R");
    }
    return r;
  }
  if (a_in_s && b_in_s) {
    r.verdict = Verdict::mutually_singular;
    r.applied_theorem = AppliedTheorem::B;
    return r;
  }
  r.verdict = Verdict::inconclusive;
  if (a_in_s || b_in_s) {
    r.applied_theorem = AppliedTheorem::A;
    r.notes.push_back(a_in_s ? "A is not absolutely continuous w.r.t. B"
                             : "B is not absolutely continuous w.r.t. A");
    r.notes.push_back("mutual singularity needs both measures certified in S");
  } else {
    r.notes.push_back("series diverges but neither measure is certified in R");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json_value(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    out.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return out;
}

nlohmann::json to_json_value(const SeriesClassification& s) {
  nlohmann::json sums = nlohmann::json::array();
  for (const auto& [n, v] : s.partial_sums) sums.push_back({n, v});
  nlohmann::json out = {{"verdict", to_string(s.verdict)},
                        {"partial_sums", sums},
                        {"tail_argument", s.tail_argument}};
  if (s.term_decay_rate) out["term_decay_rate"] = *s.term_decay_rate;
  return out;
}

nlohmann::json to_json_value(const ClassMembership& c) {
  nlohmann::json witness;
  if (c.method == MembershipMethod::window_estimate)
    witness = {{"horizon", c.horizon}, {"min_probability", c.min_probability}};
  else if (c.method == MembershipMethod::sufficient_condition)
    witness = {{"delta", c.delta}, {"M", c.window}};
  return {{"class", to_string(c.measure_class)},
          {"method", to_string(c.method)},
          {"witness", witness},
          {"conclusion", to_string(c.conclusion)},
          {"detail", c.detail}};
}

nlohmann::json to_json_value(const DecisionReport& r) {
  return {{"loc_ac_A_wrt_B", r.loc_ac_A_wrt_B},
          {"loc_ac_B_wrt_A", r.loc_ac_B_wrt_A},
          {"series", to_json_value(r.series)},
          {"class_A", to_json_value(r.class_A)},
          {"class_B", to_json_value(r.class_B)},
          {"verdict", to_string(r.verdict)},
          {"applied_theorem", to_string(r.applied_theorem)},
          {"notes", r.notes}};
}

std::string report_to_json(const DecisionReport& report, int indent) {
  return to_json_value(report).dump(indent);
}

namespace {

std::string membership_line(const ClassMembership& c) {
  std::ostringstream os;
  os << to_string(c.measure_class) << " " << to_string(c.conclusion) << " via "
     << to_string(c.method);
  if (c.method == MembershipMethod::sufficient_condition)
    os << " (delta=" << c.delta << ", M=" << c.window << ")";
  else if (c.method == MembershipMethod::window_estimate)
    os << " (horizon=" << c.horizon << ", min=" << c.min_probability << ")";
  if (!c.detail.empty()) os << ": " << c.detail;
  return os.str();
}

}  // namespace

std::string report_to_text(const DecisionReport& r) {
  std::ostringstream os;
  os << "verdict:          " << to_string(r.verdict) << "\n";
  os << "applied theorem:  " << to_string(r.applied_theorem) << "\n";
  os << "A loc<< B:        " << (r.loc_ac_A_wrt_B ? "yes" : "no") << "\n";
  os << "B loc<< A:        " << (r.loc_ac_B_wrt_A ? "yes" : "no") << "\n";
  os << "series:           " << to_string(r.series.verdict) << " (" << r.series.tail_argument
     << ")\n";
  if (!r.series.partial_sums.empty()) {
    const auto& [n, v] = r.series.partial_sums.back();
    os << "partial sum:      sum_{n<=" << n << "} D_n^2 = " << v << "\n";
  }
  os << "class A:          " << membership_line(r.class_A) << "\n";
  os << "class B:          " << membership_line(r.class_B) << "\n";
  for (const auto& note : r.notes) os << "note: " << note << "\n";
  return os.str();
}

}  // namespace dichotomy
