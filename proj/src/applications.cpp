#include "dichotomy/applications.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dichotomy/exact_engine.hpp"
#include "dichotomy/json_io.hpp"

namespace dichotomy {

std::string_view to_string(ShiftVerdict v) {
  switch (v) {
    case ShiftVerdict::nonsingular: return "nonsingular";
    case ShiftVerdict::singular: return "singular";
    case ShiftVerdict::not_loc_equivalent: return "not_loc_equivalent";
  }
  return "?";
}

std::string_view to_string(StationarizationVerdict v) {
  return v == StationarizationVerdict::equivalent_stationary_found ? "equivalent_stationary_found"
                                                                   : "singular_to_all_stationary";
}

bool subshift_support_check(const CanonicalChain& chain) {
  // The tail pattern is constant from the first tail index on.
  const BoolMatrix reference = support_pattern(chain, chain.transitions.first_tail_index());
  for (std::size_t n = 1; n < chain.transitions.first_tail_index(); ++n)
    if (support_pattern(chain, n) != reference) return false;
  return true;
}

CanonicalChain shifted_chain(const CanonicalChain& chain) {
  CanonicalChain out = chain;
  const Matrix p1 = transition_at(chain, 1);
  out.step0 = chain.step0 * p1;
  out.lambda1 = left_multiply(chain.lambda1, p1);
  auto& prefix = out.transitions.prefix;
  if (!prefix.empty()) prefix.erase(prefix.begin());
  if (auto* p = std::get_if<PowerPerturbationTail>(&out.transitions.tail)) ++p->index_shift;
  return out;
}

namespace {

std::vector<std::size_t> checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= horizon && n <= 16; ++n) out.push_back(n);
  for (std::size_t n = 32; n < horizon; n *= 2) out.push_back(n);
  if (horizon > 16) out.push_back(horizon);
  return out;
}

template <typename Term>
std::vector<std::pair<std::size_t, double>> partial_sums(std::size_t horizon, Term&& term) {
  std::vector<std::pair<std::size_t, double>> out;
  const auto marks = checkpoints(horizon);
  CompensatedAccumulator acc;
  std::size_t next = 0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    acc.add(term(n));
    if (next < marks.size() && marks[next] == n) {
      out.emplace_back(n, acc.value());
      ++next;
    }
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

ShiftReport shift_analysis(const CanonicalChain& chain, std::size_t evidence_horizon) {
  ShiftReport r;
  r.class_certificate = class_s_auto(chain);
  r.hypothesis_verified = r.class_certificate.member();
  if (!r.hypothesis_verified)
    r.notes.push_back("class S hypothesis not certified; the verdict assumes it");
  r.subshift_supported = subshift_support_check(chain);

  auto& series = r.series_verdict;
  // Term n pairs P_{n+1} with P_n (the step 0 kernel has no square partner).
  series.partial_sums = partial_sums(evidence_horizon, [&](std::size_t n) {
    return d_n_squared(transition_at(chain, n + 1), transition_at(chain, n));
  });
  const auto& tail = chain.transitions.tail;
  const auto* power = std::get_if<PowerPerturbationTail>(&tail);
  if (power == nullptr || power->degenerate()) {
    series.verdict = SeriesVerdict::converges;
    series.tail_argument = "constant tail: consecutive differences vanish";
  } else {
    // c (n^-a - (n+1)^-a) = c a n^-(a+1) + O(n^-(a+2)), squared.
    const double rate = 2.0 * (power->exponent + 1.0);
    series.term_decay_rate = rate;
    series.verdict = rate > 1.0 ? SeriesVerdict::converges : SeriesVerdict::diverges;
    series.tail_argument = "power tail: consecutive differences Theta(n^-" + fmt(rate) + ")";
  }

  if (!r.subshift_supported) {
    r.verdict = ShiftVerdict::not_loc_equivalent;
    r.notes.push_back("support pattern varies with n, so the measure and its shift image are "
                      "not locally equivalent");
  } else if (series.converges()) {
    r.verdict = ShiftVerdict::nonsingular;
  } else {
    r.verdict = ShiftVerdict::singular;
    r.notes.push_back("the shift is totally singular: the measure and its image are mutually "
                      "singular");
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

bool primitive(const Matrix& p) {
  const std::size_t d = p.rows();
  const BoolMatrix pattern = positive_pattern(p);
  BoolMatrix acc = pattern;
  const std::size_t bound = (d - 1) * (d - 1) + 1;
  for (std::size_t k = 1; k <= bound; ++k) {
    if (all_true(acc)) return true;
    acc = boolean_product(acc, pattern);
  }
  return false;
}

double residual(const Vector& pi, const Matrix& p) {
  const Vector next = left_multiply(pi, p);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, std::abs(next[i] - pi[i]));
  return r;
}

void clean(Vector& pi) {
  for (double& x : pi) x = std::max(0.0, x);
  const double total = compensated_sum(pi);
  for (double& x : pi) x /= total;
}

/// Solves pi (P - I) = 0, sum pi = 1 with the last balance equation replaced
/// by the normalization.
std::optional<Vector> direct_solve(const Matrix& p) {
  const std::size_t d = p.rows();
  Matrix a(d, d + 1);
  for (std::size_t i = 0; i < d; ++i)      // equation i: sum_j pi_j (P(j,i) - [i==j]) = 0
    for (std::size_t j = 0; j < d; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < d; ++j) a(d - 1, j) = 1.0;
  a(d - 1, d) = 1.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-14) return std::nullopt;
    for (std::size_t c = 0; c <= d; ++c) std::swap(a(col, c), a(pivot, c));
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a(r, col) / a(col, col);
      for (std::size_t c = col; c <= d; ++c) a(r, c) -= f * a(col, c);
    }
  }
  Vector pi(d);
  for (std::size_t i = 0; i < d; ++i) pi[i] = a(i, d) / a(i, i);
  return pi;
}

}  // namespace

std::optional<Vector> stationary_distribution(const Matrix& p) {
  if (!primitive(p)) return std::nullopt;
  constexpr double tolerance = 1e-12;
  if (auto pi = direct_solve(p)) {
    clean(*pi);
    if (residual(*pi, p) <= tolerance) return pi;
  }
  Vector pi(p.rows(), 1.0 / static_cast<double>(p.rows()));
  for (int iter = 0; iter < 1'000'000; ++iter) {
    Vector next = left_multiply(pi, p);
    double change = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) change = std::max(change, std::abs(next[i] - pi[i]));
    pi = std::move(next);
    if (change < 1e-15) break;
  }
  clean(pi);
  return pi;
}

StationarizationReport stationarize(const CanonicalChain& chain,
                                    const std::optional<Vector>& initial,
                                    std::size_t evidence_horizon) {
  StationarizationReport r;
  r.class_certificate = class_s_auto(chain);
  r.hypothesis_verified = r.class_certificate.member();
  if (!r.hypothesis_verified)
    r.notes.push_back("class S hypothesis not certified; the verdict assumes it");

  // Both tail families converge entrywise: to the constant matrix or to the
  // perturbation base.
  const Matrix limit = tail_limit(chain.transitions.tail);
  r.limit_exists = true;
  r.limit_matrix = limit;

  auto& series = r.series_verdict;
  series.partial_sums = partial_sums(evidence_horizon, [&](std::size_t n) {
    return d_n_squared(transition_at(chain, n), limit);
  });
  const auto* power = std::get_if<PowerPerturbationTail>(&chain.transitions.tail);
  if (power == nullptr || power->degenerate()) {
    series.verdict = SeriesVerdict::converges;
    series.tail_argument = "constant tail: terms vanish beyond the prefix";
  } else {
    const double rate = 2.0 * power->exponent;
    series.term_decay_rate = rate;
    series.verdict = rate > 1.0 ? SeriesVerdict::converges : SeriesVerdict::diverges;
    series.tail_argument = "power tail: terms Theta(n^-" + fmt(rate) + ")" +
                           (rate > 1.0 ? ", exponent > 1" : ", exponent <= 1");
  }

  if (!series.converges()) {
    r.verdict = StationarizationVerdict::singular_to_all_stationary;
    r.notes.push_back("mutually singular with every stationary Markov measure");
    return r;
  }
  r.verdict = StationarizationVerdict::equivalent_stationary_found;

  const std::size_t d = limit.rows();
  std::optional<Vector> pi = stationary_distribution(limit);
  const bool computed = pi.has_value();
  if (!pi && initial) {
    if (initial->size() != d) throw std::invalid_argument("initial distribution has wrong size");
    Vector v = *initial;
    validate_probability_vector(v, "initial distribution");
    pi = v;
    r.notes.push_back("limit matrix is not primitive; using the supplied initial distribution");
  }
  if (!pi) {
    r.notes.push_back("limit matrix is not primitive (periodic or reducible); supply an initial "
                      "distribution to build the stationary spec");
    return r;
  }
  r.stationary_distribution = pi;

  MarkovMeasureSpec spec;
  spec.alphabet = chain.alphabet;
  spec.sidedness = chain.sidedness;
  spec.transitions.tail = ConstantTail{limit};
  const std::size_t s = chain.alphabet.size();
  if (chain.sidedness == Sidedness::one_sided && computed) {
    spec.pi0 = *pi;
    spec.step0 = limit;
  } else {
    // First working coordinate distributed as pi; X_0 is not determined by
    // the limit law on the working space.
    spec.pi0 = chain.sidedness == Sidedness::one_sided ? *pi
                                                       : Vector(s, 1.0 / static_cast<double>(s));
    spec.step0 = Matrix(s, d);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < d; ++j) spec.step0(i, j) = (*pi)[j];
  }
  validate(spec);
  r.stationary_spec = std::move(spec);
  return r;
}

// ---------------------------------------------------------------------------

std::string shift_report_to_json(const ShiftReport& r, int indent) {
  nlohmann::json j = {{"subshift_supported", r.subshift_supported},
                      {"series_verdict", to_json_value(r.series_verdict)},
                      {"verdict", to_string(r.verdict)},
                      {"class_certificate", to_json_value(r.class_certificate)},
                      {"hypothesis_verified", r.hypothesis_verified},
                      {"notes", r.notes}};
  return j.dump(indent);
}

std::string shift_report_to_text(const ShiftReport& r) {
  std::ostringstream os;
  os << "verdict:             " << to_string(r.verdict) << "\n";
  os << "subshift supported:  " << (r.subshift_supported ? "yes" : "no") << "\n";
  os << "series:              " << to_string(r.series_verdict.verdict) << " ("
     << r.series_verdict.tail_argument << ")\n";
  os << "class S certified:   " << (r.hypothesis_verified ? "yes" : "no") << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

std::string stationarization_report_to_json(const StationarizationReport& r, int indent) {
  nlohmann::json j = {{"limit_exists", r.limit_exists},
                      {"series_verdict", to_json_value(r.series_verdict)},
                      {"verdict", to_string(r.verdict)},
                      {"class_certificate", to_json_value(r.class_certificate)},
                      {"hypothesis_verified", r.hypothesis_verified},
                      {"notes", r.notes}};
  j["limit_matrix"] = r.limit_matrix ? to_json_value(*r.limit_matrix) : nlohmann::json(nullptr);
  j["stationary_distribution"] =
      r.stationary_distribution ? nlohmann::json(*r.stationary_distribution) : nlohmann::json(nullptr);
  j["stationary_spec"] = r.stationary_spec
                             ? nlohmann::json::parse(serialize_spec(*r.stationary_spec))
                             : nlohmann::json(nullptr);
  return j.dump(indent);
}

std::string stationarization_report_to_text(const StationarizationReport& r) {
  std::ostringstream os;
  os << "verdict:             " << to_string(r.verdict) << "\n";
  os << "limit exists:        " << (r.limit_exists ? "yes" : "no") << "\n";
  os << "series:              " << to_string(r.series_verdict.verdict) << " ("
     << r.series_verdict.tail_argument << ")\n";
  os << "class S certified:   " << (r.hypothesis_verified ? "yes" : "no") << "\n";
  if (r.stationary_distribution) {
    os << "stationary law:     ";
    for (double x : *r.stationary_distribution) os << " " << x;
    os << "\n";
  }
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  return os.str();
}

}  // namespace dichotomy
