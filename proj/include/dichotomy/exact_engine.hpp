#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "dichotomy/matrix.hpp"
#include "dichotomy/spec_model.hpp"

namespace dichotomy {

using Distribution = Vector;

/// Finite map from time indices to alphabet symbols. One-sided chains take
/// indices >= 0. Two-sided chains take any integer: index k != 0 constrains
/// one coordinate of the working state at time |k| (first coordinate for
/// k < 0, second for k > 0) and index 0 constrains X_0.
class CylinderEvent {
 public:
  CylinderEvent() = default;

  /// Adds X_index = symbol. Throws std::invalid_argument on a repeated index.
  CylinderEvent& constrain(std::int64_t index, std::size_t symbol);

  const std::map<std::int64_t, std::size_t>& constraints() const { return constraints_; }
  bool empty() const { return constraints_.empty(); }
  /// Largest |index| constrained; 0 for the empty event.
  std::size_t span() const;

  /// Throws SchemaError if an index or symbol is out of range for the chain.
  void check_against(const CanonicalChain& chain) const;

  /// Does X_0 = x0 satisfy the time-0 constraint?
  bool allows_origin(std::size_t x0) const;
  /// Does working state `state` at working time `k >= 1` satisfy the
  /// constraints living at that time?
  bool allows(const CanonicalChain& chain, std::size_t k, std::size_t state) const;

 private:
  std::map<std::int64_t, std::size_t> constraints_;
};

/// Law of the working coordinate at time n >= 1.
Distribution marginal(const CanonicalChain& chain, std::size_t n);

/// P_n * ... * P_m for 1 <= n <= m.
Matrix window_product(const CanonicalChain& chain, std::size_t n, std::size_t m);

/// nu(X_n = s, X_m = t) for 1 <= n < m.
double pair_probability(const CanonicalChain& chain, std::size_t n, std::size_t m,
                        std::size_t s, std::size_t t);
/// Joint law of (X_n, X_m) as a matrix indexed [s][t].
Matrix pair_distribution(const CanonicalChain& chain, std::size_t n, std::size_t m);

/// Hellinger integral E_B[sqrt(z_n)] of the laws of (X_1..X_n).
double hellinger_integral(const CanonicalChain& a, const CanonicalChain& b, std::size_t n);
/// H_1 .. H_horizon in one O(horizon |S|^2) sweep.
std::vector<double> hellinger_trajectory(const CanonicalChain& a, const CanonicalChain& b,
                                         std::size_t horizon);

/// sum_t (sqrt P_n(s,t) - sqrt Q_n(s,t))^2.
double local_hellinger(const CanonicalChain& a, const CanonicalChain& b, std::size_t n,
                       std::size_t s);

/// E_B[z_n]. Throws NotLocAcError if the law of (X_1..X_n) under A is not
/// absolutely continuous w.r.t. that under B.
double z_mean(const CanonicalChain& a, const CanonicalChain& b, std::size_t n);

/// nu(E), by a forward pass over the span of E.
double event_probability(const CanonicalChain& chain, const CylinderEvent& event);

/// nu(X_n = . | E). Throws NullEventError when nu(E) = 0.
Distribution conditional_marginal(const CanonicalChain& chain, const CylinderEvent& event,
                                  std::size_t n);

/// nu(X_n = s, X_m = t | E) for n < m.
double conditional_pair(const CanonicalChain& chain, const CylinderEvent& event, std::size_t n,
                        std::size_t m, std::size_t s, std::size_t t);
Matrix conditional_pair_distribution(const CanonicalChain& chain, const CylinderEvent& event,
                                     std::size_t n, std::size_t m);

}  // namespace dichotomy
