#pragma once

// Brute-force ground truth by exhaustive path enumeration. Every quantity
// here is computed from explicit path probabilities, independently of the
// dynamic-programming routes in exact_engine.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "dichotomy/exact_engine.hpp"
#include "dichotomy/matrix.hpp"
#include "dichotomy/spec_model.hpp"

namespace dichotomy {

/// Maximum number of enumerated paths.
inline constexpr std::size_t kOracleGuard = 10'000'000;

struct PathEntry {
  std::vector<std::size_t> path;  // working states X_1 .. X_n
  double probability = 0.0;
};

/// Exact law of (X_1, ..., X_n); zero-probability paths are pruned.
struct PathTable {
  std::size_t length = 0;
  std::vector<PathEntry> entries;
};

/// Throws GuardError when |S|^n exceeds kOracleGuard.
PathTable enumerate_paths(const CanonicalChain& chain, std::size_t n);

Distribution oracle_marginal(const CanonicalChain& chain, std::size_t n);
Matrix oracle_pair_distribution(const CanonicalChain& chain, std::size_t n, std::size_t m);

/// sum over paths of sqrt(p_A(path) p_B(path)).
double oracle_hellinger(const CanonicalChain& a, const CanonicalChain& b, std::size_t n);

struct ZAtom {
  double z = 0.0;
  double prob_b = 0.0;
  double prob_a = 0.0;
};

/// Distribution of z_n = p_A / p_B under both measures, atoms merged by
/// exact value and sorted by z. Throws NotLocAcError on an A-positive,
/// B-null path.
std::vector<ZAtom> oracle_z_distribution(const CanonicalChain& a, const CanonicalChain& b,
                                         std::size_t n);

/// E_B[z_n] straight from the z distribution.
double oracle_z_mean(const CanonicalChain& a, const CanonicalChain& b, std::size_t n);

/// For n >= 2: one record per B-positive past (X_1..X_{n-1}) on which
/// z_{n-1} > 0, holding 2 (1 - E_B[sqrt(Z_n) | past]) with
/// Z_n = z_n / z_{n-1}.
struct ConditionalHellinger {
  std::vector<std::size_t> past;
  std::size_t last_state = 0;
  double value = 0.0;
};
std::vector<ConditionalHellinger> oracle_local_hellinger(const CanonicalChain& a,
                                                         const CanonicalChain& b, std::size_t n);

/// nu(X_n = . | E) by filtering paths (X_0, X_1, ..., X_T) that start at the
/// origin. Throws NullEventError when no path of positive mass satisfies E.
Distribution oracle_conditional(const CanonicalChain& chain, const CylinderEvent& event,
                                std::size_t n);
Matrix oracle_conditional_pair(const CanonicalChain& chain, const CylinderEvent& event,
                               std::size_t n, std::size_t m);

/// CSV dump with header "path,p_A,p_B,z"; paths are written as
/// '-'-joined state labels.
void write_path_csv(std::ostream& out, const CanonicalChain& a, const CanonicalChain& b,
                    std::size_t n);

}  // namespace dichotomy
