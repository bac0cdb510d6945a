#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dichotomy/spec_model.hpp"

namespace dichotomy {

using Path = std::vector<std::size_t>;  // working states X_1 .. X_n

/// Stands in for log z = -inf once a path leaves the support of A.
inline constexpr double kLogZeroSentinel = -std::numeric_limits<double>::max();

/// `threads == 0` uses the hardware concurrency. Results never depend on it.
std::vector<Path> sample_paths(const CanonicalChain& chain, std::size_t n, std::size_t count,
                               std::uint64_t seed, unsigned threads = 0);

struct TrajectoryBatch {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t count = 0;
  std::vector<double> log_z;  // count x horizon, row k-1 of path i at [i*horizon + k-1]

  std::span<const double> path(std::size_t i) const {
    return {log_z.data() + i * horizon, horizon};
  }
  double final_log_z(std::size_t i) const { return log_z[i * horizon + horizon - 1]; }
};

/// Samples `count` paths under B and records log z_k = log(p_A / p_B) of
/// (X_1..X_k) for k = 1..n along each.
TrajectoryBatch loglr_trajectories(const CanonicalChain& a, const CanonicalChain& b,
                                   std::size_t n, std::size_t count, std::uint64_t seed,
                                   unsigned threads = 0);

struct LogLrSummary {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t count = 0;
  double threshold = 0.0;          // T in the event {log z_n < -T}
  double fraction_below = 0.0;     // includes sentinel paths
  std::size_t sentinel_count = 0;  // paths with z_n = 0
  double mean_z = 0.0;             // sentinel paths contribute z = 0
  double z_standard_error = 0.0;
  double confidence_radius = 0.0;  // 4 standard errors
  double mean_log_z = 0.0;         // over non-sentinel paths
  double median_log_z = 0.0;       // sentinel paths sort lowest
};

LogLrSummary summarize(const TrajectoryBatch& batch, double threshold);

/// Same numbers as summarize(loglr_trajectories(...)) without storing the
/// trajectories.
LogLrSummary loglr_summary(const CanonicalChain& a, const CanonicalChain& b, std::size_t n,
                           std::size_t count, std::uint64_t seed, double threshold,
                           unsigned threads = 0);

/// a_n = scale (constant) or scale * n^-exponent (power).
struct Weights {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  double scale = 1.0;
  double exponent = 0.0;

  double at(std::size_t n) const;
};

struct FatouEstimate {
  double estimate = 0.0;
  double radius = 0.0;  // 4 binomial standard errors
  std::size_t hits = 0;
  std::size_t count = 0;
};

/// Monte Carlo estimate of P(sum_{n<=horizon} a_n 1{X_n = state} >= threshold).
FatouEstimate fatou_diagnostic(const CanonicalChain& chain, const Weights& weights,
                               std::size_t state, std::size_t horizon, double threshold,
                               std::size_t count, std::uint64_t seed, unsigned threads = 0);

/// Header "path_id,k,log_z"; sentinel entries are written as -inf.
void write_trajectory_csv(std::ostream& out, const TrajectoryBatch& batch);
std::string summary_to_json(const LogLrSummary& summary, int indent = 2);

}  // namespace dichotomy
