#include "dichotomy/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "dichotomy/random.hpp"
#include "json.hpp"

namespace dichotomy {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Inverse-CDF sampler over the exact finite-dimensional law.
class PathSampler {
 public:
  PathSampler(const CanonicalChain& chain, std::size_t n) : dim_(chain.state_count()) {
    initial_ = cumulate(chain.lambda1);
    steps_.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t k = 1; k < n; ++k) {
      const Matrix p = transition_at(chain, k);
      std::vector<double> rows;
      rows.reserve(dim_ * dim_);
      for (std::size_t s = 0; s < dim_; ++s) {
        auto c = cumulate(p.row(s));
        rows.insert(rows.end(), c.begin(), c.end());
      }
      steps_.push_back(std::move(rows));
    }
  }

  std::size_t first(SplitMix64& rng) const { return draw(initial_, rng.uniform()); }

  /// Draws X_{k+1} given X_k = from.
  std::size_t next(std::size_t k, std::size_t from, SplitMix64& rng) const {
    return draw({steps_[k - 1].data() + from * dim_, dim_}, rng.uniform());
  }

 private:
  static std::vector<double> cumulate(std::span<const double> probs) {
    std::vector<double> out(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      out[i] = acc;
    }
    return out;
  }

  static std::size_t draw(std::span<const double> cum, double u) {
    for (std::size_t j = 0; j < cum.size(); ++j)
      if (u < cum[j]) return j;
    // Rounding left the total below u; take the last state with mass.
    for (std::size_t j = cum.size(); j-- > 0;)
      if (j == 0 || cum[j] > cum[j - 1]) return j;
    return 0;
  }

  std::size_t dim_;
  std::vector<double> initial_;
  std::vector<std::vector<double>> steps_;
};

/// log(p_A / p_B) tables for the first coordinate and each transition.
class LogRatioTable {
 public:
  LogRatioTable(const CanonicalChain& a, const CanonicalChain& b, std::size_t n)
      : dim_(a.state_count()) {
    initial_.resize(dim_);
    for (std::size_t u = 0; u < dim_; ++u) initial_[u] = log_ratio(a.lambda1[u], b.lambda1[u]);
    for (std::size_t k = 1; k < n; ++k) {
      const Matrix p = transition_at(a, k);
      const Matrix q = transition_at(b, k);
      std::vector<double> t(dim_ * dim_);
      for (std::size_t s = 0; s < dim_; ++s)
        for (std::size_t v = 0; v < dim_; ++v) t[s * dim_ + v] = log_ratio(p(s, v), q(s, v));
      steps_.push_back(std::move(t));
    }
  }

  double initial(std::size_t u) const { return initial_[u]; }
  double step(std::size_t k, std::size_t s, std::size_t t) const {
    return steps_[k - 1][s * dim_ + t];
  }

 private:
  // Only evaluated on B-positive transitions, since paths are drawn under B.
  static double log_ratio(double pa, double pb) {
    if (!(pb > 0.0)) return 0.0;
    if (!(pa > 0.0)) return kLogZeroSentinel;
    return std::log(pa) - std::log(pb);
  }

  std::size_t dim_;
  std::vector<double> initial_;
  std::vector<std::vector<double>> steps_;
};

/// Walks one path under B, reporting log z_k for k = 1..n.
template <typename Sink>
void walk_log_ratio(const PathSampler& sampler, const LogRatioTable& ratios, std::size_t n,
                    SplitMix64 rng, Sink&& sink) {
  std::size_t x = sampler.first(rng);
  double log_z = ratios.initial(x);
  sink(1, log_z);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t y = sampler.next(k, x, rng);
    if (log_z != kLogZeroSentinel) {
      const double inc = ratios.step(k, x, y);
      log_z = inc == kLogZeroSentinel ? kLogZeroSentinel : log_z + inc;
    }
    sink(k + 1, log_z);
    x = y;
  }
}

LogLrSummary summarize_finals(const std::vector<double>& finals, std::uint64_t seed,
                              std::size_t horizon, double threshold) {
  LogLrSummary s;
  s.seed = seed;
  s.horizon = horizon;
  s.count = finals.size();
  s.threshold = threshold;
  if (finals.empty()) return s;
  std::size_t below = 0;
  double sum_z = 0.0, sum_z2 = 0.0, sum_log = 0.0;
  std::size_t finite = 0;
  for (double l : finals) {
    if (l == kLogZeroSentinel) {
      ++s.sentinel_count;
      ++below;
      continue;
    }
    if (l < -threshold) ++below;
    const double z = std::exp(l);
    sum_z += z;
    sum_z2 += z * z;
    sum_log += l;
    ++finite;
  }
  const double count = static_cast<double>(finals.size());
  s.fraction_below = static_cast<double>(below) / count;
  s.mean_z = sum_z / count;
  if (finals.size() > 1) {
    const double var = std::max(0.0, (sum_z2 - count * s.mean_z * s.mean_z) / (count - 1.0));
    s.z_standard_error = std::sqrt(var / count);
  }
  s.confidence_radius = 4.0 * s.z_standard_error;
  s.mean_log_z = finite > 0 ? sum_log / static_cast<double>(finite) : kLogZeroSentinel;
  std::vector<double> sorted = finals;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median_log_z = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  if (sorted.size() % 2 == 0 &&
      (sorted[mid - 1] == kLogZeroSentinel || sorted[mid] == kLogZeroSentinel))
    s.median_log_z = kLogZeroSentinel;
  return s;
}

void check_pair(const CanonicalChain& a, const CanonicalChain& b, std::size_t n,
                std::size_t count) {
  require_compatible(a, b);
  if (n == 0) throw std::invalid_argument("horizon must be >= 1");
  if (count == 0) throw std::invalid_argument("sample count must be >= 1");
}

}  // namespace

std::vector<Path> sample_paths(const CanonicalChain& chain, std::size_t n, std::size_t count,
                               std::uint64_t seed, unsigned threads) {
  if (count == 0) throw std::invalid_argument("sample count must be >= 1");
  std::vector<Path> out(count, Path(n));
  if (n == 0) return out;
  const PathSampler sampler(chain, n);
  parallel_for(count, threads, [&](std::size_t i) {
    auto rng = path_stream(seed, i);
    Path& p = out[i];
    p[0] = sampler.first(rng);
    for (std::size_t k = 1; k < n; ++k) p[k] = sampler.next(k, p[k - 1], rng);
  });
  return out;
}

TrajectoryBatch loglr_trajectories(const CanonicalChain& a, const CanonicalChain& b,
                                   std::size_t n, std::size_t count, std::uint64_t seed,
                                   unsigned threads) {
  check_pair(a, b, n, count);
  TrajectoryBatch batch;
  batch.seed = seed;
  batch.horizon = n;
  batch.count = count;
  batch.log_z.assign(n * count, 0.0);
  const PathSampler sampler(b, n);
  const LogRatioTable ratios(a, b, n);
  parallel_for(count, threads, [&](std::size_t i) {
    double* row = batch.log_z.data() + i * n;
    walk_log_ratio(sampler, ratios, n, path_stream(seed, i),
                   [row](std::size_t k, double v) { row[k - 1] = v; });
  });
  return batch;
}

LogLrSummary summarize(const TrajectoryBatch& batch, double threshold) {
  std::vector<double> finals(batch.count);
  for (std::size_t i = 0; i < batch.count; ++i) finals[i] = batch.final_log_z(i);
  return summarize_finals(finals, batch.seed, batch.horizon, threshold);
}

LogLrSummary loglr_summary(const CanonicalChain& a, const CanonicalChain& b, std::size_t n,
                           std::size_t count, std::uint64_t seed, double threshold,
                           unsigned threads) {
  check_pair(a, b, n, count);
  const PathSampler sampler(b, n);
  const LogRatioTable ratios(a, b, n);
  std::vector<double> finals(count);
  parallel_for(count, threads, [&](std::size_t i) {
    double last = 0.0;
    walk_log_ratio(sampler, ratios, n, path_stream(seed, i),
                   [&last](std::size_t, double v) { last = v; });
    finals[i] = last;
  });
  return summarize_finals(finals, seed, n, threshold);
}

double Weights::at(std::size_t n) const {
  if (kind == Kind::constant) return scale;
  return scale * std::pow(static_cast<double>(n), -exponent);
}

FatouEstimate fatou_diagnostic(const CanonicalChain& chain, const Weights& weights,
                               std::size_t state, std::size_t horizon, double threshold,
                               std::size_t count, std::uint64_t seed, unsigned threads) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold C must be > 0");
  if (count == 0) throw std::invalid_argument("sample count must be >= 1");
  if (state >= chain.state_count()) throw std::invalid_argument("state out of range");
  FatouEstimate out;
  out.count = count;
  if (horizon == 0) return out;
  std::vector<double> a(horizon + 1);
  for (std::size_t n = 1; n <= horizon; ++n) a[n] = weights.at(n);
  const PathSampler sampler(chain, horizon);
  std::vector<char> hit(count, 0);
  parallel_for(count, threads, [&](std::size_t i) {
    auto rng = path_stream(seed, i);
    std::size_t x = sampler.first(rng);
    double total = x == state ? a[1] : 0.0;
    for (std::size_t k = 1; k < horizon; ++k) {
      x = sampler.next(k, x, rng);
      if (x == state) total += a[k + 1];
    }
    hit[i] = total >= threshold ? 1 : 0;
  });
  for (char h : hit) out.hits += static_cast<std::size_t>(h);
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(count);
  out.radius = 4.0 * std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(count));
  return out;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryBatch& batch) {
  out << "path_id,k,log_z\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < batch.count; ++i) {
    const auto row = batch.path(i);
    for (std::size_t k = 0; k < batch.horizon; ++k) {
      out << i << ',' << (k + 1) << ',';
      if (row[k] == kLogZeroSentinel)
        out << "-inf";
      else
        out << row[k];
      out << '\n';
    }
  }
  out.precision(old_precision);
}

std::string summary_to_json(const LogLrSummary& s, int indent) {
  auto finite_or_null = [](double v) -> nlohmann::json {
    if (v == kLogZeroSentinel) return nullptr;
    return v;
  };
  nlohmann::json j = {{"seed", s.seed},
                      {"horizon", s.horizon},
                      {"count", s.count},
                      {"threshold", s.threshold},
                      {"fraction_below_threshold", s.fraction_below},
                      {"sentinel_count", s.sentinel_count},
                      {"mean_z", s.mean_z},
                      {"z_standard_error", s.z_standard_error},
                      {"confidence_radius", s.confidence_radius},
                      {"mean_log_z", finite_or_null(s.mean_log_z)},
                      {"median_log_z", finite_or_null(s.median_log_z)}};
  return j.dump(indent);
}

}  // namespace dichotomy
