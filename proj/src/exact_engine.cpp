#include "dichotomy/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dichotomy/errors.hpp"

namespace dichotomy {

// ---------------------------------------------------------------------------
// CylinderEvent

CylinderEvent& CylinderEvent::constrain(std::int64_t index, std::size_t symbol) {
  if (!constraints_.emplace(index, symbol).second)
    throw std::invalid_argument("index " + std::to_string(index) + " constrained twice");
  return *this;
}

std::size_t CylinderEvent::span() const {
  std::size_t out = 0;
  for (const auto& [index, symbol] : constraints_)
    out = std::max<std::size_t>(out, static_cast<std::size_t>(index < 0 ? -index : index));
  return out;
}

void CylinderEvent::check_against(const CanonicalChain& chain) const {
  for (const auto& [index, symbol] : constraints_) {
    const std::string where = "event[" + std::to_string(index) + "]";
    if (chain.sidedness == Sidedness::one_sided && index < 0)
      throw SchemaError(where, "negative index on a one-sided chain");
    if (symbol >= chain.alphabet.size()) throw SchemaError(where, "symbol out of range");
  }
}

bool CylinderEvent::allows_origin(std::size_t x0) const {
  auto it = constraints_.find(0);
  return it == constraints_.end() || it->second == x0;
}

bool CylinderEvent::allows(const CanonicalChain& chain, std::size_t k, std::size_t state) const {
  const auto time = static_cast<std::int64_t>(k);
  if (chain.sidedness == Sidedness::one_sided) {
    auto it = constraints_.find(time);
    return it == constraints_.end() || it->second == state;
  }
  const std::size_t n = chain.alphabet.size();
  const std::size_t left = state / n;
  const std::size_t right = state % n;
  if (auto it = constraints_.find(-time); it != constraints_.end() && it->second != left)
    return false;
  if (auto it = constraints_.find(time); it != constraints_.end() && it->second != right)
    return false;
  return true;
}

// ---------------------------------------------------------------------------
// Unconditioned quantities

Distribution marginal(const CanonicalChain& chain, std::size_t n) {
  if (n == 0) throw std::invalid_argument("marginal index starts at 1");
  Distribution v = chain.lambda1;
  for (std::size_t k = 1; k < n; ++k) v = left_multiply(v, transition_at(chain, k));
  return v;
}

Matrix window_product(const CanonicalChain& chain, std::size_t n, std::size_t m) {
  if (n == 0 || m < n) throw std::invalid_argument("window_product requires 1 <= n <= m");
  Matrix out = transition_at(chain, n);
  for (std::size_t k = n + 1; k <= m; ++k) out = out * transition_at(chain, k);
  return out;
}

Matrix pair_distribution(const CanonicalChain& chain, std::size_t n, std::size_t m) {
  if (n == 0 || m <= n) throw std::invalid_argument("pair probability requires 1 <= n < m");
  const Distribution mu = marginal(chain, n);
  Matrix w = window_product(chain, n, m - 1);
  for (std::size_t s = 0; s < w.rows(); ++s)
    for (std::size_t t = 0; t < w.cols(); ++t) w(s, t) *= mu[s];
  return w;
}

double pair_probability(const CanonicalChain& chain, std::size_t n, std::size_t m, std::size_t s,
                        std::size_t t) {
  if (n == 0 || m <= n) throw std::invalid_argument("pair probability requires 1 <= n < m");
  const double mass = marginal(chain, n).at(s);
  if (mass == 0.0) return 0.0;
  return mass * window_product(chain, n, m - 1)(s, t);
}

namespace {

Matrix geometric_mean_kernel(const Matrix& p, const Matrix& q) {
  Matrix r(p.rows(), p.cols());
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) r(i, j) = std::sqrt(p(i, j) * q(i, j));
  return r;
}

}  // namespace

std::vector<double> hellinger_trajectory(const CanonicalChain& a, const CanonicalChain& b,
                                         std::size_t horizon) {
  require_compatible(a, b);
  std::vector<double> out;
  if (horizon == 0) return out;
  out.reserve(horizon);
  Vector v(a.lambda1.size());
  for (std::size_t u = 0; u < v.size(); ++u) v[u] = std::sqrt(a.lambda1[u] * b.lambda1[u]);
  out.push_back(compensated_sum(v));
  for (std::size_t k = 1; k < horizon; ++k) {
    v = left_multiply(v, geometric_mean_kernel(transition_at(a, k), transition_at(b, k)));
    out.push_back(compensated_sum(v));
  }
  return out;
}

double hellinger_integral(const CanonicalChain& a, const CanonicalChain& b, std::size_t n) {
  if (n == 0) throw std::invalid_argument("hellinger_integral index starts at 1");
  return hellinger_trajectory(a, b, n).back();
}

double local_hellinger(const CanonicalChain& a, const CanonicalChain& b, std::size_t n,
                       std::size_t s) {
  require_compatible(a, b);
  const Matrix p = transition_at(a, n);
  const Matrix q = transition_at(b, n);
  CompensatedAccumulator acc;
  for (std::size_t t = 0; t < p.cols(); ++t) {
    const double d = std::sqrt(p(s, t)) - std::sqrt(q(s, t));
    acc.add(d * d);
  }
  return acc.value();
}

double z_mean(const CanonicalChain& a, const CanonicalChain& b, std::size_t n) {
  require_compatible(a, b);
  if (n == 0) throw std::invalid_argument("z_mean index starts at 1");
  // A-mass carried on paths that stay B-positive; anything else leaks.
  Vector w(a.lambda1.size(), 0.0);
  double leaked = 0.0;
  for (std::size_t u = 0; u < w.size(); ++u) {
    if (b.lambda1[u] > 0.0)
      w[u] = a.lambda1[u];
    else
      leaked += a.lambda1[u];
  }
  for (std::size_t k = 1; k < n; ++k) {
    const Matrix p = transition_at(a, k);
    const Matrix q = transition_at(b, k);
    Vector next(w.size(), 0.0);
    for (std::size_t t = 0; t < w.size(); ++t) {
      CompensatedAccumulator acc;
      for (std::size_t s = 0; s < w.size(); ++s) {
        const double flow = w[s] * p(s, t);
        if (q(s, t) > 0.0)
          acc.add(flow);
        else
          leaked += flow;
      }
      next[t] = acc.value();
    }
    w = std::move(next);
  }
  if (leaked > 0.0)
    throw NotLocAcError("first measure charges paths the second gives zero probability (mass " +
                        std::to_string(leaked) + " by level " + std::to_string(n) + ")");
  return compensated_sum(w);
}

// ---------------------------------------------------------------------------
// Conditioning on cylinder events

namespace {

struct ForwardBackward {
  std::vector<Vector> forward;   // [k] for k = 1..horizon; [0] unused
  std::vector<Vector> backward;  // [k] for k = 1..horizon
  double mass = 0.0;
};

ForwardBackward run_forward_backward(const CanonicalChain& chain, const CylinderEvent& event,
                                     std::size_t horizon) {
  event.check_against(chain);
  horizon = std::max(horizon, event.span());
  if (horizon == 0) horizon = 1;
  const std::size_t dim = chain.state_count();

  std::vector<Matrix> kernels;  // kernels[k] = P_k, k = 1..horizon-1
  kernels.reserve(horizon);
  kernels.emplace_back();
  for (std::size_t k = 1; k < horizon; ++k) kernels.push_back(transition_at(chain, k));

  ForwardBackward fb;
  fb.forward.assign(horizon + 1, Vector(dim, 0.0));
  fb.backward.assign(horizon + 1, Vector(dim, 1.0));

  Vector origin(chain.pi0.size(), 0.0);
  for (std::size_t x = 0; x < origin.size(); ++x)
    if (event.allows_origin(x)) origin[x] = chain.pi0[x];
  fb.forward[1] = left_multiply(origin, chain.step0);
  for (std::size_t u = 0; u < dim; ++u)
    if (!event.allows(chain, 1, u)) fb.forward[1][u] = 0.0;
  for (std::size_t k = 2; k <= horizon; ++k) {
    fb.forward[k] = left_multiply(fb.forward[k - 1], kernels[k - 1]);
    for (std::size_t u = 0; u < dim; ++u)
      if (!event.allows(chain, k, u)) fb.forward[k][u] = 0.0;
  }
  for (std::size_t k = horizon; k-- > 1;) {
    for (std::size_t u = 0; u < dim; ++u) {
      CompensatedAccumulator acc;
      for (std::size_t v = 0; v < dim; ++v)
        if (event.allows(chain, k + 1, v)) acc.add(kernels[k](u, v) * fb.backward[k + 1][v]);
      fb.backward[k][u] = acc.value();
    }
  }
  fb.mass = compensated_sum(fb.forward[horizon]);
  return fb;
}

}  // namespace

double event_probability(const CanonicalChain& chain, const CylinderEvent& event) {
  return run_forward_backward(chain, event, 1).mass;
}

Distribution conditional_marginal(const CanonicalChain& chain, const CylinderEvent& event,
                                  std::size_t n) {
  if (n == 0) throw std::invalid_argument("conditional_marginal index starts at 1");
  const auto fb = run_forward_backward(chain, event, n);
  if (!(fb.mass > 0.0)) throw NullEventError();
  Distribution out(chain.state_count());
  for (std::size_t u = 0; u < out.size(); ++u)
    out[u] = fb.forward[n][u] * fb.backward[n][u] / fb.mass;
  return out;
}

Matrix conditional_pair_distribution(const CanonicalChain& chain, const CylinderEvent& event,
                                     std::size_t n, std::size_t m) {
  if (n == 0 || m <= n) throw std::invalid_argument("conditional pair requires 1 <= n < m");
  const auto fb = run_forward_backward(chain, event, m);
  if (!(fb.mass > 0.0)) throw NullEventError();
  const std::size_t dim = chain.state_count();
  Matrix out(dim, dim);
  std::vector<Matrix> kernels;
  for (std::size_t k = n; k < m; ++k) kernels.push_back(transition_at(chain, k));
  for (std::size_t s = 0; s < dim; ++s) {
    if (fb.forward[n][s] == 0.0) continue;
    Vector e(dim, 0.0);
    e[s] = fb.forward[n][s];
    for (std::size_t k = n; k < m; ++k) {
      e = left_multiply(e, kernels[k - n]);
      for (std::size_t u = 0; u < dim; ++u)
        if (!event.allows(chain, k + 1, u)) e[u] = 0.0;
    }
    for (std::size_t t = 0; t < dim; ++t) out(s, t) = e[t] * fb.backward[m][t] / fb.mass;
  }
  return out;
}

double conditional_pair(const CanonicalChain& chain, const CylinderEvent& event, std::size_t n,
                        std::size_t m, std::size_t s, std::size_t t) {
  return conditional_pair_distribution(chain, event, n, m)(s, t);
}

}  // namespace dichotomy
