#include "dichotomy/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <string>

#include "dichotomy/errors.hpp"

namespace dichotomy {

namespace {

void check_guard(std::size_t base, std::size_t length, std::size_t factor = 1) {
  double count = static_cast<double>(factor);
  for (std::size_t i = 0; i < length; ++i) count *= static_cast<double>(base);
  if (count > static_cast<double>(kOracleGuard))
    throw GuardError("path space of " + std::to_string(base) + "^" + std::to_string(length) +
                     " exceeds the enumeration guard of " + std::to_string(kOracleGuard));
}

/// Visits every path of length n with positive probability under at least one
/// of the chains, in lexicographic order. `probs[i]` is the path probability
/// under chains[i].
using PathVisitor =
    std::function<void(const std::vector<std::size_t>& path, const std::vector<double>& probs)>;

void for_each_path(const std::vector<const CanonicalChain*>& chains, std::size_t n,
                   const PathVisitor& visit) {
  if (n == 0) return;
  const std::size_t dim = chains.front()->state_count();
  check_guard(dim, n);
  std::vector<std::vector<Matrix>> kernels(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t k = 1; k < n; ++k) kernels[c].push_back(transition_at(*chains[c], k));

  std::vector<std::size_t> path(n);
  std::vector<std::vector<double>> probs(n + 1, std::vector<double>(chains.size(), 0.0));

  std::function<void(std::size_t)> descend = [&](std::size_t depth) {
    if (depth == n) {
      visit(path, probs[n]);
      return;
    }
    for (std::size_t u = 0; u < dim; ++u) {
      bool any = false;
      for (std::size_t c = 0; c < chains.size(); ++c) {
        const double step = depth == 0 ? chains[c]->lambda1[u]
                                       : kernels[c][depth - 1](path[depth - 1], u);
        probs[depth + 1][c] = (depth == 0 ? 1.0 : probs[depth][c]) * step;
        any = any || probs[depth + 1][c] > 0.0;
      }
      if (!any) continue;
      path[depth] = u;
      descend(depth + 1);
    }
  };
  descend(0);
}

}  // namespace

PathTable enumerate_paths(const CanonicalChain& chain, std::size_t n) {
  PathTable table;
  table.length = n;
  for_each_path({&chain}, n, [&](const auto& path, const auto& probs) {
    table.entries.push_back({path, probs[0]});
  });
  return table;
}

Distribution oracle_marginal(const CanonicalChain& chain, std::size_t n) {
  Distribution out(chain.state_count(), 0.0);
  for_each_path({&chain}, n, [&](const auto& path, const auto& probs) {
    out[path[n - 1]] += probs[0];
  });
  return out;
}

Matrix oracle_pair_distribution(const CanonicalChain& chain, std::size_t n, std::size_t m) {
  Matrix out(chain.state_count(), chain.state_count());
  for_each_path({&chain}, m, [&](const auto& path, const auto& probs) {
    out(path[n - 1], path[m - 1]) += probs[0];
  });
  return out;
}

double oracle_hellinger(const CanonicalChain& a, const CanonicalChain& b, std::size_t n) {
  require_compatible(a, b);
  CompensatedAccumulator acc;
  for_each_path({&a, &b}, n, [&](const auto&, const auto& probs) {
    acc.add(std::sqrt(probs[0] * probs[1]));
  });
  return acc.value();
}

std::vector<ZAtom> oracle_z_distribution(const CanonicalChain& a, const CanonicalChain& b,
                                         std::size_t n) {
  require_compatible(a, b);
  std::map<double, ZAtom> atoms;
  for_each_path({&a, &b}, n, [&](const auto& path, const auto& probs) {
    const double pa = probs[0];
    const double pb = probs[1];
    if (pb == 0.0) {
      if (pa > 0.0) {
        std::string where;
        for (std::size_t u : path) where += (where.empty() ? "" : "-") + a.state_space[u];
        throw NotLocAcError("path " + where + " has positive probability under A only");
      }
      return;
    }
    const double z = pa / pb;
    auto& atom = atoms[z];
    atom.z = z;
    atom.prob_b += pb;
    atom.prob_a += pa;
  });
  std::vector<ZAtom> out;
  out.reserve(atoms.size());
  for (const auto& [z, atom] : atoms) out.push_back(atom);
  return out;
}

double oracle_z_mean(const CanonicalChain& a, const CanonicalChain& b, std::size_t n) {
  CompensatedAccumulator acc;
  for (const auto& atom : oracle_z_distribution(a, b, n)) acc.add(atom.z * atom.prob_b);
  return acc.value();
}

std::vector<ConditionalHellinger> oracle_local_hellinger(const CanonicalChain& a,
                                                         const CanonicalChain& b, std::size_t n) {
  require_compatible(a, b);
  if (n < 2) throw std::invalid_argument("oracle_local_hellinger needs n >= 2");
  struct Group {
    double prob_b_past = 0.0;
    double z_past = 0.0;
    double weighted_sqrt = 0.0;  // sum over continuations of p_B(path) sqrt(Z_n)
  };
  std::map<std::vector<std::size_t>, Group> groups;
  // Pasts are read off full paths; their own probabilities come from the
  // length n-1 enumeration.
  for_each_path({&a, &b}, n - 1, [&](const auto& past, const auto& probs) {
    if (probs[1] > 0.0 && probs[0] > 0.0) {
      auto& g = groups[past];
      g.prob_b_past = probs[1];
      g.z_past = probs[0] / probs[1];
    }
  });
  for_each_path({&a, &b}, n, [&](const auto& path, const auto& probs) {
    std::vector<std::size_t> past(path.begin(), path.end() - 1);
    auto it = groups.find(past);
    if (it == groups.end() || probs[1] == 0.0) return;
    const double z_n = probs[0] / probs[1];
    it->second.weighted_sqrt += probs[1] * std::sqrt(z_n / it->second.z_past);
  });
  std::vector<ConditionalHellinger> out;
  for (const auto& [past, g] : groups) {
    const double conditional = g.weighted_sqrt / g.prob_b_past;
    out.push_back({past, past.back(), 2.0 * (1.0 - conditional)});
  }
  return out;
}

namespace {

/// Enumerates (X_0, X_1, ..., X_T) for the conditional oracles. `visit`
/// receives the working path (index 0 holds X_0) and the probability.
void for_each_rooted_path(
    const CanonicalChain& chain, std::size_t horizon,
    const std::function<void(const std::vector<std::size_t>&, double)>& visit) {
  const std::size_t dim = chain.state_count();
  check_guard(dim, horizon, chain.alphabet.size());
  std::vector<Matrix> kernels;
  for (std::size_t k = 1; k < horizon; ++k) kernels.push_back(transition_at(chain, k));
  std::vector<std::size_t> path(horizon + 1);
  std::function<void(std::size_t, double)> descend = [&](std::size_t depth, double p) {
    if (depth > horizon) {
      visit(path, p);
      return;
    }
    const std::size_t width = depth == 0 ? chain.alphabet.size() : dim;
    for (std::size_t u = 0; u < width; ++u) {
      double step;
      if (depth == 0)
        step = chain.pi0[u];
      else if (depth == 1)
        step = chain.step0(path[0], u);
      else
        step = kernels[depth - 2](path[depth - 1], u);
      if (!(p * step > 0.0)) continue;
      path[depth] = u;
      descend(depth + 1, p * step);
    }
  };
  descend(0, 1.0);
}

/// Symbol at time `index` of the underlying sequence, decoded from a rooted
/// working path.
std::size_t symbol_at(const CanonicalChain& chain, const std::vector<std::size_t>& path,
                      std::int64_t index) {
  if (index == 0) return path[0];
  const auto k = static_cast<std::size_t>(index < 0 ? -index : index);
  if (chain.sidedness == Sidedness::one_sided) return path[k];
  const std::size_t s = chain.alphabet.size();
  return index < 0 ? path[k] / s : path[k] % s;
}

bool satisfies(const CanonicalChain& chain, const CylinderEvent& event,
               const std::vector<std::size_t>& path) {
  for (const auto& [index, symbol] : event.constraints())
    if (symbol_at(chain, path, index) != symbol) return false;
  return true;
}

}  // namespace

Distribution oracle_conditional(const CanonicalChain& chain, const CylinderEvent& event,
                                std::size_t n) {
  event.check_against(chain);
  const std::size_t horizon = std::max(n, event.span());
  Distribution out(chain.state_count(), 0.0);
  double mass = 0.0;
  for_each_rooted_path(chain, horizon, [&](const auto& path, double p) {
    if (!satisfies(chain, event, path)) return;
    mass += p;
    out[path[n]] += p;
  });
  if (!(mass > 0.0)) throw NullEventError();
  for (double& x : out) x /= mass;
  return out;
}

Matrix oracle_conditional_pair(const CanonicalChain& chain, const CylinderEvent& event,
                               std::size_t n, std::size_t m) {
  event.check_against(chain);
  const std::size_t horizon = std::max(m, event.span());
  Matrix out(chain.state_count(), chain.state_count());
  double mass = 0.0;
  for_each_rooted_path(chain, horizon, [&](const auto& path, double p) {
    if (!satisfies(chain, event, path)) return;
    mass += p;
    out(path[n], path[m]) += p;
  });
  if (!(mass > 0.0)) throw NullEventError();
  for (std::size_t s = 0; s < out.rows(); ++s)
    for (std::size_t t = 0; t < out.cols(); ++t) out(s, t) /= mass;
  return out;
}

void write_path_csv(std::ostream& out, const CanonicalChain& a, const CanonicalChain& b,
                    std::size_t n) {
  require_compatible(a, b);
  out << "path,p_A,p_B,z\n";
  const auto old_precision = out.precision(17);
  for_each_path({&a, &b}, n, [&](const auto& path, const auto& probs) {
    std::string label;
    for (std::size_t u : path) label += (label.empty() ? "" : "-") + a.state_space[u];
    out << '"' << label << "\"," << probs[0] << ',' << probs[1] << ',';
    if (probs[1] > 0.0)
      out << probs[0] / probs[1];
    else
      out << "inf";
    out << '\n';
  });
  out.precision(old_precision);
}

}  // namespace dichotomy
