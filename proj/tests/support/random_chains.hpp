#pragma once

// Random spec generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "dichotomy/exact_engine.hpp"
#include "dichotomy/montecarlo.hpp"
#include "dichotomy/spec_model.hpp"

namespace dichotomy::testing {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Random support pattern with at least one positive entry per row.
inline BoolMatrix random_pattern(Rng& rng, std::size_t rows, std::size_t cols, double density) {
  BoolMatrix out(rows, std::vector<bool>(cols, false));
  for (std::size_t r = 0; r < rows; ++r) {
    bool any = false;
    for (std::size_t c = 0; c < cols; ++c) {
      out[r][c] = uniform01(rng) < density;
      any = any || out[r][c];
    }
    if (!any) out[r][std::uniform_int_distribution<std::size_t>(0, cols - 1)(rng)] = true;
  }
  return out;
}

/// Row-stochastic matrix supported exactly on `pattern`.
inline Matrix fill_pattern(Rng& rng, const BoolMatrix& pattern) {
  Matrix m(pattern.size(), pattern[0].size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (pattern[r][c]) total += (m(r, c) = 0.1 + uniform01(rng));
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) /= total;
  }
  return m;
}

/// Zero-row-sum direction living inside the support of `base`, scaled so that
/// base + c * 1^-alpha * direction stays strictly inside the support.
inline PowerPerturbationTail random_power_tail(Rng& rng, const Matrix& base) {
  PowerPerturbationTail tail{base, Matrix(base.rows(), base.cols()), 0.0, 0.0, 0};
  for (std::size_t r = 0; r < base.rows(); ++r) {
    std::vector<std::size_t> positive;
    for (std::size_t c = 0; c < base.cols(); ++c)
      if (base(r, c) > 0.0) positive.push_back(c);
    if (positive.size() < 2) continue;
    std::shuffle(positive.begin(), positive.end(), rng);
    tail.direction(r, positive[0]) = 1.0;
    tail.direction(r, positive[1]) = -1.0;
  }
  double room = 1.0;
  for (std::size_t r = 0; r < base.rows(); ++r)
    for (std::size_t c = 0; c < base.cols(); ++c)
      if (tail.direction(r, c) != 0.0) room = std::min(room, base(r, c));
  tail.coefficient = (uniform01(rng) < 0.5 ? -1.0 : 1.0) * room * (0.2 + 0.6 * uniform01(rng));
  tail.exponent = 0.25 + 1.5 * uniform01(rng);
  return tail;
}

struct Shape {
  std::size_t symbols = 2;
  Sidedness sidedness = Sidedness::one_sided;
  std::size_t states() const {
    return sidedness == Sidedness::one_sided ? symbols : symbols * symbols;
  }
};

/// Shapes with working space size 2, 3 or 4 (the last also as a two-sided
/// binary field).
inline Shape random_shape(Rng& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return {2, Sidedness::one_sided};
    case 1: return {3, Sidedness::one_sided};
    case 2: return {4, Sidedness::one_sided};
    default: return {2, Sidedness::two_sided};
  }
}

struct Patterns {
  std::vector<bool> pi0;
  BoolMatrix step0;
  std::vector<BoolMatrix> prefix;
  BoolMatrix tail;
};

inline Patterns random_patterns(Rng& rng, const Shape& shape, std::size_t prefix_length,
                                double density) {
  Patterns p;
  p.pi0 = random_pattern(rng, 1, shape.symbols, density)[0];
  p.step0 = random_pattern(rng, shape.symbols, shape.states(), density);
  for (std::size_t k = 0; k < prefix_length; ++k)
    p.prefix.push_back(random_pattern(rng, shape.states(), shape.states(), density));
  p.tail = random_pattern(rng, shape.states(), shape.states(), density);
  return p;
}

inline MarkovMeasureSpec random_spec(Rng& rng, const Shape& shape, const Patterns& patterns,
                                     bool power_tail) {
  MarkovMeasureSpec spec;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < shape.symbols; ++i) names.push_back(std::string(1, char('a' + i)));
  spec.alphabet = Alphabet(names);
  spec.sidedness = shape.sidedness;
  const Matrix pi0 = fill_pattern(rng, BoolMatrix{patterns.pi0});
  spec.pi0 = Vector(pi0.row(0).begin(), pi0.row(0).end());
  spec.step0 = fill_pattern(rng, patterns.step0);
  for (const auto& pattern : patterns.prefix) spec.transitions.prefix.push_back(fill_pattern(rng, pattern));
  const Matrix base = fill_pattern(rng, patterns.tail);
  if (power_tail)
    spec.transitions.tail = random_power_tail(rng, base);
  else
    spec.transitions.tail = ConstantTail{base};
  validate(spec);
  return spec;
}

/// A pair of chains over a shared random support (so each is locally
/// absolutely continuous with respect to the other).
inline std::pair<CanonicalChain, CanonicalChain> random_pair(Rng& rng, const Shape& shape) {
  const std::size_t prefix_length = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
  const Patterns patterns = random_patterns(rng, shape, prefix_length, 0.7);
  const bool power_a = uniform01(rng) < 0.5;
  const bool power_b = uniform01(rng) < 0.5;
  return {canonicalize(random_spec(rng, shape, patterns, power_a)),
          canonicalize(random_spec(rng, shape, patterns, power_b))};
}

/// Cylinder event read off a path sampled from the chain, so nu(E) > 0.
/// Constrains `count` random coordinates with |index| <= span.
inline CylinderEvent event_from_sample(Rng& rng, const CanonicalChain& chain, std::size_t span,
                                       std::size_t count) {
  // Draw X_0 and X_1..X_span under the chain using the library sampler's
  // law: X_0 ~ pi0, X_1 ~ step0(X_0, .), then P_k.
  auto draw = [&](std::span<const double> weights) {
    std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
    return d(rng);
  };
  const std::size_t x0 = draw(chain.pi0);
  std::vector<std::size_t> states{x0};
  std::size_t current = draw(chain.step0.row(x0));
  states.push_back(current);
  for (std::size_t k = 1; k < span; ++k) {
    current = draw(transition_at(chain, k).row(current));
    states.push_back(current);
  }
  const std::size_t symbols = chain.alphabet.size();
  const bool two_sided = chain.sidedness == Sidedness::two_sided;
  CylinderEvent event;
  auto constrain = [&](std::int64_t index, std::size_t symbol) {
    if (!event.constraints().contains(index)) event.constrain(index, symbol);
  };
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, span)(rng);
    if (k == 0) {
      constrain(0, x0);
    } else if (two_sided && uniform01(rng) < 0.5) {
      constrain(-k, states[k] / symbols);
    } else {
      constrain(k, two_sided ? states[k] % symbols : states[k]);
    }
  }
  // Pin the outermost index so the span is exactly `span`.
  constrain(static_cast<std::int64_t>(span), two_sided ? states[span] % symbols : states[span]);
  return event;
}

/// Chain satisfying the delta/M sufficient condition by construction:
/// positive entries are delta + (1 - k delta) w with w on the simplex, and
/// the support is the banded or full pattern.
inline MarkovMeasureSpec random_certified_spec(Rng& rng, std::size_t states, double delta,
                                               bool banded, std::size_t prefix_length) {
  BoolMatrix pattern(states, std::vector<bool>(states, true));
  if (banded)
    for (std::size_t r = 0; r < states; ++r)
      for (std::size_t c = 0; c < states; ++c)
        pattern[r][c] = (r + 1 == c) || (c + 1 == r) || (r == c && (r == 0 || r + 1 == states));
  auto certified = [&] {
    Matrix m(states, states);
    for (std::size_t r = 0; r < states; ++r) {
      std::size_t k = 0;
      for (std::size_t c = 0; c < states; ++c) k += pattern[r][c] ? 1 : 0;
      std::vector<double> w(states, 0.0);
      double total = 0.0;
      for (std::size_t c = 0; c < states; ++c)
        if (pattern[r][c]) total += (w[c] = -std::log(1.0 - uniform01(rng)));
      for (std::size_t c = 0; c < states; ++c)
        if (pattern[r][c]) m(r, c) = delta + (1.0 - static_cast<double>(k) * delta) * w[c] / total;
    }
    return m;
  };
  MarkovMeasureSpec spec;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < states; ++i) names.push_back("s" + std::to_string(i));
  spec.alphabet = Alphabet(names);
  spec.pi0 = Vector(states, 0.0);
  spec.pi0[std::uniform_int_distribution<std::size_t>(0, states - 1)(rng)] = 1.0;
  spec.step0 = certified();
  for (std::size_t k = 0; k < prefix_length; ++k) spec.transitions.prefix.push_back(certified());
  spec.transitions.tail = ConstantTail{certified()};
  validate(spec);
  return spec;
}

}  // namespace dichotomy::testing
