#pragma once

#include <string>
#include <vector>

#include "dichotomy/spec_model.hpp"

namespace dichotomy::testing {

inline Alphabet letters(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, char('a' + i)));
  return Alphabet(names);
}

/// One-sided spec with a constant tail.
inline MarkovMeasureSpec one_sided(Vector pi0, Matrix step0, std::vector<Matrix> prefix,
                                   Matrix tail) {
  MarkovMeasureSpec spec;
  spec.alphabet = letters(pi0.size());
  spec.pi0 = std::move(pi0);
  spec.step0 = std::move(step0);
  spec.transitions.prefix = std::move(prefix);
  spec.transitions.tail = ConstantTail{std::move(tail)};
  validate(spec);
  return spec;
}

inline CanonicalChain constant_chain(Vector pi0, Matrix step0, Matrix p) {
  return canonicalize(one_sided(std::move(pi0), std::move(step0), {}, std::move(p)));
}

/// i.i.d.-style chain: uniform start, every row equal to `row`.
inline CanonicalChain iid_chain(const Vector& row) {
  const std::size_t n = row.size();
  Matrix p(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) p(r, c) = row[c];
  return constant_chain(Vector(n, 1.0 / static_cast<double>(n)), p, p);
}

inline Matrix uniform_matrix(std::size_t n) {
  return Matrix(n, n, 1.0 / static_cast<double>(n));
}

/// Two-state chain with P_n = U + c n^-alpha [[1,-1],[1,-1]] around the
/// uniform matrix U, uniform start.
inline CanonicalChain perturbed_uniform(double c, double alpha) {
  MarkovMeasureSpec spec;
  spec.alphabet = letters(2);
  spec.pi0 = {0.5, 0.5};
  spec.step0 = uniform_matrix(2);
  spec.transitions.tail =
      PowerPerturbationTail{uniform_matrix(2), Matrix{{1, -1}, {1, -1}}, c, alpha, 0};
  validate(spec);
  return canonicalize(spec);
}

}  // namespace dichotomy::testing
