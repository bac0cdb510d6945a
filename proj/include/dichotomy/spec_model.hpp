#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dichotomy/matrix.hpp"

namespace dichotomy {

/// Row sums and probability vectors must equal 1 within this bound.
inline constexpr double kRowSumTolerance = 1e-12;

enum class Sidedness { one_sided, two_sided };

std::string_view to_string(Sidedness s);

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& operator[](std::size_t i) const { return symbols_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> symbols_;
};

/// P_n = matrix for every n past the explicit prefix.
struct ConstantTail {
  Matrix matrix;
  friend bool operator==(const ConstantTail&, const ConstantTail&) = default;
};

/// P_n = base + coefficient * (n + index_shift)^(-exponent) * direction.
///
/// `direction` has zero row sums and is supported inside the support of
/// `base`, so the support pattern of P_n is the same at every tail index.
/// `index_shift` is zero for user documents; it is what re-indexing a chain
/// by the left shift produces.
struct PowerPerturbationTail {
  Matrix base;
  Matrix direction;
  double coefficient = 0.0;
  double exponent = 1.0;
  std::size_t index_shift = 0;

  Matrix at(std::size_t n) const;
  /// True when coefficient * direction is identically zero.
  bool degenerate() const;
  friend bool operator==(const PowerPerturbationTail&, const PowerPerturbationTail&) = default;
};

using TailRule = std::variant<ConstantTail, PowerPerturbationTail>;

/// Limit of P_n as n grows: the constant matrix or the perturbation base.
const Matrix& tail_limit(const TailRule& tail);

struct TransitionSequence {
  std::vector<Matrix> prefix;  // P_1 .. P_N
  TailRule tail;

  std::size_t explicit_length() const { return prefix.size(); }
  std::size_t first_tail_index() const { return prefix.size() + 1; }
  std::size_t dimension() const;
  /// P_n for n >= 1.
  Matrix at(std::size_t n) const;

  friend bool operator==(const TransitionSequence&, const TransitionSequence&) = default;
};

struct MarkovMeasureSpec {
  Alphabet alphabet;
  Sidedness sidedness = Sidedness::one_sided;
  Vector pi0;                      // law of X_0 over S
  Matrix step0;                    // kernel S -> working space
  TransitionSequence transitions;  // P_n, n >= 1, over the working space

  /// |working space|: |S| one-sided, |S|^2 two-sided.
  std::size_t state_count() const;

  friend bool operator==(const MarkovMeasureSpec&, const MarkovMeasureSpec&) = default;
};

/// One-sided chain over the working state space. Both sidedness cases
/// reduce to this: for two-sided measures state a*|S|+b is (X_{-n}, X_n).
struct CanonicalChain {
  Alphabet alphabet;
  Sidedness sidedness = Sidedness::one_sided;
  std::vector<std::string> state_space;
  Vector pi0;
  Matrix step0;
  Vector lambda1;  // law of the first working coordinate
  TransitionSequence transitions;

  std::size_t state_count() const { return state_space.size(); }
};

/// Checks every invariant of a spec, renormalizing rows that are off by at
/// most kRowSumTolerance. Throws SchemaError / NumericError.
void validate(MarkovMeasureSpec& spec);

/// Validates a single stochastic matrix in place (renormalizing within
/// tolerance). `where` prefixes error messages.
void validate_stochastic(Matrix& m, const std::string& where);
void validate_probability_vector(Vector& v, const std::string& where);
void validate_tail(const TailRule& tail, std::size_t first_index, std::size_t dim,
                   const std::string& where);

MarkovMeasureSpec parse_spec(std::string_view text);
std::string serialize_spec(const MarkovMeasureSpec& spec);

CanonicalChain canonicalize(const MarkovMeasureSpec& spec);

Matrix transition_at(const CanonicalChain& chain, std::size_t n);
BoolMatrix support_pattern(const CanonicalChain& chain, std::size_t n);

/// Throws IncompatibleError unless both chains share alphabet and sidedness.
void require_compatible(const CanonicalChain& a, const CanonicalChain& b);

}  // namespace dichotomy
