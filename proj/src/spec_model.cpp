#include "dichotomy/spec_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "json.hpp"

namespace dichotomy {

using nlohmann::json;

std::string_view to_string(Sidedness s) {
  return s == Sidedness::one_sided ? "one" : "two";
}

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw SchemaError("alphabet", "must contain at least one symbol");
  std::set<std::string> seen;
  for (const auto& s : symbols_)
    if (!seen.insert(s).second) throw SchemaError("alphabet", "duplicate symbol '" + s + "'");
}

std::optional<std::size_t> Alphabet::index_of(std::string_view name) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), name);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

Matrix PowerPerturbationTail::at(std::size_t n) const {
  const double scale =
      coefficient * std::pow(static_cast<double>(n + index_shift), -exponent);
  Matrix out = base;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += scale * direction(i, j);
  return out;
}

bool PowerPerturbationTail::degenerate() const {
  if (coefficient == 0.0) return true;
  return std::all_of(direction.data().begin(), direction.data().end(),
                     [](double d) { return d == 0.0; });
}

const Matrix& tail_limit(const TailRule& tail) {
  if (const auto* c = std::get_if<ConstantTail>(&tail)) return c->matrix;
  return std::get<PowerPerturbationTail>(tail).base;
}

std::size_t TransitionSequence::dimension() const { return tail_limit(tail).rows(); }

Matrix TransitionSequence::at(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("transition index starts at 1");
  if (n <= prefix.size()) return prefix[n - 1];
  if (const auto* c = std::get_if<ConstantTail>(&tail)) return c->matrix;
  return std::get<PowerPerturbationTail>(tail).at(n);
}

std::size_t MarkovMeasureSpec::state_count() const {
  return sidedness == Sidedness::one_sided ? alphabet.size() : alphabet.size() * alphabet.size();
}

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Renormalizes when the sum is off by more than rounding noise but within
// kRowSumTolerance, so a second pass leaves the values untouched.
void check_and_renormalize(std::span<double> row, const std::string& where) {
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!std::isfinite(row[j]))
      throw NumericError(where, "entry " + std::to_string(j) + " is not finite");
    if (row[j] < 0.0)
      throw NumericError(where, "entry " + std::to_string(j) + " is negative (" +
                                    fmt_double(row[j]) + ")");
  }
  const double sum = compensated_sum(row);
  const double err = std::abs(sum - 1.0);
  if (err > kRowSumTolerance)
    throw NumericError(where, "sums to " + fmt_double(sum) + ", expected 1");
  if (err > 4e-16)
    for (double& x : row) x /= sum;
}

}  // namespace

void validate_stochastic(Matrix& m, const std::string& where) {
  if (!m.square()) throw SchemaError(where, "matrix is not square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    check_and_renormalize(m.row(i), where + " row " + std::to_string(i));
}

void validate_probability_vector(Vector& v, const std::string& where) {
  check_and_renormalize(v, where);
}

void validate_tail(const TailRule& tail, std::size_t first_index, std::size_t dim,
                   const std::string& where) {
  if (const auto* c = std::get_if<ConstantTail>(&tail)) {
    if (c->matrix.rows() != dim) throw SchemaError(where + ".P", "wrong dimension");
    return;
  }
  const auto& p = std::get<PowerPerturbationTail>(tail);
  if (p.base.rows() != dim || !p.base.square())
    throw SchemaError(where + ".P", "wrong dimension");
  if (p.direction.rows() != dim || p.direction.cols() != dim)
    throw SchemaError(where + ".Delta", "wrong dimension");
  if (!std::isfinite(p.coefficient)) throw NumericError(where + ".c", "not finite");
  if (!(p.exponent > 0.0) || !std::isfinite(p.exponent))
    throw NumericError(where + ".alpha", "must be a finite real > 0");
  const double scale =
      std::abs(p.coefficient) * std::pow(static_cast<double>(first_index + p.index_shift), -p.exponent);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string row_where = where + ".Delta row " + std::to_string(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = p.direction(i, j);
      if (!std::isfinite(d)) throw NumericError(row_where, "entry not finite");
      sum += d;
      if (d == 0.0 || p.coefficient == 0.0) continue;
      if (p.base(i, j) <= 0.0)
        throw NumericError(row_where, "entry " + std::to_string(j) +
                                          " is nonzero where the base matrix is zero");
      if (!(scale * std::abs(d) < p.base(i, j)))
        throw NumericError(row_where, "entry " + std::to_string(j) +
                                          " drives the transition to zero or below at the first "
                                          "tail index " + std::to_string(first_index));
    }
    if (std::abs(sum) > kRowSumTolerance)
      throw NumericError(row_where, "sums to " + fmt_double(sum) + ", expected 0");
  }
}

void validate(MarkovMeasureSpec& spec) {
  const std::size_t s = spec.alphabet.size();
  if (s == 0) throw SchemaError("alphabet", "must contain at least one symbol");
  const std::size_t dim = spec.state_count();
  if (spec.pi0.size() != s)
    throw SchemaError("pi0", "expected " + std::to_string(s) + " entries");
  validate_probability_vector(spec.pi0, "pi0");
  if (spec.step0.rows() != s || spec.step0.cols() != dim)
    throw SchemaError("step0", "expected a " + std::to_string(s) + "x" + std::to_string(dim) +
                                   " matrix");
  for (std::size_t i = 0; i < s; ++i)
    check_and_renormalize(spec.step0.row(i), "step0 row " + std::to_string(i));
  auto& tr = spec.transitions;
  for (std::size_t k = 0; k < tr.prefix.size(); ++k) {
    const std::string where = "transitions.prefix[" + std::to_string(k) + "]";
    if (tr.prefix[k].rows() != dim || tr.prefix[k].cols() != dim)
      throw SchemaError(where, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                   " matrix");
    validate_stochastic(tr.prefix[k], where);
  }
  if (auto* c = std::get_if<ConstantTail>(&tr.tail)) {
    if (c->matrix.rows() != dim || c->matrix.cols() != dim)
      throw SchemaError("transitions.tail.P", "wrong dimension");
    validate_stochastic(c->matrix, "transitions.tail.P");
  } else {
    auto& p = std::get<PowerPerturbationTail>(tr.tail);
    if (p.base.rows() != dim || p.base.cols() != dim)
      throw SchemaError("transitions.tail.P", "wrong dimension");
    validate_stochastic(p.base, "transitions.tail.P");
  }
  validate_tail(tr.tail, tr.first_tail_index(), dim, "transitions.tail");
}

// ---------------------------------------------------------------------------
// JSON document format

namespace {

const json& require_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw SchemaError(where.empty() ? key : where + "." + key, "unknown field");
  }
}

double read_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where, "expected a number");
  return j.get<double>();
}

Vector read_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where, "expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(read_number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

Matrix read_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw SchemaError(where + "[0]", "expected an array of numbers");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array()) throw SchemaError(rw, "expected an array of numbers");
    if (row.size() != cols)
      throw SchemaError(rw, "row has " + std::to_string(row.size()) + " entries, expected " +
                                std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = read_number(row[c], where + " row " + std::to_string(r) + " col " + std::to_string(c));
  }
  return m;
}

json write_matrix(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

MarkovMeasureSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the offset one past the offending byte.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, col] = line_col(text, at);
    throw SchemaError("line " + std::to_string(line) + " col " + std::to_string(col),
                      "malformed JSON");
  }
  if (!doc.is_object()) throw SchemaError("", "document must be a JSON object");
  reject_unknown(doc, {"alphabet", "sided", "pi0", "step0", "transitions"}, "");

  MarkovMeasureSpec spec;
  const auto& alpha = require_field(doc, "alphabet", "");
  if (!alpha.is_array()) throw SchemaError("alphabet", "expected an array of strings");
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!alpha[i].is_string())
      throw SchemaError("alphabet[" + std::to_string(i) + "]", "expected a string");
    symbols.push_back(alpha[i].get<std::string>());
  }
  spec.alphabet = Alphabet(std::move(symbols));

  const auto& sided = require_field(doc, "sided", "");
  if (sided == "one") {
    spec.sidedness = Sidedness::one_sided;
  } else if (sided == "two") {
    spec.sidedness = Sidedness::two_sided;
  } else {
    throw SchemaError("sided", "expected \"one\" or \"two\"");
  }

  spec.pi0 = read_vector(require_field(doc, "pi0", ""), "pi0");
  spec.step0 = read_matrix(require_field(doc, "step0", ""), "step0");

  const auto& tr = require_field(doc, "transitions", "");
  if (!tr.is_object()) throw SchemaError("transitions", "expected an object");
  reject_unknown(tr, {"prefix", "tail"}, "transitions");
  if (auto it = tr.find("prefix"); it != tr.end()) {
    if (!it->is_array()) throw SchemaError("transitions.prefix", "expected an array of matrices");
    for (std::size_t k = 0; k < it->size(); ++k)
      spec.transitions.prefix.push_back(
          read_matrix((*it)[k], "transitions.prefix[" + std::to_string(k) + "]"));
  }
  const auto& tail = require_field(tr, "tail", "transitions");
  if (!tail.is_object()) throw SchemaError("transitions.tail", "expected an object");
  const auto& kind = require_field(tail, "kind", "transitions.tail");
  if (kind == "constant") {
    reject_unknown(tail, {"kind", "P"}, "transitions.tail");
    spec.transitions.tail =
        ConstantTail{read_matrix(require_field(tail, "P", "transitions.tail"), "transitions.tail.P")};
  } else if (kind == "power_perturbation") {
    reject_unknown(tail, {"kind", "P", "Delta", "c", "alpha", "shift"}, "transitions.tail");
    PowerPerturbationTail p;
    p.base = read_matrix(require_field(tail, "P", "transitions.tail"), "transitions.tail.P");
    p.direction =
        read_matrix(require_field(tail, "Delta", "transitions.tail"), "transitions.tail.Delta");
    p.coefficient = read_number(require_field(tail, "c", "transitions.tail"), "transitions.tail.c");
    p.exponent =
        read_number(require_field(tail, "alpha", "transitions.tail"), "transitions.tail.alpha");
    if (auto it = tail.find("shift"); it != tail.end()) {
      if (!it->is_number_unsigned())
        throw SchemaError("transitions.tail.shift", "expected a non-negative integer");
      p.index_shift = it->get<std::size_t>();
    }
    spec.transitions.tail = std::move(p);
  } else {
    throw SchemaError("transitions.tail.kind", "expected \"constant\" or \"power_perturbation\"");
  }

  validate(spec);
  return spec;
}

std::string serialize_spec(const MarkovMeasureSpec& spec) {
  json doc;
  doc["alphabet"] = spec.alphabet.symbols();
  doc["sided"] = std::string(to_string(spec.sidedness));
  doc["pi0"] = spec.pi0;
  doc["step0"] = write_matrix(spec.step0);
  json prefix = json::array();
  for (const auto& m : spec.transitions.prefix) prefix.push_back(write_matrix(m));
  json tail;
  if (const auto* c = std::get_if<ConstantTail>(&spec.transitions.tail)) {
    tail["kind"] = "constant";
    tail["P"] = write_matrix(c->matrix);
  } else {
    const auto& p = std::get<PowerPerturbationTail>(spec.transitions.tail);
    tail["kind"] = "power_perturbation";
    tail["P"] = write_matrix(p.base);
    tail["Delta"] = write_matrix(p.direction);
    tail["c"] = p.coefficient;
    tail["alpha"] = p.exponent;
    if (p.index_shift != 0) tail["shift"] = p.index_shift;
  }
  doc["transitions"] = {{"prefix", prefix}, {"tail", tail}};
  return doc.dump(2) + "\n";
}

CanonicalChain canonicalize(const MarkovMeasureSpec& spec) {
  CanonicalChain chain;
  chain.alphabet = spec.alphabet;
  chain.sidedness = spec.sidedness;
  const auto& sym = spec.alphabet.symbols();
  if (spec.sidedness == Sidedness::one_sided) {
    chain.state_space = sym;
  } else {
    for (const auto& a : sym)
      for (const auto& b : sym) chain.state_space.push_back("(" + a + "," + b + ")");
  }
  chain.pi0 = spec.pi0;
  chain.step0 = spec.step0;
  chain.lambda1 = left_multiply(spec.pi0, spec.step0);
  chain.transitions = spec.transitions;
  return chain;
}

Matrix transition_at(const CanonicalChain& chain, std::size_t n) {
  return chain.transitions.at(n);
}

BoolMatrix support_pattern(const CanonicalChain& chain, std::size_t n) {
  return positive_pattern(transition_at(chain, n));
}

void require_compatible(const CanonicalChain& a, const CanonicalChain& b) {
  if (a.sidedness != b.sidedness) throw IncompatibleError("sidedness mismatch");
  if (!(a.alphabet == b.alphabet)) throw IncompatibleError("alphabet mismatch");
  if (a.transitions.dimension() != b.transitions.dimension())
    throw IncompatibleError("transition dimension mismatch");
}

}  // namespace dichotomy
