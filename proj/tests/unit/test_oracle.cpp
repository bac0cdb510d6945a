#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dichotomy/criteria.hpp"
#include "dichotomy/errors.hpp"
#include "dichotomy/exact_engine.hpp"
#include "dichotomy/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_chains.hpp"

using namespace dichotomy;
using namespace dichotomy::testing;

namespace {

double total_mass(const PathTable& t) {
  double s = 0.0;
  for (const auto& e : t.entries) s += e.probability;
  return s;
}

}  // namespace

TEST_CASE("path tables") {
  const CanonicalChain chain = constant_chain({0.3, 0.7}, Matrix{{0.5, 0.5}, {0.2, 0.8}}, Matrix{{0.9, 0.1}, {0.2, 0.8}});
  const PathTable one = enumerate_paths(chain, 1);
  REQUIRE(one.entries.size() == 2);
  CHECK(one.entries[0].probability == doctest::Approx(0.29).epsilon(1e-15));
  CHECK(one.entries[1].probability == doctest::Approx(0.71).epsilon(1e-15));
  CHECK(std::abs(total_mass(enumerate_paths(chain, 12)) - 1.0) < 1e-12);

  // lambda1 = (0.29, 0.71) again by oracle marginal; (0.83, 0.17) at n = 3.
  const CanonicalChain start_a = constant_chain({1, 0}, Matrix::identity(2), Matrix{{0.9, 0.1}, {0.2, 0.8}});
  const Distribution m3 = oracle_marginal(start_a, 3);
  CHECK(std::abs(m3[0] - 0.83) < 1e-15);
  CHECK(std::abs(m3[1] - 0.17) < 1e-15);

  const Matrix perm{{0, 1}, {1, 0}};
  CHECK(enumerate_paths(constant_chain({1, 0}, Matrix::identity(2), perm), 9).entries.size() == 1);
}

TEST_CASE("size guard") {
  const CanonicalChain chain = iid_chain({0.5, 0.5});
  CHECK_THROWS_AS(enumerate_paths(chain, 24), GuardError);
  CHECK_NOTHROW(enumerate_paths(chain, 10));
}

TEST_CASE("oracle Hellinger") {
  const CanonicalChain half = iid_chain({0.5, 0.5});
  const CanonicalChain biased = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix{{0.6, 0.4}, {0.6, 0.4}});
  CHECK(std::abs(oracle_hellinger(half, biased, 6) - 0.974935895274551994793902966476) < 1e-12);
  CHECK(std::abs(oracle_hellinger(half, biased, 6) - hellinger_integral(half, biased, 6)) < 1e-12);
  CHECK(std::abs(oracle_hellinger(half, half, 8) - 1.0) < 1e-12);
  const CanonicalChain l = constant_chain({1, 0}, Matrix{{1, 0}, {1, 0}}, uniform_matrix(2));
  const CanonicalChain r = constant_chain({1, 0}, Matrix{{0, 1}, {0, 1}}, uniform_matrix(2));
  CHECK(oracle_hellinger(l, r, 5) == 0.0);
}

TEST_CASE("z distribution") {
  const CanonicalChain half = iid_chain({0.5, 0.5});
  const CanonicalChain pert = perturbed_uniform(0.2, 0.5);
  const auto same = oracle_z_distribution(pert, pert, 6);
  REQUIRE(same.size() == 1);
  CHECK(same[0].z == doctest::Approx(1.0).epsilon(1e-14));

  const auto atoms = oracle_z_distribution(pert, half, 8);
  double mean = 0.0, root = 0.0, mass_a = 0.0;
  for (const auto& a : atoms) {
    mean += a.z * a.prob_b;
    root += std::sqrt(a.z) * a.prob_b;
    mass_a += a.prob_a;
  }
  CHECK(std::abs(mean - 1.0) < 1e-12);
  CHECK(std::abs(mass_a - 1.0) < 1e-12);
  CHECK(std::abs(root - oracle_hellinger(pert, half, 8)) < 1e-12);

  const CanonicalChain stay = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix::identity(2));
  CHECK_THROWS_AS(oracle_z_distribution(half, stay, 3), NotLocAcError);
}

TEST_CASE("conditional oracles") {
  const Matrix p{{0.9, 0.1}, {0.3, 0.7}};
  const CanonicalChain chain = constant_chain({0.5, 0.5}, Matrix{{0.8, 0.2}, {0.4, 0.6}}, p);
  const CylinderEvent none;
  const Distribution m = oracle_conditional(chain, none, 4);
  const Distribution exact = marginal(chain, 4);
  for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(m[s] - exact[s]) < 1e-15);

  CylinderEvent e;
  e.constrain(1, 0);
  const Distribution c = oracle_conditional(chain, e, 3);
  const Distribution d = conditional_marginal(chain, e, 3);
  for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(c[s] - d[s]) < 1e-12);
  // Given X_1 = a, X_3 ~ row a of P^2.
  CHECK(std::abs(c[0] - (0.9 * 0.9 + 0.1 * 0.3)) < 1e-15);

  const CanonicalChain det = constant_chain({1, 0}, Matrix::identity(2), Matrix::identity(2));
  CylinderEvent null_event;
  null_event.constrain(2, 1);
  CHECK_THROWS_AS(oracle_conditional(det, null_event, 2), NullEventError);
}

TEST_CASE("random instances agree with the dynamic programs") {
  Rng rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    const Shape shape = random_shape(rng);
    const auto [a, b] = random_pair(rng, shape);
    const std::size_t n = shape.states() == 2 ? 9 : 6;
    for (std::size_t k = 1; k <= n; ++k) {
      const Distribution x = marginal(a, k), y = oracle_marginal(a, k);
      for (std::size_t s = 0; s < x.size(); ++s) CHECK(std::abs(x[s] - y[s]) < 1e-12);
    }
    const Matrix pd = pair_distribution(a, 2, n), po = oracle_pair_distribution(a, 2, n);
    for (std::size_t i = 0; i < pd.data().size(); ++i) CHECK(std::abs(pd.data()[i] - po.data()[i]) < 1e-12);
    CHECK(std::abs(hellinger_integral(a, b, n) - oracle_hellinger(a, b, n)) < 1e-12);
    CHECK(std::abs(z_mean(a, b, n) - oracle_z_mean(a, b, n)) < 1e-12);
    for (const auto& rec : oracle_local_hellinger(a, b, n))
      CHECK(std::abs(rec.value - local_hellinger(a, b, n - 1, rec.last_state)) < 1e-12);
  }
}

TEST_CASE("path CSV") {
  const CanonicalChain half = iid_chain({0.5, 0.5});
  std::ostringstream os;
  write_path_csv(os, half, half, 2);
  const std::string text = os.str();
  CHECK(text.rfind("path,p_A,p_B,z\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 5);
}
