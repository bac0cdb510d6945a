#include <cmath>
#include <random>

#include "doctest.h"
#include "dichotomy/errors.hpp"
#include "dichotomy/exact_engine.hpp"
#include "support/fixtures.hpp"
#include "support/random_chains.hpp"

using namespace dichotomy;
using namespace dichotomy::testing;

namespace {

const Matrix kTwoState{{0.9, 0.1}, {0.2, 0.8}};
const Matrix kBanded{{.5, .5, 0}, {.5, 0, .5}, {0, .5, .5}};

// Values computed at 40 significant digits from the closed forms.
constexpr double kBernoulliH6 = 0.974935895274551994793902966476132118544;      // (sqrt .3 + sqrt .2)^5
constexpr double kLocalHellinger = 0.01012769398975189452239096690588523791826;  // rows (.5,.5) vs (.6,.4)

}  // namespace

TEST_CASE("marginal") {
  const CanonicalChain chain = constant_chain({1, 0}, Matrix::identity(2), kTwoState);
  CHECK(marginal(chain, 1) == chain.lambda1);
  const Distribution m3 = marginal(chain, 3);
  CHECK(m3[0] == doctest::Approx(0.83).epsilon(1e-14));
  CHECK(m3[1] == doctest::Approx(0.17).epsilon(1e-14));

  const CanonicalChain ds = constant_chain({1.0 / 3, 1.0 / 3, 1.0 / 3}, uniform_matrix(3),
                                           Matrix{{.2, .3, .5}, {.5, .2, .3}, {.3, .5, .2}});
  for (std::size_t n : {1, 2, 7, 50})
    for (double x : marginal(ds, n)) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("window products") {
  const CanonicalChain chain = constant_chain({1, 0}, Matrix::identity(2), kTwoState);
  CHECK(window_product(chain, 4, 4) == kTwoState);
  const Matrix perm{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  const CanonicalChain rot = constant_chain({1, 0, 0}, perm, perm);
  const Matrix w = window_product(rot, 2, 6);
  for (std::size_t r = 0; r < 3; ++r) {
    int ones = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK((w(r, c) == 0.0 || w(r, c) == 1.0));
      ones += w(r, c) == 1.0;
    }
    CHECK(ones == 1);
  }
  const CanonicalChain band = constant_chain({1, 0, 0}, kBanded, kBanded);
  const Matrix sq = window_product(band, 3, 4);
  CHECK(all_true(positive_pattern(sq)));
  CHECK(sq(0, 0) == doctest::Approx(0.5));
  CHECK(sq(0, 2) == doctest::Approx(0.25));
}

TEST_CASE("pair probabilities") {
  const Matrix p{{0.9, 0.1}, {0.3, 0.7}};
  const CanonicalChain chain = constant_chain({1, 0}, Matrix::identity(2), p);
  CHECK(pair_probability(chain, 1, 2, 0, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(pair_probability(chain, 1, 5, 1, 0) == 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t) total += pair_probability(chain, 3, 9, s, t);
  CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("Hellinger integral") {
  const CanonicalChain a = perturbed_uniform(0.2, 0.5);
  for (std::size_t n : {1, 5, 40}) CHECK(hellinger_integral(a, a, n) == doctest::Approx(1.0).epsilon(1e-14));

  const CanonicalChain left = constant_chain({1, 0}, uniform_matrix(2), uniform_matrix(2));
  const CanonicalChain right = constant_chain({0, 1}, Matrix{{1, 0}, {0, 1}}, uniform_matrix(2));
  CHECK(hellinger_integral(left, right, 1) == doctest::Approx(std::sqrt(0.5)));
  const CanonicalChain l2 = constant_chain({1, 0}, Matrix{{1, 0}, {1, 0}}, uniform_matrix(2));
  const CanonicalChain r2 = constant_chain({0, 1}, Matrix{{0, 1}, {0, 1}}, uniform_matrix(2));
  CHECK(hellinger_integral(l2, r2, 4) == 0.0);

  const CanonicalChain half = iid_chain({0.5, 0.5});
  const CanonicalChain biased = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix{{0.6, 0.4}, {0.6, 0.4}});
  CHECK(std::abs(hellinger_integral(half, biased, 6) - kBernoulliH6) < 1e-12);
}

TEST_CASE("Hellinger trajectory matches pointwise values and is nonincreasing") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [a, b] = random_pair(rng, random_shape(rng));
    const std::vector<double> h = hellinger_trajectory(a, b, 60);
    for (std::size_t n = 1; n <= 60; n += 7) CHECK(std::abs(h[n - 1] - hellinger_integral(a, b, n)) < 1e-13);
    for (std::size_t n = 1; n < h.size(); ++n) CHECK(h[n] <= h[n - 1] + 1e-12);
    for (double x : h) CHECK((x >= 0.0 && x <= 1.0 + 1e-12));
  }
}

TEST_CASE("local Hellinger distance") {
  const CanonicalChain half = iid_chain({0.5, 0.5});
  const CanonicalChain other = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix{{0.6, 0.4}, {0.5, 0.5}});
  CHECK(local_hellinger(half, half, 3, 0) == 0.0);
  CHECK(local_hellinger(half, other, 3, 1) == 0.0);
  CHECK(std::abs(local_hellinger(half, other, 3, 0) - kLocalHellinger) < 1e-15);
  const CanonicalChain stay = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix::identity(2));
  const CanonicalChain swap = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix{{0, 1}, {1, 0}});
  CHECK(local_hellinger(stay, swap, 1, 0) == 2.0);
}

TEST_CASE("z_mean") {
  const CanonicalChain a = perturbed_uniform(0.2, 0.5);
  CHECK(z_mean(a, a, 30) == 1.0);
  const CanonicalChain b = iid_chain({0.5, 0.5});
  CHECK(std::abs(z_mean(a, b, 30) - 1.0) < 1e-12);
  const CanonicalChain stay = constant_chain({0.5, 0.5}, uniform_matrix(2), Matrix::identity(2));
  CHECK_THROWS_AS(z_mean(b, stay, 3), NotLocAcError);
  CHECK(std::abs(z_mean(stay, b, 3) - 1.0) < 1e-12);
}

TEST_CASE("cylinder conditioning") {
  const Matrix p{{0.9, 0.1}, {0.3, 0.7}};
  const CanonicalChain chain = constant_chain({1, 0}, Matrix{{1, 0}, {0, 1}}, p);

  CylinderEvent pinned;
  pinned.constrain(2, 1);
  const Distribution at2 = conditional_marginal(chain, pinned, 2);
  CHECK(at2 == Distribution{0, 1});

  CylinderEvent impossible;
  impossible.constrain(1, 1);  // X_1 = X_0 = a almost surely
  CHECK_THROWS_AS(conditional_marginal(chain, impossible, 3), NullEventError);
  CHECK(event_probability(chain, impossible) == 0.0);

  const CylinderEvent none;
  const Distribution free = conditional_marginal(chain, none, 4);
  const Distribution plain = marginal(chain, 4);
  for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(free[s] - plain[s]) < 1e-15);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t)
      CHECK(std::abs(conditional_pair(chain, none, 2, 5, s, t) - pair_probability(chain, 2, 5, s, t)) < 1e-15);

  // Given X_3 = b, X_1 = a and X_3 = a is impossible.
  CylinderEvent e;
  e.constrain(3, 1);
  CHECK(conditional_pair(chain, e, 1, 3, 0, 0) == 0.0);
  const double pb = pair_probability(chain, 1, 3, 0, 1);
  CHECK(std::abs(conditional_pair(chain, e, 1, 3, 0, 1) - pb / marginal(chain, 3)[1]) < 1e-15);
}

TEST_CASE("two-sided events constrain coordinates") {
  MarkovMeasureSpec spec;
  spec.alphabet = letters(2);
  spec.sidedness = Sidedness::two_sided;
  spec.pi0 = {0.4, 0.6};
  spec.step0 = Matrix{{0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1}};
  spec.transitions.tail = ConstantTail{Matrix{{.1, .2, .3, .4}, {.25, .25, .25, .25}, {.4, .3, .2, .1}, {.7, .1, .1, .1}}};
  validate(spec);
  const CanonicalChain chain = canonicalize(spec);
  CylinderEvent left;
  left.constrain(-1, 1);  // first coordinate of X_1
  const Distribution m = conditional_marginal(chain, left, 1);
  CHECK(m[0] == 0.0);
  CHECK(m[1] == 0.0);
  CHECK(std::abs(m[2] + m[3] - 1.0) < 1e-15);
  CylinderEvent origin;
  origin.constrain(0, 0);
  const Distribution o = conditional_marginal(chain, origin, 1);
  for (std::size_t u = 0; u < 4; ++u) CHECK(std::abs(o[u] - spec.step0(0, u)) < 1e-15);
  CylinderEvent bad;
  bad.constrain(-1, 5);
  CHECK_THROWS_AS(bad.check_against(chain), SchemaError);
}
