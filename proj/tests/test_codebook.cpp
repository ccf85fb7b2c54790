#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "awgnfb/codebook.hpp"

using namespace awgnfb;

TEST_CASE("orthogonal code is the scaled standard basis") {
  Codebook cb = build_orthogonal(2, 2, 1.0);
  CHECK(cb.codewords[0] == std::vector<double>{1.0, 0.0});
  CHECK(cb.codewords[1] == std::vector<double>{0.0, 1.0});
  CHECK(codebook_geometry_ok(cb));

  Codebook big = build_orthogonal(3, 4, 9.0);
  for (int i = 0; i < 3; ++i)
    CHECK(squared_norm(big.codewords[i]) == doctest::Approx(9.0));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      CHECK(inner(big.codewords[i], big.codewords[j]) == 0.0);

  CHECK_THROWS_AS(build_orthogonal(5, 4, 1.0), std::length_error);
  CHECK_THROWS_AS(build_orthogonal(2, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_orthogonal(2, 4, -1.0), std::invalid_argument);
}

TEST_CASE("simplex codes have the equidistant geometry") {
  SUBCASE("k = 2 gives opposite codewords") {
    double A2 = 3.7;
    Codebook cb = build_simplex(2, A2);
    CHECK(cb.dim() == 1);
    CHECK(cb.codewords[0][0] == doctest::Approx(std::sqrt(A2)));
    CHECK(cb.codewords[1][0] == doctest::Approx(-std::sqrt(A2)));
    CHECK(squared_distance(cb.codewords[0], cb.codewords[1]) ==
          doctest::Approx(4.0 * A2));
  }
  SUBCASE("k = 3 at unit energy") {
    Codebook cb = build_simplex(3, 1.0);
    CHECK(cb.dim() == 2);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        CHECK(inner(cb.codewords[i], cb.codewords[j]) ==
              doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(squared_distance(cb.codewords[i], cb.codewords[j]) ==
              doctest::Approx(3.0).epsilon(1e-12));
      }
    CHECK(codebook_geometry_ok(cb));
  }
  SUBCASE("k = 4 at energy 3") {
    Codebook cb = build_simplex(4, 3.0);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        CHECK(squared_distance(cb.codewords[i], cb.codewords[j]) ==
              doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("k outside {2,3,4} rejected") {
    CHECK_THROWS_AS(build_simplex(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_simplex(5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_simplex(3, 0.0), std::invalid_argument);
  }
  SUBCASE("distance spectrum 2Ek/(k-1) across random energies") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    for (int rep = 0; rep < 30; ++rep) {
      int k = 2 + static_cast<int>(gen() % 3);
      double e = u(gen);
      Codebook cb = build_simplex(k, e);
      CHECK(codebook_geometry_ok(cb));
      double want = simplex_distance(k, e);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          double d = squared_distance(cb.codewords[i], cb.codewords[j]);
          CHECK(std::fabs(d - want) <= 1e-9 * want);
        }
    }
  }
}

TEST_CASE("composite phase-II code") {
  SUBCASE("k = 2 uses only the first reserved slot") {
    std::vector<int> sel = {0, 1};
    PhaseTwoCode code = build_phase2(sel, 4, 8, 1.0);
    std::vector<double> x0 = code.codeword(0);
    std::vector<double> x1 = code.codeword(1);
    CHECK(x0.size() == 8);
    for (int t = 1; t < 8; ++t) {
      CHECK(x0[t] == 0.0);
      CHECK(x1[t] == 0.0);
    }
    CHECK(x0[0] == doctest::Approx(-x1[0]));
    for (int j = 0; j < 4; ++j)
      CHECK(squared_norm(code.codeword(j)) == doctest::Approx(1.0));
  }
  SUBCASE("unselected pair sits at the orthogonal distance") {
    std::vector<int> sel = {1, 4, 2};
    double A2 = 2.5;
    PhaseTwoCode code = build_phase2(sel, 5, 8, A2);
    CHECK(squared_distance(code.codeword(0), code.codeword(3)) ==
          doctest::Approx(2.0 * A2));
    CHECK(code.pair_distance(0, 3) == doctest::Approx(2.0 * A2));
  }
  SUBCASE("group and rest codewords are support-disjoint") {
    std::vector<int> sel = {2, 0, 3};
    PhaseTwoCode code = build_phase2(sel, 6, 10, 4.0);
    for (int g : sel)
      for (int j = 0; j < 6; ++j) {
        if (code.selected_position(j) >= 0) continue;
        CHECK(inner(code.codeword(g), code.codeword(j)) ==
              doctest::Approx(0.0));
      }
  }
  SUBCASE("capacity violations rejected") {
    std::vector<int> sel = {0, 1};
    CHECK_THROWS_AS(build_phase2(sel, 8, 8, 1.0), std::length_error);
    std::vector<int> bad = {0};
    CHECK_THROWS_AS(build_phase2(bad, 4, 8, 1.0), std::invalid_argument);
  }
  SUBCASE("pairwise distances follow group membership exhaustively") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.2, 20.0);
    for (int rep = 0; rep < 20; ++rep) {
      int n1 = 8 + static_cast<int>(gen() % 8);
      int M = 4 + static_cast<int>(gen() % (n1 - 4));
      int k = 2 + static_cast<int>(gen() % 3);
      double A2 = u(gen);
      // a scrambled selection of k distinct indices
      std::vector<int> pool(M);
      for (int i = 0; i < M; ++i) pool[i] = i;
      std::shuffle(pool.begin(), pool.end(), gen);
      std::vector<int> sel(pool.begin(), pool.begin() + k);
      PhaseTwoCode code = build_phase2(sel, M, n1, A2);
      double dk = simplex_distance(k, A2);
      for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
          bool both = code.selected_position(i) >= 0 &&
                      code.selected_position(j) >= 0;
          double want = both ? dk : 2.0 * A2;
          double got = squared_distance(code.codeword(i), code.codeword(j));
          CHECK(std::fabs(got - want) <= 1e-9 * want);
          CHECK(code.pair_distance(i, j) ==
                doctest::Approx(want).epsilon(1e-12));
        }
      // fast inner products agree with materialized codewords
      std::normal_distribution<double> g(0.0, 1.0);
      std::vector<double> probe(n1);
      for (double& v : probe) v = g(gen);
      for (int j = 0; j < M; ++j)
        CHECK(code.codeword_inner(j, probe) ==
              doctest::Approx(inner(code.codeword(j), probe))
                  .epsilon(1e-12));
    }
  }
}
