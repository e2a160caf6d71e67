#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdl/arith.hpp"
#include "mdl/errors.hpp"
#include "mdl/order.hpp"
#include "oracles.hpp"

using namespace mdl;

TEST_CASE("order_structure examples") {
  const auto s32 = order_structure(3, 2);
  CHECK(s32.tau == 2);
  CHECK(s32.G == 1);
  CHECK(s32.witness_h1 == 1);

  const auto s113 = order_structure(11, 3);
  CHECK(s113.tau == 5);
  CHECK(s113.G == 2);
  CHECK(s113.witness_h1 == 2);  // 3^5 - 1 = 2 * 11^2

  const auto s57 = order_structure(5, 7);
  CHECK(s57.tau == 4);
  CHECK(s57.G == 2);
  CHECK(s57.witness_h1 == 96);  // 2400 = 96 * 25
}

TEST_CASE("order_structure rejects degenerate bases") {
  CHECK_THROWS_AS(order_structure(3, 1), PreconditionError);
  CHECK_THROWS_AS(order_structure(3, -1), PreconditionError);
  CHECK_THROWS_AS(order_structure(3, 0), PreconditionError);
  CHECK_THROWS_AS(order_structure(3, 6), PreconditionError);
  CHECK_THROWS_AS(order_structure(3, -9), PreconditionError);
  CHECK_THROWS_AS(order_structure(2, 3), PreconditionError);
  CHECK_THROWS_AS(order_structure(15, 2), PreconditionError);
}

TEST_CASE("tau_n and g_frak_n examples") {
  const auto s32 = order_structure(3, 2);
  const auto s113 = order_structure(11, 3);
  CHECK(tau_n(s32, 3) == 18);
  CHECK(tau_n(s113, 2) == 5);
  CHECK(tau_n(s113, 3) == 55);
  CHECK(oracle::brute_order(2, 27) == 18);
  CHECK(oracle::brute_order(3, 121) == 5);
  CHECK(oracle::brute_order(3, 1331) == 55);

  CHECK(g_frak_n(s113, 1) == 1);
  CHECK(g_frak_n(s113, 2) == 0);
  CHECK(g_frak_n(s32, 7) == 0);
  CHECK_THROWS_AS(tau_n(s32, 0), PreconditionError);
}

TEST_CASE("negative bases use the residue class") {
  const auto s = order_structure(5, -3);
  for (unsigned n = 1; n <= 5; ++n) {
    CHECK(tau_n(s, n) == static_cast<unsigned long>(oracle::brute_order(-3, oracle::ipow(5, n))));
    CHECK(certify_tau_n(s, n));
    CHECK_NOTHROW(lift_decomposition(s, n));
  }
}

TEST_CASE("tau_n matches brute force on a small box") {
  for (std::uint64_t q : {3, 5, 7, 11, 13}) {
    for (std::int64_t g = 2; g <= 12; ++g) {
      if (g % static_cast<std::int64_t>(q) == 0) continue;
      const auto s = order_structure(q, g);
      for (unsigned n = 1; n <= 4; ++n) {
        const auto expected = oracle::brute_order(g, oracle::ipow(q, n));
        REQUIRE(tau_n(s, n) == static_cast<unsigned long>(expected));
        REQUIRE(certify_tau_n(s, n));
      }
    }
  }
}

TEST_CASE("lift decomposition agrees with exact integers where they fit") {
  for (std::uint64_t q : {3, 5, 7}) {
    for (std::int64_t g : {-7, -2, 2, 4, 8, 10}) {
      if (g % static_cast<std::int64_t>(q) == 0) continue;
      const auto s = order_structure(q, g);
      for (unsigned n = 1; n <= 3; ++n) {
        const mpz_class h = lift_witness_exact(s, n);
        mpz_class unit;
        mpz_ui_pow_ui(unit.get_mpz_t(), q, n + g_frak_n(s, n));
        mpz_class power;
        mpz_pow_ui(power.get_mpz_t(), mpz_class(static_cast<long>(g)).get_mpz_t(), tau_n(s, n).get_ui());
        REQUIRE(power == 1 + h * unit);
        REQUIRE(nu_q(q, h) == 0);
        mpz_class h_mod;
        mpz_mod_ui(h_mod.get_mpz_t(), h.get_mpz_t(), q);
        REQUIRE(lift_decomposition(s, n).h_mod_q == h_mod);
      }
    }
  }
  CHECK_THROWS_AS(lift_witness_exact(order_structure(47, 12), 5, 1024), ResourceGuardError);
}

TEST_CASE("valuation_difference examples") {
  const auto s32 = order_structure(3, 2);
  auto v = valuation_difference(s32, 1, 3, 1);
  CHECK_FALSE(v.coprime);
  CHECK(v.direct == 1);

  v = valuation_difference(s32, 1, 4, 1);
  CHECK(v.coprime);  // 2^4 - 2 = 14

  // nu_11(3^55 - 1) = 3 by direct computation (3^55 - 1 = 11^3 * h with 11 not dividing h).
  mpz_class direct;
  mpz_ui_pow_ui(direct.get_mpz_t(), 3, 55);
  direct -= 1;
  REQUIRE(nu_q(11, direct) == 3);
  v = valuation_difference(order_structure(11, 3), 11, 5, 0);
  CHECK_FALSE(v.coprime);
  CHECK(v.direct == 3);
  CHECK(v.predicted == 3);

  CHECK_THROWS_AS(valuation_difference(s32, 1, 2, 2), PreconditionError);
}

TEST_CASE("valuation_difference matches exact integers on a small box") {
  for (std::uint64_t q : {3, 5, 7}) {
    for (std::int64_t g : {2, 3, 4, 6}) {
      if (g % static_cast<std::int64_t>(q) == 0) continue;
      const auto s = order_structure(q, g);
      for (std::uint64_t m = 1; m <= 6; ++m) {
        for (std::uint64_t x = 0; x <= 8; ++x) {
          for (std::uint64_t y = 0; y <= 8; ++y) {
            if (x == y) continue;
            mpz_class a, b;
            mpz_ui_pow_ui(a.get_mpz_t(), static_cast<unsigned long>(g), m * x);
            mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(g), m * y);
            const unsigned exact = nu_q(q, mpz_class(a - b));
            const auto v = valuation_difference(s, m, x, y);
            REQUIRE(v.direct == exact);
            REQUIRE(v.coprime == (exact == 0));
          }
        }
      }
    }
  }
}

TEST_CASE("congruence_criterion examples") {
  const auto s32 = order_structure(3, 2);
  auto c = congruence_criterion(s32, 2, 1, 4, 1);
  CHECK(c.powers_congruent);
  CHECK(c.index_divisible);

  c = congruence_criterion(s32, 2, 1, 2, 1);
  CHECK_FALSE(c.powers_congruent);
  CHECK_FALSE(c.index_divisible);

  c = congruence_criterion(order_structure(11, 3), 2, 2, 7, 7);
  CHECK(c.powers_congruent);
  CHECK(c.index_divisible);

  CHECK_THROWS_AS(congruence_criterion(s32, 1, 2, 0, 1), PreconditionError);
  CHECK_THROWS_AS(congruence_criterion(order_structure(11, 3), 3, 1, 0, 1), PreconditionError);
}

TEST_CASE("prime_factors") {
  CHECK(prime_factors(1).empty());
  CHECK(prime_factors(46) == std::vector<std::uint64_t>{2, 23});
  CHECK(prime_factors(360) == std::vector<std::uint64_t>{2, 3, 5});
}

TEST_CASE("Montgomery order oracle agrees with the plain one") {
  for (std::uint64_t q : {3, 5, 7, 13, 47}) {
    for (std::int64_t g = -7; g <= 12; ++g) {
      if (g % static_cast<std::int64_t>(q) == 0) continue;
      for (unsigned n = 1; n <= 3; ++n) {
        const auto m = oracle::ipow(q, n);
        REQUIRE(oracle::brute_order_odd(g, m) == oracle::brute_order(g, m));
      }
    }
  }
}
