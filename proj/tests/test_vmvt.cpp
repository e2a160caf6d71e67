#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdl/errors.hpp"
#include "mdl/vmvt.hpp"
#include "oracles.hpp"

using namespace mdl;

TEST_CASE("vmvt_count examples") {
  CHECK(vmvt_count(1, 1, 5).count == 5);
  CHECK(vmvt_count(2, 1, 2).count == 6);
  CHECK(vmvt_count(2, 2, 2).count == 6);
  CHECK(vmvt_count(4, 3, 1).count == 1);
  CHECK(vmvt_count(1, 7, 1).count == 1);
  CHECK_THROWS_AS(vmvt_count(0, 1, 3), PreconditionError);
  CHECK_THROWS_AS(vmvt_count(1, 0, 3), PreconditionError);
  CHECK_THROWS_AS(vmvt_count(1, 1, 0), PreconditionError);
}

TEST_CASE("vmvt_count matches naive tuple enumeration") {
  for (unsigned r = 1; r <= 3; ++r) {
    for (unsigned k = 1; k <= 3; ++k) {
      for (std::uint64_t P = 1; P <= 6; ++P) {
        const auto got = vmvt_count(r, k, P).count;
        REQUIRE(got == static_cast<unsigned long>(oracle::naive_vmvt(r, k, P)));
      }
    }
  }
}

TEST_CASE("trivial bounds and monotonicity in k") {
  for (unsigned r = 1; r <= 4; ++r) {
    for (std::uint64_t P = 2; P <= 9; ++P) {
      mpz_class previous;
      for (unsigned k = 1; k <= 5; ++k) {
        const auto n = vmvt_count(r, k, P).count;
        mpz_class lo, hi;
        mpz_ui_pow_ui(lo.get_mpz_t(), P, r);
        mpz_ui_pow_ui(hi.get_mpz_t(), P, 2 * r);
        REQUIRE(n >= lo);
        REQUIRE(n <= hi);
        if (k > 1) REQUIRE(n <= previous);
        previous = n;
      }
    }
  }
}

TEST_CASE("monotonicity_check holds on a grid") {
  for (unsigned r = 1; r <= 4; ++r) {
    for (unsigned k = 1; k <= 3; ++k) {
      for (std::uint64_t P : {1, 2, 5, 8}) {
        REQUIRE(monotonicity_check(r, k, P));
      }
    }
  }
}

TEST_CASE("wide power sums: k beyond r gives the permutation count") {
  // Once k >= r the power sums fix the multiset.
  for (std::uint64_t P : {6, 9}) {
    const auto base = vmvt_count(3, 3, P).count;
    CHECK(vmvt_count(3, 25, P).count == base);   // 128-bit keys
    CHECK(vmvt_count(3, 70, P).count == base);   // arbitrary-precision keys
  }
}

TEST_CASE("counts do not depend on thread count") {
  const auto one = vmvt_count(4, 2, 20, 1).count;
  for (unsigned threads : {2u, 3u, 8u}) REQUIRE(vmvt_count(4, 2, 20, threads).count == one);
}

TEST_CASE("enumeration guard") {
  CHECK_THROWS_AS(vmvt_count(9, 2, 10), ResourceGuardError);
  CHECK_NOTHROW(vmvt_count(1, 1, 100'000'000));
}

TEST_CASE("ford_bound_log") {
  // 40-digit references.
  CHECK(ford_bound_log(33282, 129, 10.0) == doctest::Approx(31431517.90696409375).epsilon(1e-14));
  CHECK(ford_bound_log(33282, 129, 1.0) == doctest::Approx(31297517.491520260652).epsilon(1e-14));
  const double expected_e = 3.0 * 130 * 130 * 130 * std::log(130.0) + 126701.9;
  CHECK(ford_bound_log(67600, 130, std::exp(1.0)) == doctest::Approx(expected_e).epsilon(1e-14));

  CHECK_THROWS_AS(ford_bound_log(33282, 128, 10.0), PreconditionError);
  CHECK_THROWS_AS(ford_bound_log(33281, 129, 10.0), PreconditionError);
  CHECK_THROWS_AS(ford_bound_log(4 * 129 * 129 + 1, 129, 10.0), PreconditionError);
  CHECK_THROWS_AS(ford_bound_log(33282, 129, 0.0), PreconditionError);
}
