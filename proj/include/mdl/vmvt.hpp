#pragma once

// Vinogradov mean value counts
//   N_{r,k}(P) = #{(n, m) in [1,P]^r x [1,P]^r :
//                  sum n_i^j = sum m_i^j for j = 1..k}
// by exact enumeration, and the log of Ford's explicit upper bound.

#include <gmpxx.h>

#include <cstdint>

namespace mdl {

// Largest admissible number of left tuples P^r.
inline constexpr std::uint64_t kVmvtEnumerationGuard = 100'000'000;

struct VmvtInstance {
  unsigned r;
  unsigned k;
  std::uint64_t P;
  mpz_class count;
};

// Groups the r-tuples by their vector of power sums and returns the sum of
// squared group sizes. Tuples are enumerated as multisets, each weighted by
// its number of orderings. Throws ResourceGuardError if P^r exceeds the
// guard.
VmvtInstance vmvt_count(unsigned r, unsigned k, std::uint64_t P, unsigned threads = 1);

// N_{r+1,k}(P) <= P^2 N_{r,k}(P), evaluated exactly.
bool monotonicity_check(unsigned r, unsigned k, std::uint64_t P, unsigned threads = 1);

// 3k^3 log k + (2r - k(k+1)/2 + k^2/1000) log P.
// Requires k >= 129 and 2k^2 <= r <= 4k^2.
double ford_bound_log(unsigned r, unsigned k, double P);

}  // namespace mdl
