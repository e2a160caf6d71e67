#pragma once

// Base-q digit blocks of Mersenne numbers M_p = 2^p - 1 and how uniformly
// they are spread over the primes p <= X.
//
// Digit positions count from zero at the least significant end. A block of
// length s ending at position r covers positions r, r-1, ..., r-s+1 and is
// written most significant digit first.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

namespace mdl {

// Dense count tables are limited to this many block values.
inline constexpr std::uint64_t kMaxBlockValues = std::uint64_t{1} << 24;

class DigitString {
 public:
  // digits = (a_{s-1}, ..., a_0); throws PreconditionError if empty or a
  // digit is outside [0, q).
  DigitString(std::uint64_t q, std::vector<std::uint64_t> digits);

  // The length-s digit string whose value is `value` (0 <= value < q^s).
  static DigitString from_value(std::uint64_t q, unsigned s, const mpz_class& value);

  std::uint64_t q() const { return q_; }
  unsigned length() const { return static_cast<unsigned>(digits_.size()); }
  const std::vector<std::uint64_t>& digits() const { return digits_; }

  // sum_i a_i q^i
  mpz_class value() const;

 private:
  std::uint64_t q_;
  std::vector<std::uint64_t> digits_;
};

// Integer formed by digits r..r-s+1 of M_p in base q. Requires 1 <= s <= r+1.
mpz_class digit_block(std::uint64_t p, std::uint64_t q, unsigned r, unsigned s);

struct DigitCountReport {
  std::uint64_t q;
  unsigned r;
  unsigned s;
  std::uint64_t X;
  std::vector<std::uint64_t> counts;  // indexed by block value, size q^s
  std::uint64_t pi_X;
  double expected;                    // pi_X / q^s
  double max_abs_deviation;           // max over blocks |count/pi_X - q^-s|

  // count/pi_X - q^-s for one block value.
  double deviation(std::uint64_t block) const;
};

DigitCountReport count_blocks(std::uint64_t q, std::uint64_t X, unsigned r, unsigned s,
                              unsigned threads = 1);
// Same, over a caller-supplied list of all primes <= X.
DigitCountReport count_blocks(std::uint64_t q, std::span<const std::uint64_t> primes, std::uint64_t X,
                              unsigned r, unsigned s, unsigned threads = 1);

struct FractionalPartCheck {
  bool digits_match;  // digit_block(p, q, r, s) == value(sigma)
  bool in_interval;   // {M_p / q^(r+1)} in [value/q^s, (value+1)/q^s)
};

FractionalPartCheck fractional_part_check(std::uint64_t p, std::uint64_t q, unsigned r,
                                          const DigitString& sigma);

// Upper bound on the star discrepancy of {M_p / q^gamma : p <= X}:
//   1/(H+1) + 3 * sum_{h<=H} (1/h) |sum_p e(h M_p / q^gamma)| / pi(X)
// For q^v || h the inner sum is taken modulo q^(gamma-v) with h/q^v.
double erdos_turan_bound(std::uint64_t q, unsigned gamma, std::uint64_t X, std::uint64_t H,
                         unsigned threads = 1);
double erdos_turan_bound(std::uint64_t q, unsigned gamma, std::span<const std::uint64_t> primes,
                         std::uint64_t H, unsigned threads = 1);

struct Discrepancy {
  mpq_class exact;
  double value;
};

// Exact star discrepancy of the multiset {(M_p mod q^gamma) / q^gamma : p <= X}.
Discrepancy discrepancy(std::uint64_t q, unsigned gamma, std::uint64_t X, unsigned threads = 1);
Discrepancy discrepancy(std::uint64_t q, unsigned gamma, std::span<const std::uint64_t> primes,
                        unsigned threads = 1);

// Star discrepancy of points value_i / modulus, each value in [0, modulus).
Discrepancy star_discrepancy(std::vector<mpz_class> values, const mpz_class& modulus);

}  // namespace mdl
