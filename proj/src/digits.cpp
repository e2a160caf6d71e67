#include "mdl/digits.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdl/arith.hpp"
#include "mdl/errors.hpp"
#include "mdl/expsum.hpp"
#include "mdl/parallel.hpp"
#include "mdl/primes.hpp"

namespace mdl {

namespace {

mpz_class q_pow(std::uint64_t q, unsigned e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), q, e);
  return r;
}

void validate_base(std::uint64_t q) {
  if (q < 3 || !is_prime_small(q)) {
    throw PreconditionError("digits: q must be an odd prime, got q=" + std::to_string(q));
  }
}

void validate_window(unsigned r, unsigned s) {
  if (s < 1) throw PreconditionError("digits: block length s must be >= 1");
  if (s > r + 1) {
    throw PreconditionError("digits: block length s=" + std::to_string(s) +
                            " exceeds r+1=" + std::to_string(r + 1));
  }
}

mpz_class mersenne_mod(std::uint64_t p, const mpz_class& modulus) {
  mpz_class r = powmod(2, mpz_class(static_cast<unsigned long>(p)), modulus) - 1;
  if (r < 0) r += modulus;
  return r;
}

std::uint64_t block_value_count(std::uint64_t q, unsigned s) {
  const mpz_class values = q_pow(q, s);
  if (values > kMaxBlockValues) {
    throw ResourceGuardError("count_blocks: q^s=" + values.get_str() + " block values exceed the limit of " +
                             std::to_string(kMaxBlockValues));
  }
  return values.get_ui();
}

double to_double(const mpq_class& x) {
  if (x >= 1) return x == 1 ? 1.0 : x.get_d();
  return ratio_to_double(x.get_num(), x.get_den());
}

}  // namespace

DigitString::DigitString(std::uint64_t q, std::vector<std::uint64_t> digits)
    : q_(q), digits_(std::move(digits)) {
  if (digits_.empty()) throw PreconditionError("DigitString: length must be >= 1");
  for (const std::uint64_t d : digits_) {
    if (d >= q_) {
      throw PreconditionError("DigitString: digit " + std::to_string(d) + " outside [0, " +
                              std::to_string(q_) + ")");
    }
  }
}

DigitString DigitString::from_value(std::uint64_t q, unsigned s, const mpz_class& value) {
  if (value < 0 || value >= q_pow(q, s)) throw PreconditionError("DigitString: value outside [0, q^s)");
  std::vector<std::uint64_t> digits(s);
  mpz_class rest = value;
  for (unsigned i = 0; i < s; ++i) {
    digits[s - 1 - i] = mpz_fdiv_q_ui(rest.get_mpz_t(), rest.get_mpz_t(), q);
  }
  return DigitString(q, std::move(digits));
}

mpz_class DigitString::value() const {
  mpz_class v = 0;
  for (const std::uint64_t d : digits_) v = v * static_cast<unsigned long>(q_) + static_cast<unsigned long>(d);
  return v;
}

mpz_class digit_block(std::uint64_t p, std::uint64_t q, unsigned r, unsigned s) {
  validate_base(q);
  validate_window(r, s);
  const mpz_class residue = mersenne_mod(p, q_pow(q, r + 1));
  mpz_class block;
  mpz_fdiv_q(block.get_mpz_t(), residue.get_mpz_t(), q_pow(q, r - s + 1).get_mpz_t());
  return block;
}

double DigitCountReport::deviation(std::uint64_t block) const {
  const double share = pi_X == 0 ? 0.0 : static_cast<double>(counts.at(block)) / static_cast<double>(pi_X);
  return share - 1.0 / static_cast<double>(counts.size());
}

DigitCountReport count_blocks(std::uint64_t q, std::span<const std::uint64_t> primes, std::uint64_t X,
                              unsigned r, unsigned s, unsigned threads) {
  validate_base(q);
  validate_window(r, s);
  if (X < 2) throw PreconditionError("count_blocks: X must be >= 2");
  const std::uint64_t n_values = block_value_count(q, s);
  const mpz_class window = q_pow(q, r + 1);
  const mpz_class shift = q_pow(q, r - s + 1);

  std::vector<std::uint64_t> blocks(primes.size());
  const std::size_t n_chunks = (primes.size() + kSumBlock - 1) / kSumBlock;
  parallel_for_blocks(n_chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(primes.size(), (c + 1) * kSumBlock);
    mpz_class block;
    for (std::size_t i = c * kSumBlock; i < end; ++i) {
      const mpz_class residue = mersenne_mod(primes[i], window);
      mpz_fdiv_q(block.get_mpz_t(), residue.get_mpz_t(), shift.get_mpz_t());
      blocks[i] = block.get_ui();
    }
  });

  DigitCountReport report{q, r, s, X, std::vector<std::uint64_t>(n_values, 0), primes.size(), 0.0, 0.0};
  for (const std::uint64_t b : blocks) ++report.counts[b];
  report.expected = static_cast<double>(report.pi_X) / static_cast<double>(n_values);
  for (std::uint64_t b = 0; b < n_values; ++b) {
    report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(report.deviation(b)));
  }
  return report;
}

DigitCountReport count_blocks(std::uint64_t q, std::uint64_t X, unsigned r, unsigned s, unsigned threads) {
  validate_base(q);
  validate_window(r, s);
  block_value_count(q, s);
  if (X < 2) throw PreconditionError("count_blocks: X must be >= 2");
  const std::vector<std::uint64_t> primes = primes_up_to(X);
  return count_blocks(q, primes, X, r, s, threads);
}

FractionalPartCheck fractional_part_check(std::uint64_t p, std::uint64_t q, unsigned r,
                                          const DigitString& sigma) {
  if (sigma.q() != q) throw PreconditionError("fractional_part_check: digit string base differs from q");
  const unsigned s = sigma.length();
  validate_base(q);
  validate_window(r, s);
  const mpz_class target = sigma.value();
  const bool digits_match = digit_block(p, q, r, s) == target;

  const mpz_class window = q_pow(q, r + 1);
  const mpz_class blocks = q_pow(q, s);
  mpq_class frac(mersenne_mod(p, window), window);
  frac.canonicalize();
  mpq_class lower(target, blocks);
  mpq_class upper(target + 1, blocks);
  lower.canonicalize();
  upper.canonicalize();
  const bool in_interval = lower <= frac && frac < upper;
  return FractionalPartCheck{digits_match, in_interval};
}

double erdos_turan_bound(std::uint64_t q, unsigned gamma, std::span<const std::uint64_t> primes,
                         std::uint64_t H, unsigned threads) {
  if (H < 1) throw PreconditionError("erdos_turan_bound: H must be >= 1");
  if (primes.empty()) throw PreconditionError("erdos_turan_bound: needs at least one prime (X >= 2)");
  const PrimePowerModulus m(q, gamma);
  const std::vector<mpz_class> residues = mersenne_residues(m, primes, threads);
  const double n_points = static_cast<double>(primes.size());

  CompensatedSum weighted;
  for (std::uint64_t h = 1; h <= H; ++h) {
    const unsigned v = nu_q(q, mpz_class(static_cast<unsigned long>(h)));
    double magnitude;
    if (v >= gamma) {
      magnitude = n_points;
    } else {
      const mpz_class reduced_modulus = q_pow(q, gamma - v);
      const mpz_class reduced_h = mpz_class(static_cast<unsigned long>(h)) / q_pow(q, v);
      const PhaseSum sum = phase_sum(residues, reduced_h, reduced_modulus, {}, threads);
      magnitude = std::hypot(sum.real, sum.imag);
    }
    weighted.add(magnitude / (static_cast<double>(h) * n_points));
  }
  return 1.0 / static_cast<double>(H + 1) + 3.0 * weighted.value();
}

double erdos_turan_bound(std::uint64_t q, unsigned gamma, std::uint64_t X, std::uint64_t H,
                         unsigned threads) {
  if (X < 2) throw PreconditionError("erdos_turan_bound: X must be >= 2");
  const std::vector<std::uint64_t> primes = primes_up_to(X);
  return erdos_turan_bound(q, gamma, primes, H, threads);
}

Discrepancy star_discrepancy(std::vector<mpz_class> values, const mpz_class& modulus) {
  if (values.empty()) throw PreconditionError("discrepancy: empty point set");
  std::sort(values.begin(), values.end());
  const mpz_class n = static_cast<unsigned long>(values.size());
  // D* = max_i max(i/N - x_i, x_i - (i-1)/N) with x_i = v_i / M, over the
  // common denominator N*M.
  mpz_class best = 0;
  mpz_class scaled, gap;
  for (std::size_t i = 0; i < values.size(); ++i) {
    scaled = values[i] * n;
    gap = mpz_class(static_cast<unsigned long>(i + 1)) * modulus - scaled;
    if (gap > best) best = gap;
    gap = scaled - mpz_class(static_cast<unsigned long>(i)) * modulus;
    if (gap > best) best = gap;
  }
  mpq_class exact(best, n * modulus);
  exact.canonicalize();
  return Discrepancy{exact, to_double(exact)};
}

Discrepancy discrepancy(std::uint64_t q, unsigned gamma, std::span<const std::uint64_t> primes,
                        unsigned threads) {
  const PrimePowerModulus m(q, gamma);
  return star_discrepancy(mersenne_residues(m, primes, threads), m.modulus());
}

Discrepancy discrepancy(std::uint64_t q, unsigned gamma, std::uint64_t X, unsigned threads) {
  if (X < 2) throw PreconditionError("discrepancy: X must be >= 2");
  const std::vector<std::uint64_t> primes = primes_up_to(X);
  return discrepancy(q, gamma, primes, threads);
}

}  // namespace mdl
