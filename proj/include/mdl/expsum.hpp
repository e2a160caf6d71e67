#pragma once

// Weighted exponential sums modulo q^gamma:
//   sum_{n <= X} Lambda(n) e(a g^n / q^gamma)
//   sum_{p <= X} e(a (2^p - 1) / q^gamma)
// and the closed-form bound shape c (X^(1 - delta rho^2) log X + X q^(-delta gamma)).
//
// Summation is split into fixed blocks of kSumBlock terms. Each block is
// summed with compensation, and block partials are combined in block order,
// so results are bit-identical for any thread count.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdl/arith.hpp"

namespace mdl {

inline constexpr std::size_t kSumBlock = 4096;

struct ExpSumResult {
  double real = 0.0;
  double imag = 0.0;
  std::uint64_t term_count = 0;
  double normalizer = 0.0;  // sum of weights (Chebyshev psi(X) or pi(X))
  PrimePowerModulus modulus;
  double rho = 0.0;

  std::complex<double> value() const { return {real, imag}; }
  double magnitude() const { return std::hypot(real, imag); }
};

// sum_i weights[i] * e(coefficient * residues[i] / modulus); empty weights
// means unit weights. Residues need not be reduced.
struct PhaseSum {
  double real;
  double imag;
  double weight_total;
};
PhaseSum phase_sum(std::span<const mpz_class> residues, const mpz_class& coefficient,
                   const mpz_class& modulus, std::span<const double> weights, unsigned threads);

// M_p mod q^gamma for each p.
std::vector<mpz_class> mersenne_residues(const PrimePowerModulus& m, std::span<const std::uint64_t> primes,
                                         unsigned threads);

ExpSumResult mangoldt_exp_sum(const PrimePowerModulus& m, const mpz_class& a, std::int64_t g,
                              std::uint64_t X, unsigned threads = 1);

ExpSumResult mersenne_prime_sum(const PrimePowerModulus& m, const mpz_class& a, std::uint64_t X,
                                unsigned threads = 1);
// Same sum over a caller-supplied list of all primes <= X.
ExpSumResult mersenne_prime_sum(const PrimePowerModulus& m, const mpz_class& a,
                                std::span<const std::uint64_t> primes, std::uint64_t X,
                                unsigned threads = 1);

// log X / log q^gamma; requires X >= 2.
double rho_of(std::uint64_t X, const PrimePowerModulus& m);

// c * (X^(1 - delta*rho^2) * log X + X * q^(-delta*gamma)); delta, c > 0.
double theorem_main_bound(std::uint64_t X, const PrimePowerModulus& m, double delta, double c);

}  // namespace mdl
