#pragma once

// Exact arithmetic modulo prime powers q^gamma, q-adic valuations and the
// additive character x -> exp(2*pi*i*x/q^gamma).

#include <gmpxx.h>

#include <complex>
#include <cstdint>

namespace mdl {

// Deterministic primality by trial division; q is assumed to be small.
bool is_prime_small(std::uint64_t n);

class PrimePowerModulus {
 public:
  // Throws PreconditionError unless q is an odd prime and gamma >= 1.
  PrimePowerModulus(std::uint64_t q, unsigned gamma);

  std::uint64_t q() const { return q_; }
  unsigned gamma() const { return gamma_; }
  const mpz_class& modulus() const { return modulus_; }

  // Canonical representative in [0, q^gamma).
  mpz_class reduce(const mpz_class& x) const;

  friend bool operator==(const PrimePowerModulus& a, const PrimePowerModulus& b) {
    return a.q_ == b.q_ && a.gamma_ == b.gamma_;
  }

 private:
  std::uint64_t q_;
  unsigned gamma_;
  mpz_class modulus_;
};

// Element of Z / q^gamma Z. The owning modulus must outlive the residue.
class Residue {
 public:
  Residue(const mpz_class& value, const PrimePowerModulus& modulus);

  const mpz_class& value() const { return value_; }
  const PrimePowerModulus& modulus() const { return *modulus_; }

  friend bool operator==(const Residue& a, const Residue& b) {
    return a.value_ == b.value_ && *a.modulus_ == *b.modulus_;
  }

 private:
  mpz_class value_;
  const PrimePowerModulus* modulus_;
};

// Largest k with q^k | n. Throws PreconditionError for n == 0.
unsigned nu_q(std::uint64_t q, const mpz_class& n);
inline unsigned nu_q(std::uint64_t q, long long n) { return nu_q(q, mpz_class(static_cast<signed long>(n))); }

// base^exponent mod m for arbitrary moduli m >= 1; result in [0, m).
mpz_class powmod(const mpz_class& base, const mpz_class& exponent, const mpz_class& m);

Residue modpow(const mpz_class& base, const mpz_class& exponent, const PrimePowerModulus& m);

// Correctly rounded (round-to-nearest-even) binary64 value of num/den for
// 0 <= num < den.
double ratio_to_double(const mpz_class& num, const mpz_class& den);

// exp(2*pi*i*value/modulus) for a canonical value in [0, modulus).
//
// The phase is taken as value/modulus when 2*value <= modulus and as
// -(modulus - value)/modulus otherwise; either rational is rounded once to
// binary64 before the trigonometric evaluation. Negating a residue therefore
// conjugates the returned point bit for bit.
std::complex<double> unit_circle_point(const mpz_class& value, const mpz_class& modulus);
std::complex<double> unit_circle_point(const Residue& x);

}  // namespace mdl
