#include "mdl/arith.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mdl/errors.hpp"

namespace mdl {

bool is_prime_small(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

PrimePowerModulus::PrimePowerModulus(std::uint64_t q, unsigned gamma) : q_(q), gamma_(gamma) {
  if (q < 3 || !is_prime_small(q)) {
    throw PreconditionError("modulus: q must be an odd prime, got q=" + std::to_string(q));
  }
  if (gamma < 1) {
    throw PreconditionError("modulus: gamma must be >= 1");
  }
  mpz_ui_pow_ui(modulus_.get_mpz_t(), q, gamma);
}

mpz_class PrimePowerModulus::reduce(const mpz_class& x) const {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), modulus_.get_mpz_t());
  return r;
}

Residue::Residue(const mpz_class& value, const PrimePowerModulus& modulus)
    : value_(modulus.reduce(value)), modulus_(&modulus) {}

unsigned nu_q(std::uint64_t q, const mpz_class& n) {
  if (n == 0) throw PreconditionError("nu_q: valuation of 0 is undefined");
  if (q < 2) throw PreconditionError("nu_q: q must be prime");
  mpz_class rest = abs(n);
  unsigned k = 0;
  while (mpz_divisible_ui_p(rest.get_mpz_t(), q)) {
    mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), q);
    ++k;
  }
  return k;
}

mpz_class powmod(const mpz_class& base, const mpz_class& exponent, const mpz_class& m) {
  if (exponent < 0) throw PreconditionError("modpow: exponent must be nonnegative");
  if (m < 1) throw PreconditionError("modpow: modulus must be positive");
  mpz_class b;
  mpz_mod(b.get_mpz_t(), base.get_mpz_t(), m.get_mpz_t());
  mpz_class r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), exponent.get_mpz_t(), m.get_mpz_t());
  return r;
}

Residue modpow(const mpz_class& base, const mpz_class& exponent, const PrimePowerModulus& m) {
  return Residue(powmod(base, exponent, m.modulus()), m);
}

double ratio_to_double(const mpz_class& num, const mpz_class& den) {
  if (den <= 0 || num < 0 || num >= den) {
    throw PreconditionError("ratio_to_double: expects 0 <= num < den");
  }
  if (num == 0) return 0.0;

  // Scale so that the integer quotient has exactly 64 significant bits, then
  // round the low 11 bits away with the remainder acting as a sticky bit.
  const long shift0 = 63 + static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)) -
                      static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  mpz_class scaled, quotient, remainder;
  long shift = shift0;
  for (;;) {
    mpz_mul_2exp(scaled.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    const auto bits = mpz_sizeinbase(quotient.get_mpz_t(), 2);
    if (bits == 64) break;
    shift += bits < 64 ? 1 : -1;
  }
  const std::uint64_t q64 = mpz_get_ui(quotient.get_mpz_t());
  std::uint64_t mantissa = q64 >> 11;
  const std::uint64_t tail = q64 & 0x7FF;
  constexpr std::uint64_t half = 0x400;
  const bool sticky = remainder != 0;
  if (tail > half || (tail == half && (sticky || (mantissa & 1)))) ++mantissa;
  return std::ldexp(static_cast<double>(mantissa), static_cast<int>(11 - shift));
}

std::complex<double> unit_circle_point(const mpz_class& value, const mpz_class& modulus) {
  if (value == 0) return {1.0, 0.0};
  double turn;
  if (2 * value <= modulus) {
    turn = ratio_to_double(value, modulus);
  } else {
    turn = -ratio_to_double(mpz_class(modulus - value), modulus);
  }
  const double angle = 2.0 * std::numbers::pi * turn;
  return {std::cos(angle), std::sin(angle)};
}

std::complex<double> unit_circle_point(const Residue& x) {
  return unit_circle_point(x.value(), x.modulus().modulus());
}

}  // namespace mdl
