#include "mdl/order.hpp"

#include <cmath>
#include <string>

#include "mdl/arith.hpp"
#include "mdl/errors.hpp"

namespace mdl {

namespace {

mpz_class q_pow(std::uint64_t q, unsigned e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), q, e);
  return r;
}

mpz_class as_mpz(std::int64_t v) { return mpz_class(static_cast<signed long>(v)); }
mpz_class as_mpz(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

// nu_q(g^e1 - g^e2) for e1 != e2, from residues modulo growing powers of q.
unsigned power_difference_valuation(std::uint64_t q, std::int64_t g, const mpz_class& e1,
                                    const mpz_class& e2) {
  const mpz_class base = as_mpz(g);
  for (unsigned precision = 8;; precision *= 2) {
    const mpz_class modulus = q_pow(q, precision);
    mpz_class diff = powmod(base, e1, modulus) - powmod(base, e2, modulus);
    if (diff != 0) return nu_q(q, diff);
  }
}

}  // namespace

void validate_order_base(std::uint64_t q, std::int64_t g) {
  if (q < 3 || !is_prime_small(q)) {
    throw PreconditionError("order_structure: q must be an odd prime, got q=" + std::to_string(q));
  }
  if (g >= -1 && g <= 1) {
    throw PreconditionError("order_structure: g must satisfy g != 0 and g != +-1, got g=" +
                            std::to_string(g));
  }
  const auto residue = static_cast<std::uint64_t>(g % static_cast<std::int64_t>(q) + static_cast<std::int64_t>(q)) % q;
  if (residue == 0) {
    throw PreconditionError("order_structure: g must be coprime to q, got g=" + std::to_string(g) +
                            " q=" + std::to_string(q));
  }
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d <= n / d; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

OrderStructure order_structure(std::uint64_t q, std::int64_t g) {
  validate_order_base(q, g);
  const mpz_class mod_q = as_mpz(q);
  const mpz_class base = as_mpz(g);

  std::uint64_t tau = q - 1;
  for (const std::uint64_t ell : prime_factors(q - 1)) {
    while (tau % ell == 0 && powmod(base, as_mpz(tau / ell), mod_q) == 1) tau /= ell;
  }

  mpz_class power;
  mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), tau);
  const mpz_class shifted = power - 1;
  const unsigned G = nu_q(q, shifted);
  mpz_class h1;
  mpz_divexact(h1.get_mpz_t(), shifted.get_mpz_t(), q_pow(q, G).get_mpz_t());
  return OrderStructure{q, g, tau, G, h1};
}

mpz_class tau_n(const OrderStructure& s, unsigned n) {
  if (n < 1) throw PreconditionError("tau_n: n must be >= 1");
  if (n <= s.G) return as_mpz(s.tau);
  return q_pow(s.q, n - s.G) * as_mpz(s.tau);
}

unsigned g_frak_n(const OrderStructure& s, unsigned n) {
  if (n < 1) throw PreconditionError("g_frak_n: n must be >= 1");
  return n <= s.G ? s.G - n : 0;
}

bool certify_tau_n(const OrderStructure& s, unsigned n) {
  const mpz_class order = tau_n(s, n);
  const mpz_class modulus = q_pow(s.q, n);
  const mpz_class base = as_mpz(s.g);
  if (powmod(base, order, modulus) != 1) return false;
  std::vector<std::uint64_t> factors = prime_factors(s.tau);
  if (n > s.G) factors.push_back(s.q);
  for (const std::uint64_t ell : factors) {
    if (powmod(base, order / as_mpz(ell), modulus) == 1) return false;
  }
  return true;
}

LiftDecomposition lift_decomposition(const OrderStructure& s, unsigned n) {
  const mpz_class order = tau_n(s, n);
  const unsigned gfrak = g_frak_n(s, n);
  const unsigned exact_power = n + gfrak;
  const mpz_class modulus = q_pow(s.q, exact_power + 1);
  mpz_class shifted = powmod(as_mpz(s.g), order, modulus) - 1;
  if (shifted < 0) shifted += modulus;
  const mpz_class unit = q_pow(s.q, exact_power);
  if (!mpz_divisible_p(shifted.get_mpz_t(), unit.get_mpz_t())) {
    throw ConsistencyError("lift_decomposition: q^(n+gfrak_n) does not divide g^tau_n - 1 at n=" +
                           std::to_string(n));
  }
  mpz_class h;
  mpz_divexact(h.get_mpz_t(), shifted.get_mpz_t(), unit.get_mpz_t());
  if (h == 0) {
    throw ConsistencyError("lift_decomposition: h_n divisible by q at n=" + std::to_string(n));
  }
  return LiftDecomposition{n, order, gfrak, h};
}

mpz_class lift_witness_exact(const OrderStructure& s, unsigned n, std::uint64_t max_bits) {
  const mpz_class order = tau_n(s, n);
  const double bits = order.get_d() * std::log2(std::abs(static_cast<double>(s.g)));
  if (!order.fits_ulong_p() || bits > static_cast<double>(max_bits)) {
    throw ResourceGuardError("lift_witness_exact: g^tau_n exceeds " + std::to_string(max_bits) + " bits");
  }
  mpz_class power;
  mpz_pow_ui(power.get_mpz_t(), as_mpz(s.g).get_mpz_t(), order.get_ui());
  mpz_class h;
  mpz_divexact(h.get_mpz_t(), mpz_class(power - 1).get_mpz_t(),
               q_pow(s.q, n + g_frak_n(s, n)).get_mpz_t());
  return h;
}

ValuationDifference valuation_difference(const OrderStructure& s, std::uint64_t m, std::uint64_t x,
                                         std::uint64_t y) {
  if (x == y) throw PreconditionError("valuation_difference: requires x != y");
  if (m < 1) throw PreconditionError("valuation_difference: requires m >= 1");
  const mpz_class mm = as_mpz(m);
  const unsigned direct = power_difference_valuation(s.q, s.g, mm * as_mpz(x), mm * as_mpz(y));
  const std::uint64_t gap = x > y ? x - y : y - x;
  const unsigned predicted = nu_q(s.q, as_mpz(gap)) + nu_q(s.q, mm) + s.G;
  const bool coprime = direct == 0;
  if (!coprime && direct != predicted) {
    throw ConsistencyError("valuation_difference: direct valuation " + std::to_string(direct) +
                           " != predicted " + std::to_string(predicted));
  }
  return ValuationDifference{coprime, direct, predicted};
}

CongruenceCriterion congruence_criterion(const OrderStructure& s, unsigned modulus_exp, unsigned level,
                                         std::uint64_t n1, std::uint64_t n2) {
  if (modulus_exp < level) throw PreconditionError("congruence_criterion: requires r >= s");
  if (level < s.G) throw PreconditionError("congruence_criterion: requires s >= G");
  if (level < 1) throw PreconditionError("congruence_criterion: requires s >= 1");
  const mpz_class modulus = q_pow(s.q, modulus_exp);
  const mpz_class order = tau_n(s, level);
  const mpz_class base = as_mpz(s.g);
  const bool lhs = powmod(base, order * as_mpz(n1), modulus) == powmod(base, order * as_mpz(n2), modulus);
  bool rhs = true;
  if (n1 != n2) {
    const std::uint64_t gap = n1 > n2 ? n1 - n2 : n2 - n1;
    rhs = nu_q(s.q, as_mpz(gap)) >= modulus_exp - level;
  }
  return CongruenceCriterion{lhs, rhs};
}

}  // namespace mdl
