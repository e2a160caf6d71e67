#pragma once

// Multiplicative order of g modulo powers of an odd prime q and the way it
// lifts from q to q^n.
//
// With tau = ord_q(g) and G = nu_q(g^tau - 1), for every n >= 1
//   ord_{q^n}(g) = tau                 if n <= G
//                = q^(n-G) * tau       if n >= G
// and g^(ord_{q^n} g) = 1 + h_n * q^(n + gfrak_n) with gcd(h_n, q) = 1 and
// gfrak_n = max(G - n, 0).

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace mdl {

struct OrderStructure {
  std::uint64_t q;
  std::int64_t g;
  std::uint64_t tau;      // order of g modulo q
  unsigned G;             // nu_q(g^tau - 1)
  mpz_class witness_h1;   // (g^tau - 1) / q^G, coprime to q
};

// Throws PreconditionError unless q is an odd prime, g is not in {-1, 0, 1}
// and q does not divide g.
void validate_order_base(std::uint64_t q, std::int64_t g);

// Distinct prime factors of n >= 1 by trial division, ascending.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

OrderStructure order_structure(std::uint64_t q, std::int64_t g);

mpz_class tau_n(const OrderStructure& s, unsigned n);
unsigned g_frak_n(const OrderStructure& s, unsigned n);

// True when tau_n(s, n) is the exact order of g modulo q^n: g^(tau_n) == 1
// and g^(tau_n / ell) != 1 for every prime ell dividing tau_n.
bool certify_tau_n(const OrderStructure& s, unsigned n);

struct LiftDecomposition {
  unsigned n;
  mpz_class tau_n;
  unsigned g_frak;
  mpz_class h_mod_q;  // h_n reduced mod q, nonzero
};

// Checks g^(tau_n) - 1 == h_n * q^(n + gfrak_n) with q not dividing h_n by
// reducing modulo q^(n + gfrak_n + 1). Throws ConsistencyError otherwise.
LiftDecomposition lift_decomposition(const OrderStructure& s, unsigned n);

// Exact integer h_n = (g^(tau_n) - 1) / q^(n + gfrak_n). Throws
// ResourceGuardError when g^(tau_n) would exceed `max_bits`.
mpz_class lift_witness_exact(const OrderStructure& s, unsigned n, std::uint64_t max_bits = 1u << 22);

struct ValuationDifference {
  bool coprime;        // q does not divide g^(mx) - g^(my)
  unsigned direct;     // nu_q(g^(mx) - g^(my)) computed from the residues
  unsigned predicted;  // nu_q(x - y) + nu_q(m) + G
};

// Direct valuation of g^(mx) - g^(my); when q divides it, also checks it
// against the lifting formula and throws ConsistencyError on mismatch.
ValuationDifference valuation_difference(const OrderStructure& s, std::uint64_t m, std::uint64_t x,
                                         std::uint64_t y);

struct CongruenceCriterion {
  bool powers_congruent;  // g^(n1*tau_level) == g^(n2*tau_level) mod q^modulus_exp
  bool index_divisible;   // q^(modulus_exp - level) | n1 - n2
};

// Requires modulus_exp >= level >= G.
CongruenceCriterion congruence_criterion(const OrderStructure& s, unsigned modulus_exp, unsigned level,
                                         std::uint64_t n1, std::uint64_t n2);

}  // namespace mdl
