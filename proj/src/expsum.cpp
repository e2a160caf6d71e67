#include "mdl/expsum.hpp"

#include <cmath>
#include <string>

#include "mdl/errors.hpp"
#include "mdl/order.hpp"
#include "mdl/parallel.hpp"
#include "mdl/primes.hpp"

namespace mdl {

namespace {

std::size_t block_count(std::size_t n) { return (n + kSumBlock - 1) / kSumBlock; }

void require_coprime(const PrimePowerModulus& m, const mpz_class& a, const char* op) {
  if (mpz_divisible_ui_p(a.get_mpz_t(), m.q())) {
    throw PreconditionError(std::string(op) + ": a must be coprime to q=" + std::to_string(m.q()));
  }
}

ExpSumResult finish(const PrimePowerModulus& m, std::uint64_t X, const PhaseSum& sum, std::size_t terms) {
  ExpSumResult r{sum.real, sum.imag, terms, sum.weight_total, m, 0.0};
  r.rho = X >= 2 ? rho_of(X, m) : 0.0;
  return r;
}

}  // namespace

PhaseSum phase_sum(std::span<const mpz_class> residues, const mpz_class& coefficient,
                   const mpz_class& modulus, std::span<const double> weights, unsigned threads) {
  if (!weights.empty() && weights.size() != residues.size()) {
    throw PreconditionError("phase_sum: weights and residues differ in length");
  }
  struct Partial {
    CompensatedSum re, im, w;
  };
  const std::size_t blocks = block_count(residues.size());
  std::vector<Partial> partials(blocks);
  parallel_for_blocks(blocks, threads, [&](std::size_t b) {
    Partial& part = partials[b];
    const std::size_t end = std::min(residues.size(), (b + 1) * kSumBlock);
    mpz_class phase;
    for (std::size_t i = b * kSumBlock; i < end; ++i) {
      mpz_mul(phase.get_mpz_t(), coefficient.get_mpz_t(), residues[i].get_mpz_t());
      mpz_mod(phase.get_mpz_t(), phase.get_mpz_t(), modulus.get_mpz_t());
      const std::complex<double> z = unit_circle_point(phase, modulus);
      const double w = weights.empty() ? 1.0 : weights[i];
      part.re.add(w * z.real());
      part.im.add(w * z.imag());
      part.w.add(w);
    }
  });
  CompensatedSum re, im, w;
  for (const Partial& part : partials) {
    re.add(part.re.value());
    im.add(part.im.value());
    w.add(part.w.value());
  }
  return PhaseSum{re.value(), im.value(), w.value()};
}

std::vector<mpz_class> mersenne_residues(const PrimePowerModulus& m, std::span<const std::uint64_t> primes,
                                         unsigned threads) {
  std::vector<mpz_class> out(primes.size());
  const mpz_class two = 2;
  parallel_for_blocks(block_count(primes.size()), threads, [&](std::size_t b) {
    const std::size_t end = std::min(primes.size(), (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) {
      mpz_class r = powmod(two, mpz_class(static_cast<unsigned long>(primes[i])), m.modulus()) - 1;
      if (r < 0) r += m.modulus();
      out[i] = std::move(r);
    }
  });
  return out;
}

ExpSumResult mangoldt_exp_sum(const PrimePowerModulus& m, const mpz_class& a, std::int64_t g,
                              std::uint64_t X, unsigned threads) {
  require_coprime(m, a, "mangoldt_exp_sum");
  validate_order_base(m.q(), g);
  const std::vector<MangoldtTerm> terms = mangoldt_terms(X);

  std::vector<mpz_class> residues(terms.size());
  std::vector<double> weights(terms.size());
  const mpz_class base = static_cast<signed long>(g);
  parallel_for_blocks(block_count(terms.size()), threads, [&](std::size_t b) {
    const std::size_t end = std::min(terms.size(), (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) {
      residues[i] = powmod(base, mpz_class(static_cast<unsigned long>(terms[i].n)), m.modulus());
      weights[i] = terms[i].weight;
    }
  });
  const PhaseSum sum = phase_sum(residues, m.reduce(a), m.modulus(), weights, threads);
  return finish(m, X, sum, terms.size());
}

ExpSumResult mersenne_prime_sum(const PrimePowerModulus& m, const mpz_class& a,
                                std::span<const std::uint64_t> primes, std::uint64_t X,
                                unsigned threads) {
  require_coprime(m, a, "mersenne_prime_sum");
  if (X < 2) throw PreconditionError("mersenne_prime_sum: X must be >= 2");
  const std::vector<mpz_class> residues = mersenne_residues(m, primes, threads);
  const PhaseSum sum = phase_sum(residues, m.reduce(a), m.modulus(), {}, threads);
  return finish(m, X, sum, primes.size());
}

ExpSumResult mersenne_prime_sum(const PrimePowerModulus& m, const mpz_class& a, std::uint64_t X,
                                unsigned threads) {
  if (X < 2) throw PreconditionError("mersenne_prime_sum: X must be >= 2");
  const std::vector<std::uint64_t> primes = primes_up_to(X);
  return mersenne_prime_sum(m, a, primes, X, threads);
}

double rho_of(std::uint64_t X, const PrimePowerModulus& m) {
  if (X < 2) throw PreconditionError("rho_of: X must be >= 2");
  return std::log(static_cast<double>(X)) /
         (static_cast<double>(m.gamma()) * std::log(static_cast<double>(m.q())));
}

double theorem_main_bound(std::uint64_t X, const PrimePowerModulus& m, double delta, double c) {
  if (X < 2) throw PreconditionError("theorem_main_bound: X must be >= 2");
  if (!(delta > 0.0) || !(c > 0.0)) throw PreconditionError("theorem_main_bound: delta and c must be > 0");
  const double log_x = std::log(static_cast<double>(X));
  const double rho = rho_of(X, m);
  const double short_range = std::exp((1.0 - delta * rho * rho) * log_x) * log_x;
  const double long_range =
      std::exp(log_x - delta * static_cast<double>(m.gamma()) * std::log(static_cast<double>(m.q())));
  return c * (short_range + long_range);
}

}  // namespace mdl
