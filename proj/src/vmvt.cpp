#include "mdl/vmvt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "mdl/errors.hpp"
#include "mdl/parallel.hpp"

namespace mdl {

namespace {

using u128 = unsigned __int128;

// Flattened power-sum vectors (k entries each) with ordering counts.
template <typename Int>
struct Groups {
  std::vector<Int> keys;
  std::vector<std::uint64_t> weights;
};

template <typename Int>
Int from_u64(std::uint64_t v) {
  if constexpr (std::is_same_v<Int, mpz_class>) {
    return mpz_class(static_cast<unsigned long>(v));
  } else {
    return static_cast<Int>(v);
  }
}

template <typename Int>
class MultisetWalker {
 public:
  MultisetWalker(unsigned r, unsigned k, std::uint64_t P, Groups<Int>& out)
      : r_(r), k_(k), P_(P), out_(out), sums_((r + 1) * k, from_u64<Int>(0)) {}

  // All nondecreasing r-tuples whose smallest entry is `first`.
  void run(std::uint64_t first) { extend(0, first, 0, 1); }

 private:
  // `depth` entries are placed; the next entry must be >= `low`. `run` is the
  // length of the trailing run of equal entries, `orderings` the multinomial
  // count of distinct permutations of the placed prefix.
  void extend(unsigned depth, std::uint64_t low, unsigned run, std::uint64_t orderings) {
    if (depth == r_) {
      const auto row = sums_.begin() + static_cast<std::ptrdiff_t>(depth * k_);
      out_.keys.insert(out_.keys.end(), row, row + k_);
      out_.weights.push_back(orderings);
      return;
    }
    const std::uint64_t high = depth == 0 ? low : P_;
    for (std::uint64_t v = low; v <= high; ++v) {
      Int p = from_u64<Int>(1);
      const Int base = from_u64<Int>(v);
      for (unsigned j = 0; j < k_; ++j) {
        p *= base;
        sums_[(depth + 1) * k_ + j] = sums_[depth * k_ + j] + p;
      }
      // v == low repeats the previous entry (low is the previous value).
      const unsigned next_run = (depth > 0 && v == low) ? run + 1 : 1;
      extend(depth + 1, v, next_run, orderings * (depth + 1) / next_run);
    }
  }

  unsigned r_, k_;
  std::uint64_t P_;
  Groups<Int>& out_;
  std::vector<Int> sums_;  // row d holds the power sums of the first d entries
};

template <typename Int>
mpz_class count_by_groups(unsigned r, unsigned k, std::uint64_t P, unsigned threads) {
  std::vector<Groups<Int>> parts(P);
  parallel_for_blocks(P, threads, [&](std::size_t i) {
    MultisetWalker<Int> walker(r, k, P, parts[i]);
    walker.run(static_cast<std::uint64_t>(i) + 1);
  });

  Groups<Int> all;
  for (auto& part : parts) {
    all.keys.insert(all.keys.end(), std::make_move_iterator(part.keys.begin()),
                    std::make_move_iterator(part.keys.end()));
    all.weights.insert(all.weights.end(), part.weights.begin(), part.weights.end());
    part = Groups<Int>{};
  }

  const std::size_t n = all.weights.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto key_less = [&](std::uint32_t a, std::uint32_t b) {
    for (unsigned j = 0; j < k; ++j) {
      const Int& x = all.keys[std::size_t{a} * k + j];
      const Int& y = all.keys[std::size_t{b} * k + j];
      if (x < y) return true;
      if (y < x) return false;
    }
    return false;
  };
  auto key_equal = [&](std::uint32_t a, std::uint32_t b) { return !key_less(a, b) && !key_less(b, a); };
  std::sort(order.begin(), order.end(), key_less);

  u128 total = 0;
  for (std::size_t i = 0; i < n;) {
    u128 group = 0;
    std::size_t j = i;
    for (; j < n && key_equal(order[i], order[j]); ++j) group += all.weights[order[j]];
    total += group * group;
    i = j;
  }
  mpz_class result = static_cast<unsigned long>(total >> 64);
  result <<= 64;
  result += static_cast<unsigned long>(static_cast<std::uint64_t>(total));
  return result;
}

}  // namespace

VmvtInstance vmvt_count(unsigned r, unsigned k, std::uint64_t P, unsigned threads) {
  if (r < 1 || k < 1 || P < 1) throw PreconditionError("vmvt_count: r, k and P must all be >= 1");
  if (P == 1) return VmvtInstance{r, k, P, 1};
  // n_1^1 = m_1^1 already forces n_1 = m_1.
  if (r == 1) return VmvtInstance{r, k, P, mpz_class(static_cast<unsigned long>(P))};

  mpz_class tuples;
  mpz_ui_pow_ui(tuples.get_mpz_t(), P, r);
  if (tuples > kVmvtEnumerationGuard) {
    throw ResourceGuardError("vmvt_count: P^r=" + tuples.get_str() + " exceeds the enumeration guard " +
                             std::to_string(kVmvtEnumerationGuard));
  }

  // Largest power sum is r * P^k.
  mpz_class largest;
  mpz_ui_pow_ui(largest.get_mpz_t(), P, k);
  largest *= r;
  mpz_class count;
  if (mpz_sizeinbase(largest.get_mpz_t(), 2) <= 63) {
    count = count_by_groups<std::uint64_t>(r, k, P, threads);
  } else if (mpz_sizeinbase(largest.get_mpz_t(), 2) <= 127) {
    count = count_by_groups<u128>(r, k, P, threads);
  } else {
    count = count_by_groups<mpz_class>(r, k, P, threads);
  }
  return VmvtInstance{r, k, P, count};
}

bool monotonicity_check(unsigned r, unsigned k, std::uint64_t P, unsigned threads) {
  const VmvtInstance lower = vmvt_count(r, k, P, threads);
  const VmvtInstance upper = vmvt_count(r + 1, k, P, threads);
  const mpz_class p = static_cast<unsigned long>(P);
  return upper.count <= p * p * lower.count;
}

double ford_bound_log(unsigned r, unsigned k, double P) {
  if (k < 129) throw PreconditionError("ford_bound_log: requires k >= 129, got k=" + std::to_string(k));
  const double kk = static_cast<double>(k);
  if (static_cast<double>(r) < 2.0 * kk * kk || static_cast<double>(r) > 4.0 * kk * kk) {
    throw PreconditionError("ford_bound_log: requires 2k^2 <= r <= 4k^2, got r=" + std::to_string(r));
  }
  if (!(P > 0.0)) throw PreconditionError("ford_bound_log: requires P > 0");
  const double exponent = 2.0 * static_cast<double>(r) - kk * (kk + 1.0) / 2.0 + kk * kk / 1000.0;
  return 3.0 * kk * kk * kk * std::log(kk) + exponent * std::log(P);
}

}  // namespace mdl
