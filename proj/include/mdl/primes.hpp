#pragma once

// Segmented odd-only sieve of Eratosthenes, von Mangoldt terms and the
// on-disk prime cache.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace mdl {

inline constexpr std::size_t kDefaultSegmentSize = std::size_t{1} << 18;

struct PrimeRange {
  std::uint64_t limit;
  std::size_t segment_size = kDefaultSegmentSize;

  // Throws PreconditionError unless limit >= 2 and segment_size >= 64.
  void validate() const;
};

// Pull-style prime stream. Memory is O(sqrt(limit) + segment_size).
class PrimeSieve {
 public:
  explicit PrimeSieve(const PrimeRange& range);

  std::optional<std::uint64_t> next();

 private:
  void fill_segment();

  std::uint64_t limit_;
  std::size_t segment_size_;
  std::vector<std::uint32_t> base_primes_;  // odd primes up to sqrt(limit)
  std::vector<std::uint8_t> composite_;     // index i <-> low_ + 2*i
  std::uint64_t low_ = 3;
  std::size_t cursor_ = 0;
  std::size_t filled_ = 0;
  bool emitted_two_ = false;
};

template <typename Fn>
void for_each_prime(const PrimeRange& range, Fn&& fn) {
  PrimeSieve sieve(range);
  while (auto p = sieve.next()) fn(*p);
}

std::vector<std::uint64_t> primes_up_to(const PrimeRange& range);
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  if (limit < 2) return {};
  return primes_up_to(PrimeRange{limit});
}

// #{p prime : p <= x}; zero for x < 2.
std::uint64_t pi_of(std::uint64_t x);

struct MangoldtTerm {
  std::uint64_t n;  // p^k
  std::uint64_t p;
  double weight;    // log p
};

// Prime powers p^k <= limit in increasing order. Higher powers wait in a
// min-heap keyed by value until the prime stream passes them.
class MangoldtStream {
 public:
  explicit MangoldtStream(const PrimeRange& range);

  std::optional<MangoldtTerm> next();

 private:
  struct Pending {
    std::uint64_t n;
    std::uint64_t p;
    double weight;
    friend bool operator>(const Pending& a, const Pending& b) { return a.n > b.n; }
  };

  void schedule_next_power(const Pending& term);

  std::uint64_t limit_;
  PrimeSieve sieve_;
  std::optional<std::uint64_t> lookahead_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> powers_;
};

std::vector<MangoldtTerm> mangoldt_terms(const PrimeRange& range);
inline std::vector<MangoldtTerm> mangoldt_terms(std::uint64_t limit) {
  if (limit < 2) return {};
  return mangoldt_terms(PrimeRange{limit});
}

// Prime cache file:
//   "MDLPRIME" | version u32 | limit u64 | count u64 | count x u64 primes
// All integers little-endian; primes strictly increasing.
inline constexpr std::uint32_t kPrimeCacheVersion = 1;

void write_prime_cache(const std::filesystem::path& path, std::uint64_t limit,
                       std::span<const std::uint64_t> primes);

// Returns nullopt if the file does not exist. Throws std::runtime_error on a
// malformed file or a limit mismatch.
std::optional<std::vector<std::uint64_t>> read_prime_cache(const std::filesystem::path& path,
                                                           std::uint64_t limit);

std::filesystem::path prime_cache_path(const std::filesystem::path& dir, std::uint64_t limit);

// Primes <= limit, served from `cache_dir` when a cache for exactly this
// limit exists, otherwise sieved (and written back when cache_dir is set).
std::vector<std::uint64_t> load_primes(std::uint64_t limit,
                                       const std::optional<std::filesystem::path>& cache_dir);

}  // namespace mdl
