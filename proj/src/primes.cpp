#include "mdl/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mdl/errors.hpp"

namespace mdl {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'D', 'L', 'P', 'R', 'I', 'M', 'E'};

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("prime cache: truncated file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void PrimeRange::validate() const {
  if (limit < 2) throw PreconditionError("primes: limit must be >= 2");
  if (segment_size < 64) throw PreconditionError("primes: segment_size must be >= 64");
}

PrimeSieve::PrimeSieve(const PrimeRange& range)
    : limit_(range.limit), segment_size_(range.segment_size) {
  range.validate();
  const std::uint64_t root = isqrt(limit_);
  std::vector<bool> small(root + 1, true);
  for (std::uint64_t i = 3; i <= root; i += 2) {
    if (!small[i]) continue;
    base_primes_.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= root; j += 2 * i) small[j] = false;
  }
  composite_.resize(segment_size_);
}

void PrimeSieve::fill_segment() {
  // Odd numbers low_, low_+2, ..., capped at limit_.
  const std::uint64_t span_end = low_ + 2 * (segment_size_ - 1);
  const std::uint64_t high = std::min(span_end, limit_ % 2 ? limit_ : limit_ - 1);
  filled_ = static_cast<std::size_t>((high - low_) / 2 + 1);
  std::fill(composite_.begin(), composite_.begin() + filled_, 0);
  for (const std::uint64_t p : base_primes_) {
    if (p * p > high) break;
    std::uint64_t start = std::max(p * p, (low_ + p - 1) / p * p);
    if (start % 2 == 0) start += p;
    for (std::uint64_t j = (start - low_) / 2; j < filled_; j += p) composite_[j] = 1;
  }
  cursor_ = 0;
}

std::optional<std::uint64_t> PrimeSieve::next() {
  if (!emitted_two_) {
    emitted_two_ = true;
    return std::uint64_t{2};
  }
  for (;;) {
    while (cursor_ < filled_) {
      const std::size_t i = cursor_++;
      if (!composite_[i]) return low_ + 2 * i;
    }
    if (filled_ > 0) low_ += 2 * filled_;
    if (low_ > limit_) return std::nullopt;
    fill_segment();
  }
}

std::vector<std::uint64_t> primes_up_to(const PrimeRange& range) {
  std::vector<std::uint64_t> out;
  if (range.limit >= 100) {
    const double x = static_cast<double>(range.limit);
    out.reserve(static_cast<std::size_t>(1.26 * x / std::log(x)));
  }
  for_each_prime(range, [&](std::uint64_t p) { out.push_back(p); });
  return out;
}

std::uint64_t pi_of(std::uint64_t x) {
  if (x < 2) return 0;
  std::uint64_t count = 0;
  for_each_prime(PrimeRange{x}, [&](std::uint64_t) { ++count; });
  return count;
}

MangoldtStream::MangoldtStream(const PrimeRange& range) : limit_(range.limit), sieve_(range) {
  lookahead_ = sieve_.next();
}

void MangoldtStream::schedule_next_power(const Pending& term) {
  if (term.n <= limit_ / term.p) powers_.push(Pending{term.n * term.p, term.p, term.weight});
}

std::optional<MangoldtTerm> MangoldtStream::next() {
  if (!powers_.empty() && (!lookahead_ || powers_.top().n < *lookahead_)) {
    const Pending top = powers_.top();
    powers_.pop();
    schedule_next_power(top);
    return MangoldtTerm{top.n, top.p, top.weight};
  }
  if (!lookahead_) return std::nullopt;
  const std::uint64_t p = *lookahead_;
  lookahead_ = sieve_.next();
  const Pending term{p, p, std::log(static_cast<double>(p))};
  schedule_next_power(term);
  return MangoldtTerm{term.n, term.p, term.weight};
}

std::vector<MangoldtTerm> mangoldt_terms(const PrimeRange& range) {
  std::vector<MangoldtTerm> out;
  MangoldtStream stream(range);
  while (auto t = stream.next()) out.push_back(*t);
  return out;
}

void write_prime_cache(const std::filesystem::path& path, std::uint64_t limit,
                       std::span<const std::uint64_t> primes) {
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("prime cache: cannot open " + tmp.string());
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kPrimeCacheVersion);
    put_le<std::uint64_t>(out, limit);
    put_le<std::uint64_t>(out, primes.size());
    for (const std::uint64_t p : primes) put_le<std::uint64_t>(out, p);
    if (!out) throw std::runtime_error("prime cache: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::vector<std::uint64_t>> read_prime_cache(const std::filesystem::path& path,
                                                           std::uint64_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("prime cache: bad magic in " + path.string());
  const auto version = get_le<std::uint32_t>(in);
  if (version != kPrimeCacheVersion) {
    throw std::runtime_error("prime cache: unsupported version " + std::to_string(version));
  }
  const auto stored_limit = get_le<std::uint64_t>(in);
  if (stored_limit != limit) {
    throw std::runtime_error("prime cache: limit mismatch (file " + std::to_string(stored_limit) +
                             ", requested " + std::to_string(limit) + ")");
  }
  const auto count = get_le<std::uint64_t>(in);
  std::vector<std::uint64_t> primes;
  primes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto p = get_le<std::uint64_t>(in);
    if ((!primes.empty() && p <= primes.back()) || p > limit) {
      throw std::runtime_error("prime cache: body is not strictly increasing within limit");
    }
    primes.push_back(p);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("prime cache: trailing bytes in " + path.string());
  }
  return primes;
}

std::filesystem::path prime_cache_path(const std::filesystem::path& dir, std::uint64_t limit) {
  return dir / ("primes_" + std::to_string(limit) + ".bin");
}

std::vector<std::uint64_t> load_primes(std::uint64_t limit,
                                       const std::optional<std::filesystem::path>& cache_dir) {
  if (limit < 2) return {};
  if (cache_dir) {
    const auto path = prime_cache_path(*cache_dir, limit);
    if (auto cached = read_prime_cache(path, limit)) return std::move(*cached);
    auto primes = primes_up_to(PrimeRange{limit});
    std::filesystem::create_directories(*cache_dir);
    write_prime_cache(path, limit, primes);
    return primes;
  }
  return primes_up_to(PrimeRange{limit});
}

}  // namespace mdl
