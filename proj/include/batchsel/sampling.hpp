#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace batchsel {

enum class Scheme { WithReplacement, WithoutReplacement };

std::string_view to_string(Scheme scheme);
/// Accepts "with"/"without" (and the long forms returned by to_string).
Scheme parse_scheme(std::string_view text);

/// Component indices drawn from [0, population), kept in canonical sorted
/// order: strictly increasing without replacement, nondecreasing with.
class Batch {
 public:
  Batch(Scheme scheme, std::vector<std::size_t> indices, std::size_t population);

  Scheme scheme() const { return scheme_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t population() const { return population_; }

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const Batch&, const Batch&) = default;

 private:
  Scheme scheme_;
  std::vector<std::size_t> indices_;
  std::size_t population_;
};

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Bounded integers and doubles are derived here rather than through
/// the <random> distributions, whose algorithms are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound), bound > 0. Unbiased via rejection.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

Batch sample_with_replacement(SeededRng& rng, std::size_t population,
                              std::size_t batch_size);

/// Uniform subset via Floyd's algorithm; O(batch_size) draws.
Batch sample_without_replacement(SeededRng& rng, std::size_t population,
                                 std::size_t batch_size);

Batch sample_batch(SeededRng& rng, Scheme scheme, std::size_t population,
                   std::size_t batch_size);

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(std::size_t n, std::size_t k);

/// C(N + N_S - 1, N_S) with replacement, C(N, N_S) without.
BigInt count_batches(std::size_t population, std::size_t batch_size,
                     Scheme scheme);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

class EnumerationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexicographic stream of every canonical batch of a given size: subsets
/// without replacement, multisets with replacement.
class BatchEnumerator {
 public:
  BatchEnumerator(std::size_t population, std::size_t batch_size, Scheme scheme,
                  std::uint64_t cap = kDefaultEnumerationCap);

  std::optional<Batch> next();

  std::uint64_t total() const { return total_; }

 private:
  bool advance();

  std::size_t population_;
  Scheme scheme_;
  std::vector<std::size_t> current_;
  std::uint64_t total_;
  bool started_ = false;
  bool done_ = false;
};

/// Visits every batch without materialising Batch objects.
template <typename Fn>
void for_each_batch(std::size_t population, std::size_t batch_size,
                    Scheme scheme, Fn&& fn,
                    std::uint64_t cap = kDefaultEnumerationCap) {
  BatchEnumerator it(population, batch_size, scheme, cap);
  while (auto batch = it.next()) fn(*batch);
}

}  // namespace batchsel
