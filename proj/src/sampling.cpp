#include "batchsel/sampling.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_set>

namespace batchsel {

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::WithReplacement ? "with_replacement" : "without_replacement";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "with" || text == "with_replacement") return Scheme::WithReplacement;
  if (text == "without" || text == "without_replacement") return Scheme::WithoutReplacement;
  throw std::invalid_argument("unknown sampling scheme '" + std::string(text) + "'");
}

Batch::Batch(Scheme scheme, std::vector<std::size_t> indices, std::size_t population)
    : scheme_(scheme), indices_(std::move(indices)), population_(population) {
  if (indices_.empty()) throw std::invalid_argument("batch must not be empty");
  std::sort(indices_.begin(), indices_.end());
  if (indices_.back() >= population_) {
    throw std::out_of_range("batch index " + std::to_string(indices_.back()) +
                            " outside population of " + std::to_string(population_));
  }
  if (scheme_ == Scheme::WithoutReplacement &&
      std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("repeated index in a without-replacement batch");
  }
}

std::uint64_t SeededRng::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

double SeededRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Batch sample_with_replacement(SeededRng& rng, std::size_t population,
                              std::size_t batch_size) {
  if (population == 0) throw std::invalid_argument("population must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_index(population));
  return Batch(Scheme::WithReplacement, std::move(idx), population);
}

Batch sample_without_replacement(SeededRng& rng, std::size_t population,
                                 std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (batch_size > population) {
    throw std::invalid_argument("batch size " + std::to_string(batch_size) +
                                " exceeds population " + std::to_string(population));
  }
  std::vector<std::size_t> idx;
  idx.reserve(batch_size);
  std::unordered_set<std::size_t> taken;
  taken.reserve(batch_size);
  for (std::size_t j = population - batch_size; j < population; ++j) {
    auto t = static_cast<std::size_t>(rng.uniform_index(j + 1));
    if (!taken.insert(t).second) {
      t = j;
      taken.insert(t);
    }
    idx.push_back(t);
  }
  return Batch(Scheme::WithoutReplacement, std::move(idx), population);
}

Batch sample_batch(SeededRng& rng, Scheme scheme, std::size_t population,
                   std::size_t batch_size) {
  return scheme == Scheme::WithReplacement
             ? sample_with_replacement(rng, population, batch_size)
             : sample_without_replacement(rng, population, batch_size);
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

BigInt count_batches(std::size_t population, std::size_t batch_size,
                     Scheme scheme) {
  if (population == 0) throw std::invalid_argument("population must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (scheme == Scheme::WithReplacement) {
    return binomial(population + batch_size - 1, batch_size);
  }
  if (batch_size > population) {
    throw std::invalid_argument("batch size exceeds population without replacement");
  }
  return binomial(population, batch_size);
}

BatchEnumerator::BatchEnumerator(std::size_t population, std::size_t batch_size,
                                 Scheme scheme, std::uint64_t cap)
    : population_(population), scheme_(scheme) {
  const BigInt count = count_batches(population, batch_size, scheme);
  if (count > cap) {
    throw EnumerationCapExceeded("enumerating " + count.str() + " batches exceeds the cap of " +
                                 std::to_string(cap));
  }
  total_ = count.convert_to<std::uint64_t>();
  current_.resize(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    current_[i] = scheme == Scheme::WithoutReplacement ? i : 0;
  }
}

// Lexicographic successor of current_; false once the last batch is passed.
bool BatchEnumerator::advance() {
  const std::size_t m = current_.size();
  const bool distinct = scheme_ == Scheme::WithoutReplacement;
  for (std::size_t pos = m; pos-- > 0;) {
    const std::size_t max_here = distinct ? population_ - m + pos : population_ - 1;
    if (current_[pos] < max_here) {
      ++current_[pos];
      for (std::size_t j = pos + 1; j < m; ++j) {
        current_[j] = distinct ? current_[j - 1] + 1 : current_[pos];
      }
      return true;
    }
  }
  return false;
}

std::optional<Batch> BatchEnumerator::next() {
  if (done_) return std::nullopt;
  if (started_ && !advance()) {
    done_ = true;
    return std::nullopt;
  }
  started_ = true;
  return Batch(scheme_, current_, population_);
}

}  // namespace batchsel
