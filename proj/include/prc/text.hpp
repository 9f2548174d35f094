#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace prc {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercased word tokens; splits on anything that is not alphanumeric,
// apostrophes are kept inside words ("don't" stays one token).
std::vector<std::string> tokenize(std::string_view s);

std::size_t count_words(std::string_view s);

// FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64_mix(std::uint64_t h, std::string_view s);

// Deterministic RNG helpers. std::shuffle and the std distributions are
// implementation-defined, so anything that must replay byte-identically
// goes through these.
using Rng = std::mt19937_64;

inline double rng_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t rng_index(Rng& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(rng() % n);
}

double rng_normal(Rng& rng);

template <typename T>
void rng_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng_index(rng, i)]);
  }
}

std::string format_fixed(double value, int decimals);

// Unigram + bigram counts hashed into [0, dim). The sparse map form keeps
// per-sample work proportional to the token count.
std::map<int, double> hashed_ngram_counts(const std::vector<std::string>& tokens, int dim);

}  // namespace prc
