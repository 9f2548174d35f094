#include "prc/text.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace prc {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  while (begin < s.size() && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  std::size_t end = s.size();
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    bool keep = is_word_char(c);
    if (!keep && c == '\'' && !current.empty() && i + 1 < s.size() &&
        is_word_char(static_cast<unsigned char>(s[i + 1]))) {
      keep = true;  // internal apostrophe
    }
    if (keep) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t count_words(std::string_view s) {
  std::size_t count = 0;
  bool in_word = false;
  for (char ch : s) {
    bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64_mix(0xcbf29ce484222325ULL, s);
}

std::uint64_t fnv1a64_mix(std::uint64_t h, std::string_view s) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double rng_normal(Rng& rng) {
  // Box-Muller; deterministic for a given generator state.
  double u1 = rng_uniform(rng);
  double u2 = rng_uniform(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::map<int, double> hashed_ngram_counts(const std::vector<std::string>& tokens, int dim) {
  std::map<int, double> counts;
  auto bucket = [dim](std::uint64_t h) { return static_cast<int>(h % static_cast<std::uint64_t>(dim)); };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    counts[bucket(fnv1a64(tokens[i]))] += 1.0;
    if (i + 1 < tokens.size()) {
      std::uint64_t h = fnv1a64_mix(fnv1a64(tokens[i]) ^ 0x9e3779b97f4a7c15ULL, tokens[i + 1]);
      counts[bucket(h)] += 1.0;
    }
  }
  return counts;
}

}  // namespace prc
