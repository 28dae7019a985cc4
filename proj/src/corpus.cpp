#include "plcpcomp/corpus.hpp"

#include <algorithm>
#include <random>

#include "plcpcomp/errors.hpp"

namespace plcpcomp::corpus {

namespace {

std::uint8_t symbol(unsigned k) {
  return static_cast<std::uint8_t>((('a' - 1 + k) % 255) + 1);
}

void check_alphabet(unsigned alphabet) {
  if (alphabet < 1 || alphabet > 255) throw ConfigError("alphabet size must be in 1..255");
}

}  // namespace

std::vector<std::uint8_t> random_text(std::uint64_t seed, std::uint64_t n,
                                      unsigned alphabet) {
  check_alphabet(alphabet);
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(n);
  for (auto& c : out) c = symbol(static_cast<unsigned>(rng() % alphabet));
  return out;
}

std::vector<std::uint8_t> repetitive_text(std::uint64_t seed, std::uint64_t n,
                                          unsigned alphabet, double mutation_rate) {
  check_alphabet(alphabet);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::uint8_t> out;
  out.reserve(n);
  const std::uint64_t seed_len = std::min<std::uint64_t>(n, 64 + rng() % 1024);
  for (std::uint64_t i = 0; i < seed_len; ++i) {
    out.push_back(symbol(static_cast<unsigned>(rng() % alphabet)));
  }
  while (out.size() < n) {
    const std::uint64_t have = out.size();
    const std::uint64_t len = std::min<std::uint64_t>(n - have, 1 + rng() % std::max<std::uint64_t>(have, 1));
    const std::uint64_t from = rng() % (have - std::min(have, len) + 1);
    for (std::uint64_t k = 0; k < len; ++k) {
      std::uint8_t c = out[from + (k % (have - from))];
      if (coin(rng) < mutation_rate) c = symbol(static_cast<unsigned>(rng() % alphabet));
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::uint8_t> fibonacci_text(std::uint64_t n) {
  std::vector<std::uint8_t> a{'a'};
  std::vector<std::uint8_t> ab{'a', 'b'};
  while (ab.size() < n) {
    std::vector<std::uint8_t> next = ab;
    next.insert(next.end(), a.begin(), a.end());
    a = std::move(ab);
    ab = std::move(next);
  }
  ab.resize(n);
  return ab;
}

std::vector<std::uint8_t> mixed_text(std::uint64_t seed, std::uint64_t max_n) {
  std::mt19937_64 rng(seed);
  const std::uint64_t n = 1 + rng() % std::max<std::uint64_t>(max_n, 1);
  static constexpr unsigned kAlphabets[] = {1, 2, 3, 4, 8, 26, 255};
  const unsigned alphabet = kAlphabets[rng() % std::size(kAlphabets)];
  switch (rng() % 4) {
    case 0:
      return random_text(rng(), n, alphabet);
    case 1:
      return fibonacci_text(n);
    case 2:
      return repetitive_text(rng(), n, alphabet, 0.01);
    default:
      return repetitive_text(rng(), n, alphabet, 0.0005);
  }
}

std::vector<std::uint8_t> by_name(const std::string& kind, std::uint64_t seed,
                                  std::uint64_t n, unsigned alphabet) {
  if (kind == "random") return random_text(seed, n, alphabet);
  if (kind == "repetitive") return repetitive_text(seed, n, alphabet);
  if (kind == "fibonacci") return fibonacci_text(n);
  throw ConfigError("unknown corpus kind '" + kind + "'");
}

}  // namespace plcpcomp::corpus
