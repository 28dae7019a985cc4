#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plcpcomp {

/// Seeded synthetic inputs. None of them contain the sentinel byte 0.
namespace corpus {

/// Uniform bytes over the first `alphabet` symbols starting at 'a'
/// (alphabet 1..255; past 'z' the symbols continue upward and wrap to 1).
std::vector<std::uint8_t> random_text(std::uint64_t seed, std::uint64_t n,
                                      unsigned alphabet);

/// Highly repetitive text: copies of earlier material with sparse point
/// mutations, in the spirit of versioned document collections.
std::vector<std::uint8_t> repetitive_text(std::uint64_t seed, std::uint64_t n,
                                          unsigned alphabet = 4,
                                          double mutation_rate = 0.001);

/// Fibonacci word over {a, b}, truncated to n.
std::vector<std::uint8_t> fibonacci_text(std::uint64_t n);

/// Mixture used by the fuzz tests: picks one of the generators above from
/// the seed, with a random length up to `max_n`.
std::vector<std::uint8_t> mixed_text(std::uint64_t seed, std::uint64_t max_n);

/// Generator names accepted by `by_name`: random, repetitive, fibonacci.
std::vector<std::uint8_t> by_name(const std::string& kind, std::uint64_t seed,
                                  std::uint64_t n, unsigned alphabet);

}  // namespace corpus
}  // namespace plcpcomp
