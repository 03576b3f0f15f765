// Seeded benchmark instances and the plain-text problem file format.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "asink/core.hpp"

namespace asink {

/// SplitMix64 used in counter mode: draw k of a stream with key K is
/// mix(K + (k + 1) * 0x9e3779b97f4a7c15). Streams are independent keys
/// derived from (seed, stream id), so every quantity of a generator can be
/// reproduced without replaying the others.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open0();
  /// Standard normal by Box-Muller (cosine branch, one draw per pair).
  double normal();

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class Family { random, geometric };

struct GeneratorSpec {
  Family family = Family::random;
  std::size_t m = 100;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  bool normalize_osc = true;
};

/// Gaussian costs, uniform weights normalized to sum one.
Problem gen_random(const GeneratorSpec& spec);

/// Squared distances between a three-blob cloud and an annulus, uniform weights.
Problem gen_geometric(const GeneratorSpec& spec);

Problem generate(const GeneratorSpec& spec);

/// `gen:FAMILY,M,N,SEED` with FAMILY in {random, geometric}; M, N, SEED
/// optional (defaults 100/300 per family and seed 0).
GeneratorSpec parse_generator(std::string_view text);

/// `gen:...` or a path to a problem file.
Problem load_problem_spec(std::string_view text);

/// Line 1 `m n`, line 2 p, line 3 q, then m lines of costs; 17 significant digits.
void save_problem(const Problem& prob, const std::filesystem::path& path);
std::string format_problem(const Problem& prob);

/// Throws std::runtime_error naming the offending line.
Problem load_problem(const std::filesystem::path& path);
Problem parse_problem(std::string_view text);

/// FNV-1a hash of the serialized problem, as 16 hex digits.
std::string fingerprint(const Problem& prob);

}  // namespace asink
