#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ckforge/linalg.hpp"
#include "ckforge/lyndon.hpp"
#include "ckforge/theta.hpp"

namespace ckforge {

enum class Strategy { Modular, Exact };

struct Provenance {
  std::uint64_t seed = 0;       // seed the caller asked for
  std::uint64_t point_seed = 0;  // seed of the accepted sample
  std::uint64_t x_hash = 0;
  Strategy strategy = Strategy::Modular;
  std::size_t rows = 0, cols = 0;
  std::size_t lyndon_vars = 0;
  std::vector<std::uint64_t> primes;
  std::vector<std::size_t> ranks;
  int attempts = 0;
  double seconds = 0;
};

struct UpperBound {
  int s = 0, d = 0, v = 0;
  std::size_t r = 0;
  std::size_t rank = 0;
  Provenance provenance;
};

// values uniform in [1, 2^16], each drawn from (seed, variable name) so the
// point does not depend on enumeration order
LyndonPoint sample_point(const std::set<Word>& vars, std::uint64_t seed);
std::uint64_t point_hash(const LyndonPoint& x);

ThetaImages<Rational> specialize_images(const ThetaImages<LyndonPoly>& im, const LyndonPoint& x);
ThetaImages<ModInt> specialize_images_mod(const ThetaImages<LyndonPoly>& im, const LyndonPoint& x, std::uint64_t p);

// M(theta_{d,v})(x) over Q
SparseRatMatrix specialized_matrix(int s, int d, int v, const LyndonPoint& x);

constexpr int kDefaultPrimes = 3;
UpperBound run_upper_bound(int s, int d, int v, std::uint64_t seed, Strategy strategy = Strategy::Modular,
                           int retries = 3);

struct ScanCell {
  int d = 0, v = 0;
  std::optional<std::size_t> r;
  std::string error;
};
std::vector<ScanCell> scan_zero_region(int s, int d_max, int v_max, std::uint64_t seed);

}  // namespace ckforge
