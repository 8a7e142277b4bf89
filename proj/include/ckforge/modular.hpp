#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ckforge/random.hpp"
#include "ckforge/rational.hpp"

namespace ckforge {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}
inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t r = a + b;
  return r >= p ? r - p : r;
}
inline std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return a >= b ? a - b : a + p - b; }
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p);
std::uint64_t invmod(std::uint64_t a, std::uint64_t p);

bool is_prime_u64(std::uint64_t n);
// uniformly drawn prime in [2^61, 2^62)
std::uint64_t random_prime_62(Rng& rng);

// Reduction of an integer/rational modulo p. Throws "bad prime" when p
// divides the denominator.
std::uint64_t reduce_mod(const Integer& z, std::uint64_t p);
std::uint64_t reduce_mod(const Rational& q, std::uint64_t p);

// Residue with its modulus carried along so it can sit inside the generic
// polynomial templates.
struct ModInt {
  std::uint64_t v = 0;
  std::uint64_t p = 0;

  friend ModInt operator+(ModInt a, ModInt b) { return {addmod(a.v, b.v, a.p | b.p), a.p | b.p}; }
  friend ModInt operator-(ModInt a, ModInt b) { return {submod(a.v, b.v, a.p | b.p), a.p | b.p}; }
  friend ModInt operator*(ModInt a, ModInt b) { return {mulmod(a.v, b.v, a.p | b.p), a.p | b.p}; }
  ModInt operator-() const { return {v ? p - v : 0, p}; }
  bool operator==(const ModInt& o) const { return v == o.v; }
};

inline bool is_zero(const ModInt& a) { return a.v == 0; }

}  // namespace ckforge
