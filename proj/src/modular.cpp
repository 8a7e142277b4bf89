#include "ckforge/modular.hpp"

namespace ckforge {

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw std::domain_error("bad prime");
  return powmod(a, p - 2, p);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) d >>= 1, ++r;
  // deterministic witness set for 64-bit inputs
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t random_prime_62(Rng& rng) {
  for (;;) {
    std::uint64_t c = rng.uniform(1ULL << 61, (1ULL << 62) - 1) | 1ULL;
    if (is_prime_u64(c)) return c;
  }
}

std::uint64_t reduce_mod(const Integer& z, std::uint64_t p) {
  // mpz_fdiv_ui takes an unsigned long, which is 64-bit here
  return mpz_fdiv_ui(z.get_mpz_t(), p);
}

std::uint64_t reduce_mod(const Rational& q, std::uint64_t p) {
  std::uint64_t den = reduce_mod(q.get_den(), p);
  if (den == 0) throw std::domain_error("bad prime");
  return mulmod(reduce_mod(q.get_num(), p), invmod(den, p), p);
}

}  // namespace ckforge
