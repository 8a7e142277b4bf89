#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ckforge/rational.hpp"

namespace ckforge {

// Dense exponent vector, 8 bits per variable, packed into 64-bit words.
// Products are word-wise additions, so callers must keep exponents < 256.
struct FlatMono {
  static constexpr int kWords = 7;
  static constexpr int kVars = 8 * kWords;
  std::array<std::uint64_t, kWords> w{};

  unsigned exp(int var) const { return (w[var >> 3] >> ((var & 7) * 8)) & 0xff; }
  void set(int var, unsigned e) {
    const int sh = (var & 7) * 8;
    w[var >> 3] = (w[var >> 3] & ~(0xffULL << sh)) | (static_cast<std::uint64_t>(e) << sh);
  }
  friend FlatMono operator*(const FlatMono& a, const FlatMono& b) {
    FlatMono r;
    for (int i = 0; i < kWords; ++i) r.w[i] = a.w[i] + b.w[i];
    return r;
  }
  bool operator==(const FlatMono& o) const { return w == o.w; }
  bool operator<(const FlatMono& o) const { return w < o.w; }
  std::size_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : w) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
  unsigned max_exp() const;
};

// Sparse polynomial over Q stored as integer numerators over one common
// denominator; normal form: sorted, no zero terms, den > 0, content coprime
// to den.
class FlatPoly {
 public:
  struct Term {
    FlatMono m;
    Integer c;
  };

  FlatPoly() = default;
  static FlatPoly constant(const Rational& c);
  static FlatPoly variable(int var, unsigned e = 1);
  static FlatPoly monomial(const FlatMono& m, const Rational& c);
  static FlatPoly from_terms(std::vector<Term> terms, Integer den);

  const std::vector<Term>& terms() const { return terms_; }
  const Integer& den() const { return den_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coeff(const Term& t) const {
    Rational r(t.c, den_);
    r.canonicalize();
    return r;
  }

  friend FlatPoly operator+(const FlatPoly& a, const FlatPoly& b);
  friend FlatPoly operator-(const FlatPoly& a, const FlatPoly& b);
  friend FlatPoly operator*(const FlatPoly& a, const FlatPoly& b);
  FlatPoly& operator+=(const FlatPoly& b) { return *this = *this + b; }
  FlatPoly& operator-=(const FlatPoly& b) { return *this = *this - b; }
  FlatPoly& operator*=(const FlatPoly& b) { return *this = *this * b; }
  FlatPoly operator-() const;
  FlatPoly scaled(const Rational& c) const;
  FlatPoly pow(unsigned n) const;

  bool operator==(const FlatPoly& o) const;

  unsigned max_exp() const;
  unsigned degree_in(int var) const;
  // exponent of var -> coefficient polynomial free of var
  std::map<unsigned, FlatPoly> split_by(int var) const;
  FlatPoly times_var(int var, unsigned e) const;
  // exact division by var^e, nullopt if some term lacks it
  std::optional<FlatPoly> divide_var(int var, unsigned e) const;
  // sum_i e_i * weight[i]; returns the set of degrees present
  std::vector<long> degrees(const std::vector<int>& weight) const;
  // keep only terms whose exponent of var lies in [lo, hi]
  FlatPoly filter_exp(int var, unsigned lo, unsigned hi) const;

  // values[i] for every variable i that occurs
  Rational evaluate(const std::vector<Rational>& values) const;
  // substitute the variables that have a value, keep the rest
  FlatPoly substitute(const std::vector<std::optional<Rational>>& values) const;

 private:
  void normalize();
  std::vector<Term> terms_;
  Integer den_ = 1;
};

inline bool is_zero(const FlatPoly& p) { return p.is_zero(); }

struct ProductTerm {
  Integer c;
  const FlatPoly* a = nullptr;
  const FlatPoly* b = nullptr;
};
// sum of c * a * b; inputs must have denominator 1. Accumulates in 128-bit
// integers when a coefficient bound allows it, in GMP otherwise.
FlatPoly sum_of_products(const std::vector<ProductTerm>& terms);

// Values of p with variables >= head substituted, grouped by the remaining
// head monomial; one value per point (each point a value vector indexed by
// variable). Integer Horner evaluation.
std::vector<std::pair<FlatMono, std::vector<Rational>>> evaluate_tail(
    const FlatPoly& p, int head, const std::vector<std::vector<Rational>>& points);

// Quotient of p by (var - c) with var as main variable; c must be free of
// var. Returns nullopt when the remainder is nonzero.
std::optional<FlatPoly> divide_linear(const FlatPoly& p, int var, const FlatPoly& c);

}  // namespace ckforge
