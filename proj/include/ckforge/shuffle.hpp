#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "ckforge/alphabet.hpp"
#include "ckforge/rational.hpp"

namespace ckforge {

// Element of the shuffle algebra: word -> nonzero rational.
class ShuffleElem {
 public:
  using Terms = std::map<Word, Rational>;

  ShuffleElem() = default;
  explicit ShuffleElem(Rational c);  // c * f_1
  static ShuffleElem word(const Word& w, const Rational& c = 1);
  static ShuffleElem one() { return ShuffleElem(Rational(1)); }
  static ShuffleElem parse(std::string_view text);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coeff(const Word& w) const;

  void add_term(const Word& w, const Rational& c);

  ShuffleElem& operator+=(const ShuffleElem& o);
  ShuffleElem& operator-=(const ShuffleElem& o);
  ShuffleElem& operator*=(const ShuffleElem& o);
  ShuffleElem& operator*=(const Rational& c);
  friend ShuffleElem operator+(ShuffleElem a, const ShuffleElem& b) { return a += b; }
  friend ShuffleElem operator-(ShuffleElem a, const ShuffleElem& b) { return a -= b; }
  friend ShuffleElem operator*(const ShuffleElem& a, const ShuffleElem& b);
  friend ShuffleElem operator*(ShuffleElem a, const Rational& c) { return a *= c; }
  friend ShuffleElem operator*(const Rational& c, ShuffleElem a) { return a *= c; }
  ShuffleElem operator-() const;

  bool operator==(const ShuffleElem&) const = default;

  // homogeneous pieces by word degree
  std::map<int, ShuffleElem> homogeneous_parts() const;
  int max_letter_degree() const;

  std::string to_string() const;

 private:
  Terms terms_;
};

inline bool is_zero(const ShuffleElem& a) { return a.is_zero(); }

// word-level shuffle with multiplicities
ShuffleElem shuffle(const Word& u, const Word& v);
ShuffleElem shuffle(const ShuffleElem& a, const ShuffleElem& b);

// Sum of a_i (x) b_i, stored on pairs of words.
class Tensor2 {
 public:
  using Terms = std::map<std::pair<Word, Word>, Rational>;
  void add_term(const Word& a, const Word& b, const Rational& c);
  const Terms& terms() const { return terms_; }
  bool operator==(const Tensor2&) const = default;
  std::string to_string() const;

 private:
  Terms terms_;
};

Tensor2 coproduct(const ShuffleElem& a);
// componentwise product (a1 (x) a2)(b1 (x) b2) = (a1 sh b1) (x) (a2 sh b2)
Tensor2 shuffle(const Tensor2& a, const Tensor2& b);
// (Delta (x) id) Delta and (id (x) Delta) Delta, as maps on triples
std::map<std::tuple<Word, Word, Word>, Rational> coproduct_left_iterated(const ShuffleElem& a);
std::map<std::tuple<Word, Word, Word>, Rational> coproduct_right_iterated(const ShuffleElem& a);

}  // namespace ckforge
