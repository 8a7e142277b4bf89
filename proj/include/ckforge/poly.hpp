#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ckforge/rational.hpp"

namespace ckforge {

namespace detail {
template <class C>
bool coeff_is_zero(const C& c) {
  return is_zero(c);
}
}  // namespace detail

// Sparse exponent vector: sorted (variable, exponent) pairs with exponent > 0.
template <class Var>
class Monomial {
 public:
  using Factor = std::pair<Var, unsigned>;

  Monomial() = default;
  static Monomial var(const Var& v, unsigned e = 1) {
    Monomial m;
    if (e) m.factors_.emplace_back(v, e);
    return m;
  }
  static Monomial from_factors(std::vector<Factor> f) {
    std::sort(f.begin(), f.end(), [](const Factor& a, const Factor& b) { return a.first < b.first; });
    Monomial m;
    for (auto& [v, e] : f) {
      if (e == 0) continue;
      if (!m.factors_.empty() && m.factors_.back().first == v) {
        m.factors_.back().second += e;
      } else {
        m.factors_.emplace_back(v, e);
      }
    }
    return m;
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  unsigned exponent(const Var& v) const {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                               [](const Factor& f, const Var& x) { return f.first < x; });
    return (it != factors_.end() && it->first == v) ? it->second : 0;
  }

  unsigned total_exponent() const {
    unsigned t = 0;
    for (const auto& f : factors_) t += f.second;
    return t;
  }

  template <class Weight>
  long weighted_degree(Weight&& w) const {
    long t = 0;
    for (const auto& f : factors_) t += static_cast<long>(f.second) * w(f.first);
    return t;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto i = a.factors_.begin(), j = b.factors_.begin();
    while (i != a.factors_.end() && j != b.factors_.end()) {
      if (i->first < j->first) {
        r.factors_.push_back(*i++);
      } else if (j->first < i->first) {
        r.factors_.push_back(*j++);
      } else {
        r.factors_.emplace_back(i->first, i->second + j->second);
        ++i, ++j;
      }
    }
    r.factors_.insert(r.factors_.end(), i, a.factors_.end());
    r.factors_.insert(r.factors_.end(), j, b.factors_.end());
    return r;
  }

  Monomial pow(unsigned n) const {
    Monomial r;
    if (n == 0) return r;
    r.factors_ = factors_;
    for (auto& f : r.factors_) f.second *= n;
    return r;
  }

  std::optional<Monomial> divide(const Monomial& b) const {
    Monomial r;
    auto i = factors_.begin();
    for (const auto& [v, e] : b.factors_) {
      while (i != factors_.end() && i->first < v) r.factors_.push_back(*i++);
      if (i == factors_.end() || !(i->first == v) || i->second < e) return std::nullopt;
      if (i->second > e) r.factors_.emplace_back(v, i->second - e);
      ++i;
    }
    r.factors_.insert(r.factors_.end(), i, factors_.end());
    return r;
  }

  // drop v entirely
  Monomial without(const Var& v) const {
    Monomial r;
    for (const auto& f : factors_) {
      if (!(f.first == v)) r.factors_.push_back(f);
    }
    return r;
  }

  std::string to_string(const std::function<std::string(const Var&)>& name) const {
    if (factors_.empty()) return "1";
    std::string out;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (k) out += '*';
      out += name(factors_[k].first);
      if (factors_[k].second != 1) out += "^" + std::to_string(factors_[k].second);
    }
    return out;
  }

  bool operator==(const Monomial&) const = default;
  bool operator<(const Monomial& o) const { return factors_ < o.factors_; }

 private:
  std::vector<Factor> factors_;
};

// Sparse polynomial with coefficients in a commutative ring C. C needs
// +, -, *, unary -, and an is_zero overload found by ADL.
template <class Var, class C>
class Polynomial {
 public:
  using Mono = Monomial<Var>;
  using Terms = std::map<Mono, C>;
  using Coeff = C;

  Polynomial() = default;
  static Polynomial constant(const C& c) { return monomial(Mono(), c); }
  static Polynomial monomial(const Mono& m, const C& c) {
    Polynomial p;
    p.add_term(m, c);
    return p;
  }
  static Polynomial variable(const Var& v, const C& one) { return monomial(Mono::var(v), one); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  const C* find(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? nullptr : &it->second;
  }

  void add_term(const Mono& m, const C& c) {
    if (is_zero_coeff(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (is_zero_coeff(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  Polynomial operator-() const {
    Polynomial r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    }
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  // coefficient-wise c * coeff
  Polynomial scaled(const C& c) const {
    Polynomial r;
    for (const auto& [m, x] : terms_) r.add_term(m, c * x);
    return r;
  }

  Polynomial pow(unsigned n, const C& one) const {
    Polynomial r = constant(one), base = *this;
    while (n) {
      if (n & 1) r = r * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return r;
  }

  template <class F>
  auto map_coeffs(F&& f) const -> Polynomial<Var, std::decay_t<decltype(f(std::declval<const C&>()))>> {
    Polynomial<Var, std::decay_t<decltype(f(std::declval<const C&>()))>> r;
    for (const auto& [m, c] : terms_) r.add_term(m, f(c));
    return r;
  }

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

 private:
  static bool is_zero_coeff(const C& c) { return detail::coeff_is_zero(c); }
  Terms terms_;
};

template <class Var, class C>
bool is_zero(const Polynomial<Var, C>& p) {
  return p.is_zero();
}

}  // namespace ckforge
