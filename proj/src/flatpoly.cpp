#include "ckforge/flatpoly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace ckforge {

unsigned FlatMono::max_exp() const {
  unsigned m = 0;
  for (auto x : w) {
    for (int b = 0; b < 8; ++b) m = std::max<unsigned>(m, (x >> (8 * b)) & 0xff);
  }
  return m;
}

FlatPoly FlatPoly::constant(const Rational& c) { return monomial(FlatMono{}, c); }

FlatPoly FlatPoly::variable(int var, unsigned e) {
  if (var < 0 || var >= FlatMono::kVars) throw std::out_of_range("too many variables for packed monomials");
  FlatMono m;
  m.set(var, e);
  return monomial(m, 1);
}

FlatPoly FlatPoly::monomial(const FlatMono& m, const Rational& c) {
  FlatPoly p;
  if (sgn(c) == 0) return p;
  p.terms_.push_back({m, c.get_num()});
  p.den_ = c.get_den();
  return p;
}

FlatPoly FlatPoly::from_terms(std::vector<Term> terms, Integer den) {
  FlatPoly p;
  p.terms_ = std::move(terms);
  p.den_ = std::move(den);
  p.normalize();
  return p;
}

void FlatPoly::normalize() {
  if (sgn(den_) == 0) throw std::domain_error("zero denominator");
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.m < b.m; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms_.size();) {
    std::size_t j = i + 1;
    Integer c = std::move(terms_[i].c);
    while (j < terms_.size() && terms_[j].m == terms_[i].m) c += terms_[j++].c;
    if (sgn(c) != 0) {
      terms_[out].m = terms_[i].m;
      terms_[out].c = std::move(c);
      ++out;
    }
    i = j;
  }
  terms_.resize(out);
  if (terms_.empty()) {
    den_ = 1;
    return;
  }
  if (sgn(den_) < 0) {
    den_ = -den_;
    for (auto& t : terms_) t.c = -t.c;
  }
  if (den_ == 1) return;
  Integer g = den_;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.c.get_mpz_t());
    if (g == 1) return;
  }
  mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  for (auto& t : terms_) mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), g.get_mpz_t());
}

namespace {

FlatPoly add_scaled(const FlatPoly& a, const FlatPoly& b, int sign) {
  // bring both to lcm of denominators, then merge
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
  const Integer fa = l / a.den(), fb = l / b.den();
  std::vector<FlatPoly::Term> out;
  out.reserve(a.size() + b.size());
  auto i = a.terms().begin(), j = b.terms().begin();
  while (i != a.terms().end() || j != b.terms().end()) {
    if (j == b.terms().end() || (i != a.terms().end() && i->m < j->m)) {
      out.push_back({i->m, i->c * fa});
      ++i;
    } else if (i == a.terms().end() || j->m < i->m) {
      out.push_back({j->m, sign > 0 ? Integer(j->c * fb) : Integer(-j->c * fb)});
      ++j;
    } else {
      Integer c = i->c * fa;
      if (sign > 0) {
        mpz_addmul(c.get_mpz_t(), j->c.get_mpz_t(), fb.get_mpz_t());
      } else {
        mpz_submul(c.get_mpz_t(), j->c.get_mpz_t(), fb.get_mpz_t());
      }
      if (sgn(c) != 0) out.push_back({i->m, std::move(c)});
      ++i, ++j;
    }
  }
  return FlatPoly::from_terms(std::move(out), l);
}

// open addressing accumulator for products
class Accumulator {
 public:
  explicit Accumulator(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    slots_.assign(cap, 0);
    mask_ = cap - 1;
    keys_.reserve(expected);
    vals_.reserve(expected);
  }
  void addmul(const FlatMono& m, const Integer& a, const Integer& b) {
    std::size_t h = m.hash() & mask_;
    for (;;) {
      std::uint32_t s = slots_[h];
      if (s == 0) {
        keys_.push_back(m);
        vals_.emplace_back();
        mpz_mul(vals_.back().get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        slots_[h] = static_cast<std::uint32_t>(keys_.size());
        if (2 * keys_.size() > slots_.size()) grow();
        return;
      }
      if (keys_[s - 1] == m) {
        mpz_addmul(vals_[s - 1].get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return;
      }
      h = (h + 1) & mask_;
    }
  }
  std::vector<FlatPoly::Term> take() {
    std::vector<FlatPoly::Term> out;
    out.reserve(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (sgn(vals_[i]) != 0) out.push_back({keys_[i], std::move(vals_[i])});
    }
    return out;
  }

 private:
  void grow() {
    slots_.assign(slots_.size() * 2, 0);
    mask_ = slots_.size() - 1;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      std::size_t h = keys_[i].hash() & mask_;
      while (slots_[h]) h = (h + 1) & mask_;
      slots_[h] = static_cast<std::uint32_t>(i + 1);
    }
  }
  std::vector<std::uint32_t> slots_;
  std::size_t mask_ = 0;
  std::vector<FlatMono> keys_;
  std::vector<Integer> vals_;
};

}  // namespace

FlatPoly operator+(const FlatPoly& a, const FlatPoly& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  return add_scaled(a, b, +1);
}

FlatPoly operator-(const FlatPoly& a, const FlatPoly& b) {
  if (b.is_zero()) return a;
  return add_scaled(a, b, -1);
}

FlatPoly operator*(const FlatPoly& a, const FlatPoly& b) {
  if (a.is_zero() || b.is_zero()) return FlatPoly();
  if (a.max_exp() + b.max_exp() > 255) throw std::overflow_error("packed exponent overflow");
  const FlatPoly& big = a.size() >= b.size() ? a : b;
  const FlatPoly& small = a.size() >= b.size() ? b : a;
  Accumulator acc(std::min<std::size_t>(big.size() * small.size(), big.size() * 8 + 1024));
  for (const auto& s : small.terms()) {
    for (const auto& t : big.terms()) acc.addmul(s.m * t.m, s.c, t.c);
  }
  return FlatPoly::from_terms(acc.take(), a.den() * b.den());
}

FlatPoly FlatPoly::operator-() const {
  FlatPoly r = *this;
  for (auto& t : r.terms_) t.c = -t.c;
  return r;
}

FlatPoly FlatPoly::scaled(const Rational& c) const {
  if (sgn(c) == 0 || is_zero()) return FlatPoly();
  FlatPoly r = *this;
  for (auto& t : r.terms_) t.c *= c.get_num();
  r.den_ *= c.get_den();
  r.normalize();
  return r;
}

FlatPoly FlatPoly::pow(unsigned n) const {
  FlatPoly r = constant(1), base = *this;
  while (n) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

bool FlatPoly::operator==(const FlatPoly& o) const {
  if (den_ != o.den_ || terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!(terms_[i].m == o.terms_[i].m) || terms_[i].c != o.terms_[i].c) return false;
  }
  return true;
}

unsigned FlatPoly::max_exp() const {
  unsigned m = 0;
  for (const auto& t : terms_) m = std::max(m, t.m.max_exp());
  return m;
}

unsigned FlatPoly::degree_in(int var) const {
  unsigned m = 0;
  for (const auto& t : terms_) m = std::max(m, t.m.exp(var));
  return m;
}

std::map<unsigned, FlatPoly> FlatPoly::split_by(int var) const {
  std::map<unsigned, std::vector<Term>> parts;
  for (const auto& t : terms_) {
    FlatMono m = t.m;
    const unsigned e = m.exp(var);
    m.set(var, 0);
    parts[e].push_back({m, t.c});
  }
  std::map<unsigned, FlatPoly> out;
  for (auto& [e, ts] : parts) out.emplace(e, from_terms(std::move(ts), den_));
  return out;
}

FlatPoly FlatPoly::times_var(int var, unsigned e) const {
  FlatPoly r = *this;
  for (auto& t : r.terms_) {
    const unsigned x = t.m.exp(var) + e;
    if (x > 255) throw std::overflow_error("packed exponent overflow");
    t.m.set(var, x);
  }
  r.normalize();
  return r;
}

std::optional<FlatPoly> FlatPoly::divide_var(int var, unsigned e) const {
  FlatPoly r = *this;
  for (auto& t : r.terms_) {
    const unsigned x = t.m.exp(var);
    if (x < e) return std::nullopt;
    t.m.set(var, x - e);
  }
  r.normalize();
  return r;
}

std::vector<long> FlatPoly::degrees(const std::vector<int>& weight) const {
  std::vector<long> out;
  for (const auto& t : terms_) {
    long d = 0;
    for (std::size_t i = 0; i < weight.size(); ++i) d += static_cast<long>(t.m.exp(static_cast<int>(i))) * weight[i];
    out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FlatPoly FlatPoly::filter_exp(int var, unsigned lo, unsigned hi) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    const unsigned e = t.m.exp(var);
    if (e >= lo && e <= hi) out.push_back(t);
  }
  return from_terms(std::move(out), den_);
}

Rational FlatPoly::evaluate(const std::vector<Rational>& values) const {
  // term * prod den_i^{E_i} is an integer, E_i the max exponent of var i
  std::array<unsigned, FlatMono::kVars> top{};
  for (const auto& t : terms_) {
    for (int v = 0; v < FlatMono::kVars; ++v) top[v] = std::max(top[v], t.m.exp(v));
  }
  std::vector<std::vector<Integer>> num_pow(FlatMono::kVars), den_pow(FlatMono::kVars);
  Integer scale = den_;
  for (int v = 0; v < FlatMono::kVars; ++v) {
    if (!top[v]) continue;
    if (static_cast<std::size_t>(v) >= values.size()) throw std::out_of_range("no value for packed variable");
    num_pow[v].assign(1, Integer(1));
    den_pow[v].assign(1, Integer(1));
    for (unsigned e = 1; e <= top[v]; ++e) {
      num_pow[v].push_back(num_pow[v].back() * values[v].get_num());
      den_pow[v].push_back(den_pow[v].back() * values[v].get_den());
    }
    scale *= den_pow[v][top[v]];
  }
  Integer total = 0, term;
  for (const auto& t : terms_) {
    term = t.c;
    for (int v = 0; v < FlatMono::kVars; ++v) {
      if (!top[v]) continue;
      const unsigned e = t.m.exp(v);
      if (e) term *= num_pow[v][e];
      if (e != top[v]) term *= den_pow[v][top[v] - e];
    }
    total += term;
  }
  Rational r(total, scale);
  r.canonicalize();
  return r;
}

FlatPoly FlatPoly::substitute(const std::vector<std::optional<Rational>>& values) const {
  std::vector<std::vector<Rational>> powers(FlatMono::kVars);
  // accumulate rational coefficients per remaining monomial
  std::map<FlatMono, Rational> acc;
  for (const auto& t : terms_) {
    Rational c(t.c);
    FlatMono m = t.m;
    for (int v = 0; v < FlatMono::kVars && static_cast<std::size_t>(v) < values.size(); ++v) {
      if (!values[v]) continue;
      const unsigned e = m.exp(v);
      if (!e) continue;
      auto& tab = powers[v];
      if (tab.empty()) tab.push_back(1);
      while (tab.size() <= e) tab.push_back(tab.back() * *values[v]);
      c *= tab[e];
      m.set(v, 0);
    }
    acc[m] += c;
  }
  Integer den = 1;
  for (const auto& [m, c] : acc) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Term> out;
  for (const auto& [m, c] : acc) {
    if (sgn(c) != 0) out.push_back({m, c.get_num() * (den / c.get_den())});
  }
  return from_terms(std::move(out), den * den_);
}

std::optional<FlatPoly> divide_linear(const FlatPoly& p, int var, const FlatPoly& c) {
  if (c.degree_in(var) != 0) throw std::invalid_argument("divisor constant term involves the main variable");
  auto parts = p.split_by(var);
  if (parts.empty()) return FlatPoly();
  const unsigned n = parts.rbegin()->first;
  if (n == 0) return p.is_zero() ? std::optional<FlatPoly>(FlatPoly()) : std::nullopt;
  // P = (var - c) Q + R, Q = sum_{k<n} Q_k var^k
  std::vector<FlatPoly> q(n);
  auto part = [&](unsigned k) { auto it = parts.find(k); return it == parts.end() ? FlatPoly() : it->second; };
  q[n - 1] = part(n);
  for (unsigned k = n - 1; k >= 1; --k) q[k - 1] = part(k) + c * q[k];
  FlatPoly rem = part(0) + c * q[0];
  if (!rem.is_zero()) return std::nullopt;
  FlatPoly out;
  for (unsigned k = 0; k < n; ++k) out += q[k].times_var(var, k);
  return out;
}

}  // namespace ckforge

namespace ckforge {

namespace {

using i128 = __int128;

class WideAccumulator {
 public:
  explicit WideAccumulator(std::size_t expected) {
    std::size_t cap = 1024;
    while (cap < 2 * expected) cap <<= 1;
    slots_.assign(cap, 0);
    mask_ = cap - 1;
  }
  void add(const FlatMono& m, i128 v) {
    std::size_t h = m.hash() & mask_;
    for (;;) {
      const std::uint32_t s = slots_[h];
      if (s == 0) {
        keys_.push_back(m);
        vals_.push_back(v);
        slots_[h] = static_cast<std::uint32_t>(keys_.size());
        if (2 * keys_.size() > slots_.size()) grow();
        return;
      }
      if (keys_[s - 1] == m) {
        vals_[s - 1] += v;
        return;
      }
      h = (h + 1) & mask_;
    }
  }
  std::vector<FlatPoly::Term> take() {
    std::vector<FlatPoly::Term> out;
    out.reserve(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (vals_[i] == 0) continue;
      const bool neg = vals_[i] < 0;
      const unsigned __int128 u = neg ? -static_cast<unsigned __int128>(vals_[i]) : vals_[i];
      Integer z = static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64));
      z <<= 64;
      z += Integer(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
      if (neg) z = -z;
      out.push_back({keys_[i], std::move(z)});
    }
    std::vector<FlatMono>().swap(keys_);
    std::vector<i128>().swap(vals_);
    return out;
  }

 private:
  void grow() {
    slots_.assign(slots_.size() * 2, 0);
    mask_ = slots_.size() - 1;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      std::size_t h = keys_[i].hash() & mask_;
      while (slots_[h]) h = (h + 1) & mask_;
      slots_[h] = static_cast<std::uint32_t>(i + 1);
    }
  }
  std::vector<std::uint32_t> slots_;
  std::size_t mask_ = 0;
  std::vector<FlatMono> keys_;
  std::vector<i128> vals_;
};

double log2_abs(const Integer& z) { return sgn(z) == 0 ? -1e9 : static_cast<double>(mpz_sizeinbase(z.get_mpz_t(), 2)); }

double max_log2(const FlatPoly& p) {
  double m = -1e9;
  for (const auto& t : p.terms()) m = std::max(m, log2_abs(t.c));
  return m;
}

}  // namespace

FlatPoly sum_of_products(const std::vector<ProductTerm>& terms) {
  double total = 0;  // bound on any accumulated absolute value
  bool fits = true;
  std::size_t expected = 0;
  for (const auto& t : terms) {
    if (t.a->den() != 1 || t.b->den() != 1) throw std::invalid_argument("sum_of_products expects integer polynomials");
    if (t.a->is_zero() || t.b->is_zero() || sgn(t.c) == 0) continue;
    if (t.a->max_exp() + t.b->max_exp() > 255) throw std::overflow_error("packed exponent overflow");
    const double ca = log2_abs(t.c) + max_log2(*t.a), cb = max_log2(*t.b);
    if (ca > 62 || cb > 62) fits = false;
    const double term = ca + cb + std::log2(static_cast<double>(std::min(t.a->size(), t.b->size())));
    total += std::exp2(term);
    expected = std::max(expected, std::max(t.a->size(), t.b->size()));
  }
  if (total == 0) return FlatPoly();
  if (fits && std::log2(total) < 124) {
    WideAccumulator acc(expected * 4);
    std::vector<std::int64_t> av, bv;
    for (const auto& t : terms) {
      if (t.a->is_zero() || t.b->is_zero() || sgn(t.c) == 0) continue;
      av.clear();
      bv.clear();
      for (const auto& x : t.a->terms()) av.push_back(Integer(x.c * t.c).get_si());
      for (const auto& x : t.b->terms()) bv.push_back(x.c.get_si());
      const auto& at = t.a->terms();
      const auto& bt = t.b->terms();
      for (std::size_t i = 0; i < at.size(); ++i) {
        const i128 ai = av[i];
        for (std::size_t j = 0; j < bt.size(); ++j) acc.add(at[i].m * bt[j].m, ai * bv[j]);
      }
    }
    return FlatPoly::from_terms(acc.take(), 1);
  }
  FlatPoly out;
  for (const auto& t : terms) out += (*t.a * *t.b).scaled(Rational(t.c));
  return out;
}

std::vector<std::pair<FlatMono, std::vector<Rational>>> evaluate_tail(
    const FlatPoly& p, int head, const std::vector<std::vector<Rational>>& points) {
  const auto& T = p.terms();
  std::vector<std::pair<FlatMono, std::vector<Rational>>> out;
  if (T.empty()) return out;
  std::array<unsigned, FlatMono::kVars> top{};
  for (const auto& t : T)
    for (int v = 0; v < FlatMono::kVars; ++v) top[v] = std::max(top[v], t.m.exp(v));
  std::vector<int> tail;
  for (int v = head; v < FlatMono::kVars; ++v)
    if (top[v]) tail.push_back(v);

  // order: head exponents, then tail exponents, variable by variable
  std::vector<std::uint32_t> idx(T.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<int> order;
  for (int v = 0; v < head; ++v) order.push_back(v);
  order.insert(order.end(), tail.begin(), tail.end());
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    for (int v : order) {
      const unsigned x = T[a].m.exp(v), y = T[b].m.exp(v);
      if (x != y) return x < y;
    }
    return false;
  });
  auto head_of = [&](std::uint32_t i) {
    FlatMono m;
    for (int v = 0; v < head; ++v) m.set(v, T[i].m.exp(v));
    return m;
  };

  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t lo = 0; lo < idx.size();) {
    std::size_t hi = lo + 1;
    const FlatMono h = head_of(idx[lo]);
    while (hi < idx.size() && head_of(idx[hi]) == h) ++hi;
    groups.emplace_back(lo, hi);
    out.push_back({h, {}});
    lo = hi;
  }

  for (const auto& pt : points) {
    // power tables for the tail variables
    std::vector<std::vector<Integer>> np(FlatMono::kVars), dp(FlatMono::kVars);
    Integer scale = p.den();
    for (int v : tail) {
      if (static_cast<std::size_t>(v) >= pt.size()) throw std::out_of_range("no value for packed variable");
      np[v].assign(1, Integer(1));
      dp[v].assign(1, Integer(1));
      for (unsigned e = 1; e <= top[v]; ++e) {
        np[v].push_back(np[v].back() * pt[v].get_num());
        dp[v].push_back(dp[v].back() * pt[v].get_den());
      }
      scale *= dp[v][top[v]];
    }
    // sum over [lo,hi) of c * prod n^e d^(E-e) for tail levels >= lvl
    std::function<Integer(std::size_t, std::size_t, std::size_t)> horner = [&](std::size_t lo, std::size_t hi,
                                                                              std::size_t lvl) -> Integer {
      if (lvl == tail.size()) {
        Integer s = 0;
        for (std::size_t i = lo; i < hi; ++i) s += T[idx[i]].c;
        return s;
      }
      const int v = tail[lvl];
      if (hi - lo == 1) {
        Integer s = T[idx[lo]].c;
        for (std::size_t l = lvl; l < tail.size(); ++l) {
          const int w = tail[l];
          const unsigned e = T[idx[lo]].m.exp(w);
          if (e) s *= np[w][e];
          if (e != top[w]) s *= dp[w][top[w] - e];
        }
        return s;
      }
      // groups by exponent of v, ascending; walk them from the top
      std::vector<std::pair<std::size_t, std::size_t>> sub;
      for (std::size_t a = lo; a < hi;) {
        std::size_t b = a + 1;
        const unsigned e = T[idx[a]].m.exp(v);
        while (b < hi && T[idx[b]].m.exp(v) == e) ++b;
        sub.emplace_back(a, b);
        a = b;
      }
      Integer acc;
      unsigned prev = 0, first = 0;
      for (std::size_t k = sub.size(); k-- > 0;) {
        const unsigned e = T[idx[sub[k].first]].m.exp(v);
        Integer val = horner(sub[k].first, sub[k].second, lvl + 1);
        if (k + 1 == sub.size()) {
          acc = std::move(val);
          first = e;
        } else {
          acc *= np[v][prev - e];
          val *= dp[v][first - e];
          acc += val;
        }
        prev = e;
      }
      acc *= np[v][prev];
      acc *= dp[v][top[v] - first];
      return acc;
    };
    for (std::size_t g = 0; g < groups.size(); ++g) {
      Rational r(horner(groups[g].first, groups[g].second, 0), scale);
      r.canonicalize();
      out[g].second.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace ckforge
