#include "ckforge/shuffle.hpp"

#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace ckforge {

ShuffleElem::ShuffleElem(Rational c) {
  if (sgn(c) != 0) terms_.emplace(Word(), std::move(c));
}

ShuffleElem ShuffleElem::word(const Word& w, const Rational& c) {
  ShuffleElem e;
  e.add_term(w, c);
  return e;
}

Rational ShuffleElem::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Rational(0) : it->second;
}

void ShuffleElem::add_term(const Word& w, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

ShuffleElem& ShuffleElem::operator+=(const ShuffleElem& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

ShuffleElem& ShuffleElem::operator-=(const ShuffleElem& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

ShuffleElem& ShuffleElem::operator*=(const ShuffleElem& o) {
  *this = shuffle(*this, o);
  return *this;
}

ShuffleElem& ShuffleElem::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
  } else {
    for (auto& [w, x] : terms_) x *= c;
  }
  return *this;
}

ShuffleElem operator*(const ShuffleElem& a, const ShuffleElem& b) { return shuffle(a, b); }

ShuffleElem ShuffleElem::operator-() const {
  ShuffleElem r = *this;
  for (auto& [w, c] : r.terms_) c = -c;
  return r;
}

std::map<int, ShuffleElem> ShuffleElem::homogeneous_parts() const {
  std::map<int, ShuffleElem> parts;
  for (const auto& [w, c] : terms_) parts[w.degree()].terms_.emplace(w, c);
  return parts;
}

int ShuffleElem::max_letter_degree() const {
  int d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.max_letter_degree());
  return d;
}

std::string ShuffleElem::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += ckforge::to_string(c) + "*" + w.to_string();
  }
  return out;
}

ShuffleElem ShuffleElem::parse(std::string_view text) {
  ShuffleElem e;
  std::string s(text);
  // normalise " - " separators into "+ -"
  std::string norm;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '-' && i >= 2 && s[i - 1] == ' ' && s[i + 1] == ' ') {
      // "a - b": replace with "a + -b"
      norm += "+ -";
      ++i;
      continue;
    }
    norm += s[i];
  }
  auto trim = [](std::string_view t) {
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
    return t;
  };
  std::string_view rest = trim(norm);
  if (rest == "0" || rest.empty()) return e;
  while (!rest.empty()) {
    auto plus = rest.find(" + ");
    auto term = trim(rest.substr(0, plus));
    auto star = term.find('*');
    if (star == std::string_view::npos) {
      e.add_term(Word(), parse_rational(term));
    } else {
      e.add_term(Word::parse(trim(term.substr(star + 1))), parse_rational(trim(term.substr(0, star))));
    }
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 3);
  }
  return e;
}

namespace {

// enumerate interleavings of u and v, counting multiplicities
void interleave(const std::u16string& u, const std::u16string& v, std::size_t i, std::size_t j,
                std::u16string& buf, std::unordered_map<std::u16string, long long>& acc) {
  if (i == u.size() && j == v.size()) {
    ++acc[buf];
    return;
  }
  if (i < u.size()) {
    buf.push_back(u[i]);
    interleave(u, v, i + 1, j, buf, acc);
    buf.pop_back();
  }
  if (j < v.size()) {
    buf.push_back(v[j]);
    interleave(u, v, i, j + 1, buf, acc);
    buf.pop_back();
  }
}

}  // namespace

ShuffleElem shuffle(const Word& u, const Word& v) {
  std::unordered_map<std::u16string, long long> acc;
  std::u16string buf;
  buf.reserve(u.length() + v.length());
  interleave(u.code(), v.code(), 0, 0, buf, acc);
  ShuffleElem out;
  for (auto& [w, n] : acc) out.add_term(Word(w), Rational(static_cast<long>(n)));
  return out;
}

ShuffleElem shuffle(const ShuffleElem& a, const ShuffleElem& b) {
  std::unordered_map<std::u16string, Rational> acc;
  std::u16string buf;
  for (const auto& [u, cu] : a.terms()) {
    for (const auto& [v, cv] : b.terms()) {
      std::unordered_map<std::u16string, long long> counts;
      buf.clear();
      interleave(u.code(), v.code(), 0, 0, buf, counts);
      Rational c = cu * cv;
      for (auto& [w, n] : counts) acc[w] += c * static_cast<long>(n);
    }
  }
  ShuffleElem out;
  for (auto& [w, c] : acc) out.add_term(Word(w), c);
  return out;
}

void Tensor2::add_term(const Word& a, const Word& b, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace({a, b}, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::string Tensor2::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += ckforge::to_string(c) + "*" + k.first.to_string() + "|" + k.second.to_string();
  }
  return out;
}

Tensor2 coproduct(const ShuffleElem& a) {
  Tensor2 t;
  for (const auto& [w, c] : a.terms()) {
    for (std::size_t k = 0; k <= w.length(); ++k) t.add_term(w.substr(0, k), w.substr(k), c);
  }
  return t;
}

Tensor2 shuffle(const Tensor2& a, const Tensor2& b) {
  Tensor2 out;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      auto left = shuffle(ka.first, kb.first);
      auto right = shuffle(ka.second, kb.second);
      for (const auto& [l, cl] : left.terms()) {
        for (const auto& [r, cr] : right.terms()) out.add_term(l, r, ca * cb * cl * cr);
      }
    }
  }
  return out;
}

std::map<std::tuple<Word, Word, Word>, Rational> coproduct_left_iterated(const ShuffleElem& a) {
  std::map<std::tuple<Word, Word, Word>, Rational> out;
  const Tensor2 outer = coproduct(a);
  for (const auto& [k, c] : outer.terms()) {
    const Tensor2 inner = coproduct(ShuffleElem::word(k.first));
    for (const auto& [k2, c2] : inner.terms()) {
      out[{k2.first, k2.second, k.second}] += c * c2;
    }
  }
  std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
  return out;
}

std::map<std::tuple<Word, Word, Word>, Rational> coproduct_right_iterated(const ShuffleElem& a) {
  std::map<std::tuple<Word, Word, Word>, Rational> out;
  const Tensor2 outer = coproduct(a);
  for (const auto& [k, c] : outer.terms()) {
    const Tensor2 inner = coproduct(ShuffleElem::word(k.second));
    for (const auto& [k2, c2] : inner.terms()) {
      out[{k.first, k2.first, k2.second}] += c * c2;
    }
  }
  std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
  return out;
}

}  // namespace ckforge
