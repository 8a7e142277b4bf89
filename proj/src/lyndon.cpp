#include "ckforge/lyndon.hpp"

#include <fstream>
#include <stdexcept>

namespace ckforge {

std::string lyndon_var_name(const Word& w) { return "X[" + w.to_string() + "]"; }

std::string to_string(const LyndonPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) out += " + ";
    first = false;
    out += to_string(c);
    if (!m.is_one()) out += "*" + m.to_string(lyndon_var_name);
  }
  return out;
}

LyndonPoly parse_lyndon_poly(std::string_view text) {
  LyndonPoly p;
  auto trim = [](std::string_view t) {
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
    return t;
  };
  std::string_view rest = trim(text);
  if (rest.empty() || rest == "0") return p;
  while (!rest.empty()) {
    auto plus = rest.find(" + ");
    auto term = trim(rest.substr(0, plus));
    auto star = term.find('*');
    Rational c = parse_rational(term.substr(0, star));
    std::vector<LyndonMonomial::Factor> factors;
    while (star != std::string_view::npos) {
      term = term.substr(star + 1);
      star = term.find('*');
      auto f = term.substr(0, star);
      if (f.size() < 4 || f.substr(0, 2) != "X[") throw std::invalid_argument("bad Lyndon factor");
      auto close = f.find(']');
      unsigned e = 1;
      if (close + 1 < f.size()) {
        if (f[close + 1] != '^') throw std::invalid_argument("bad Lyndon factor");
        e = static_cast<unsigned>(std::stoul(std::string(f.substr(close + 2))));
      }
      factors.emplace_back(Word::parse(f.substr(2, close - 2)), e);
    }
    p.add_term(LyndonMonomial::from_factors(std::move(factors)), c);
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 3);
  }
  return p;
}

long degree(const LyndonMonomial& m) {
  return m.weighted_degree([](const Word& w) { return w.degree(); });
}

std::set<Word> variables(const LyndonPoly& p) {
  std::set<Word> out;
  for (const auto& [m, c] : p.terms()) {
    for (const auto& f : m.factors()) out.insert(f.first);
  }
  return out;
}

Rational evaluate(const LyndonPoly& p, const LyndonPoint& x) {
  Rational total = 0;
  Rational t, pw;
  for (const auto& [m, c] : p.terms()) {
    t = c;
    for (const auto& [w, e] : m.factors()) {
      auto it = x.find(w);
      if (it == x.end()) throw std::out_of_range("no value for Lyndon variable " + lyndon_var_name(w));
      mpz_pow_ui(pw.get_num_mpz_t(), it->second.get_num_mpz_t(), e);
      mpz_pow_ui(pw.get_den_mpz_t(), it->second.get_den_mpz_t(), e);
      t *= pw;
    }
    total += t;
  }
  return total;
}

namespace {

using CodeMap = std::unordered_map<std::u16string, long long>;

long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("shuffle coefficient overflow");
  return r;
}

void interleave_into(const std::u16string& u, const std::u16string& v, std::size_t i, std::size_t j,
                     std::u16string& buf, long long c, CodeMap& acc) {
  if (i == u.size()) {
    buf.append(v, j);
    long long& slot = acc[buf];
    if (__builtin_add_overflow(slot, c, &slot)) throw std::overflow_error("shuffle coefficient overflow");
    buf.resize(buf.size() - (v.size() - j));
    return;
  }
  if (j == v.size()) {
    buf.append(u, i);
    long long& slot = acc[buf];
    if (__builtin_add_overflow(slot, c, &slot)) throw std::overflow_error("shuffle coefficient overflow");
    buf.resize(buf.size() - (u.size() - i));
    return;
  }
  buf.push_back(u[i]);
  interleave_into(u, v, i + 1, j, buf, c, acc);
  buf.back() = v[j];
  interleave_into(u, v, i, j + 1, buf, c, acc);
  buf.pop_back();
}

CodeMap shuffle_codes(const CodeMap& a, const CodeMap& b) {
  CodeMap out;
  std::u16string buf;
  for (const auto& [u, cu] : a) {
    for (const auto& [v, cv] : b) {
      buf.clear();
      interleave_into(u, v, 0, 0, buf, checked_mul(cu, cv), out);
    }
  }
  return out;
}

// f_l^{sh i} / i!
CodeMap divided_power(const std::u16string& l, unsigned i) {
  if (l.size() == 1) {
    return CodeMap{{std::u16string(i, l[0]), 1}};
  }
  CodeMap single{{l, 1}};
  CodeMap p = single;
  long long fact = 1;
  for (unsigned k = 2; k <= i; ++k) {
    p = shuffle_codes(p, single);
    fact = checked_mul(fact, k);
  }
  for (auto& [w, c] : p) {
    if (c % fact != 0) throw std::logic_error("divided power not integral");
    c /= fact;
  }
  return p;
}

// group consecutive equal CFL factors
std::vector<std::pair<Word, unsigned>> factor_runs(const Word& w) {
  std::vector<std::pair<Word, unsigned>> runs;
  for (auto& l : cfl_factorize(w)) {
    if (!runs.empty() && runs.back().first == l) {
      ++runs.back().second;
    } else {
      runs.emplace_back(std::move(l), 1u);
    }
  }
  return runs;
}

CodeMap basis_expansion_codes(const Word& w) {
  auto runs = factor_runs(w);
  CodeMap cur{{std::u16string(), 1}};
  for (const auto& [l, i] : runs) cur = shuffle_codes(cur, divided_power(l.code(), i));
  return cur;
}

}  // namespace

std::vector<std::pair<Word, long long>> lyndon_basis_expansion(const Word& w) {
  std::vector<std::pair<Word, long long>> out;
  for (auto& [u, c] : basis_expansion_codes(w)) {
    if (c != 0) out.emplace_back(Word(u), c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LyndonPoly rewrite_to_lyndon(const ShuffleElem& a) {
  LyndonPoly out;
  if (a.is_zero()) return out;
  // clear denominators so the rewriting runs over the integers
  Integer den = 1;
  for (const auto& [w, c] : a.terms()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::map<std::u16string, Integer> e;
  for (const auto& [w, c] : a.terms()) e.emplace(w.code(), c.get_num() * (den / c.get_den()));

  Integer prod;
  while (!e.empty()) {
    auto top = std::prev(e.end());
    const std::u16string lead = top->first;
    const Integer c = top->second;
    Word w(lead);
    auto runs = factor_runs(w);
    Integer fact = 1;
    std::vector<LyndonMonomial::Factor> factors;
    for (const auto& [l, i] : runs) {
      fact *= factorial(i);
      factors.emplace_back(l, i);
    }
    auto expansion = basis_expansion_codes(w);
    for (const auto& [u, b] : expansion) {
      if (b == 0) continue;
      auto [it, inserted] = e.try_emplace(u, 0);
      mpz_set_si(prod.get_mpz_t(), b);
      prod *= c;
      it->second -= prod;
      if (sgn(it->second) == 0) e.erase(it);
    }
    if (e.count(lead)) throw std::logic_error("triangular rewriting failed to clear leading word");
    Rational coef(c, den * fact);
    coef.canonicalize();
    out.add_term(LyndonMonomial::from_factors(std::move(factors)), coef);
  }
  return out;
}

ShuffleElem from_lyndon_poly(const LyndonPoly& p) {
  ShuffleElem out;
  for (const auto& [m, c] : p.terms()) {
    ShuffleElem t = ShuffleElem(c);
    for (const auto& [l, e] : m.factors()) {
      for (unsigned k = 0; k < e; ++k) t = shuffle(t, ShuffleElem::word(l));
    }
    out += t;
  }
  return out;
}

bool ConversionCache::lookup(const std::string& key, LyndonPoly& out) const {
  std::shared_lock lock(mutex_);
  auto it = map_.find(key);
  if (it == map_.end()) return false;
  out = it->second;
  return true;
}

void ConversionCache::insert(const std::string& key, const LyndonPoly& value) {
  std::unique_lock lock(mutex_);
  map_.try_emplace(key, value);
}

std::size_t ConversionCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

void ConversionCache::clear() {
  std::unique_lock lock(mutex_);
  map_.clear();
}

namespace {
constexpr const char* kCacheHeader = "# ckforge conversion cache v1";
}

std::filesystem::path ConversionCache::file_for(const std::filesystem::path& dir, int s, int d) {
  return dir / ("lyndon-s" + std::to_string(s) + "-d" + std::to_string(d) + ".tsv");
}

std::size_t ConversionCache::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return 0;
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCacheHeader, 0) != 0) return 0;  // foreign or stale file
  std::size_t n = 0;
  std::unique_lock lock(mutex_);
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    try {
      map_.try_emplace(line.substr(0, tab), parse_lyndon_poly(std::string_view(line).substr(tab + 1)));
      ++n;
    } catch (const std::exception&) {
      // a truncated last line is tolerated
    }
  }
  return n;
}

void ConversionCache::save(const std::filesystem::path& file, int s, int d) const {
  std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << kCacheHeader << " s=" << s << " d=" << d << "\n";
    std::shared_lock lock(mutex_);
    std::map<std::string, const LyndonPoly*> sorted;
    for (const auto& [k, v] : map_) sorted.emplace(k, &v);
    for (const auto& [k, v] : sorted) out << k << '\t' << to_string(*v) << '\n';
  }
  std::filesystem::rename(tmp, file);
}

ConversionCache& global_conversion_cache() {
  static ConversionCache cache;
  return cache;
}

LyndonPoly to_lyndon_poly(const ShuffleElem& a, int d) { return to_lyndon_poly(a, d, &global_conversion_cache()); }

LyndonPoly to_lyndon_poly(const ShuffleElem& a, int d, ConversionCache* cache) {
  if (a.max_letter_degree() > d) throw std::invalid_argument("generator exceeds depth bound");
  if (a.is_zero()) return LyndonPoly();
  // single terms are cached by bare word and rescaled
  if (a.size() == 1) {
    const auto& [w, c] = *a.terms().begin();
    if (w.empty()) return LyndonPoly::constant(c);
    LyndonPoly p;
    std::string key = w.to_string();
    if (!cache || !cache->lookup(key, p)) {
      p = rewrite_to_lyndon(ShuffleElem::word(w));
      if (cache) cache->insert(key, p);
    }
    return c == 1 ? p : p.scaled(c);
  }
  LyndonPoly p;
  std::string key = a.to_string();
  if (cache && cache->lookup(key, p)) return p;
  p = rewrite_to_lyndon(a);
  if (cache) cache->insert(key, p);
  return p;
}

}  // namespace ckforge
