#include "ckforge/resultant.hpp"

#include <chrono>
#include <sstream>

#include "ckforge/linalg.hpp"
#include "ckforge/modular.hpp"
#include "ckforge/random.hpp"
#include "ckforge/upper_bound.hpp"

namespace ckforge {

using namespace ckvar;

namespace {

const Generator P = Generator::tau(1);
const Generator Q = Generator::tau(2);
const Generator S3 = Generator::sigma(3);
const Generator S5 = Generator::sigma(5);

FlatPoly var(int v, unsigned e = 1) { return FlatPoly::variable(v, e); }
FlatPoly cst(const Rational& c) { return FlatPoly::constant(c); }

// substitute q for variable v
FlatPoly compose(const FlatPoly& p, int v, const FlatPoly& q) {
  FlatPoly out, qpow = cst(1);
  unsigned at = 0;
  for (const auto& [e, part] : p.split_by(v)) {
    while (at < e) qpow *= q, ++at;
    out += part * qpow;
  }
  return out;
}

std::string join(const std::vector<long>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s + "}";
}

bool single_degree(const FlatPoly& p, const std::vector<int>& w, long want, std::string& seen) {
  auto ds = p.degrees(w);
  seen = join(ds);
  return ds.size() == 1 && ds[0] == want;
}

}  // namespace

PolyContext::PolyContext(int depth) : depth_(depth) {}

int PolyContext::lyndon_var(const Word& l) {
  auto it = index_.find(l);
  if (it != index_.end()) return it->second;
  if (static_cast<int>(lyndon_.size()) >= kMaxLyndon) throw std::overflow_error("too many Lyndon variables for packed layout");
  const int idx = kFirstLyndon + static_cast<int>(lyndon_.size());
  lyndon_.push_back(l);
  index_.emplace(l, idx);
  return idx;
}

FlatPoly PolyContext::from_lyndon(const LyndonPoly& p) {
  FlatPoly out;
  for (const auto& [mono, c] : p.terms()) {
    FlatMono m;
    for (const auto& [l, e] : mono.factors()) m.set(lyndon_var(l), e);
    out += FlatPoly::monomial(m, c);
  }
  return out;
}

const FlatPoly& PolyContext::f(const Word& w) {
  auto it = f_.find(w);
  if (it != f_.end()) return it->second;
  auto lp = to_lyndon_poly(ShuffleElem::word(w), depth_, &global_conversion_cache());
  return f_.emplace(w, from_lyndon(lp)).first->second;
}

std::vector<int> PolyContext::pl_weights() const {
  std::vector<int> w(FlatMono::kVars, 0);
  w[kLog] = 1;
  for (int n = 1; n < kPL; ++n) w[li(n)] = n;
  return w;
}

std::vector<int> PolyContext::word_weights() const {
  std::vector<int> w(FlatMono::kVars, 0);
  for (std::size_t i = 0; i < lyndon_.size(); ++i) w[kFirstLyndon + i] = static_cast<int>(lyndon_[i].degree());
  return w;
}

std::map<PLMonomial, LyndonPoly> PolyContext::to_pl_poly(const FlatPoly& p) const {
  std::map<PLMonomial, LyndonPoly> out;
  for (const auto& t : p.terms()) {
    std::vector<PLMonomial::Factor> pl;
    std::vector<LyndonMonomial::Factor> ly;
    for (int v = 0; v < FlatMono::kVars; ++v) {
      const unsigned e = t.m.exp(v);
      if (!e) continue;
      if (v < kPL) {
        pl.emplace_back(PLVar{v}, e);
      } else if (v >= kFirstLyndon && v < kFirstLyndon + static_cast<int>(lyndon_.size())) {
        ly.emplace_back(lyndon_[v - kFirstLyndon], e);
      } else {
        throw std::invalid_argument("polynomial still depends on X");
      }
    }
    std::sort(ly.begin(), ly.end());
    out[PLMonomial::from_factors(std::move(pl))].add_term(LyndonMonomial::from_factors(std::move(ly)), p.coeff(t));
  }
  return out;
}

FlatPoly PolyContext::from_pl_poly(const std::map<PLMonomial, LyndonPoly>& p) {
  FlatPoly out;
  for (const auto& [m, c] : p) {
    FlatMono pm;
    for (const auto& [x, e] : m.factors()) {
      if (x.index >= kPL) throw std::invalid_argument("PL variable beyond Li6");
      pm.set(x.index, e);
    }
    out += FlatPoly::monomial(pm, 1) * from_lyndon(c);
  }
  return out;
}

std::vector<Rational> PolyContext::lyndon_values(const LyndonPoint& x) const {
  std::vector<Rational> vals(FlatMono::kVars, Rational(0));
  for (std::size_t i = 0; i < lyndon_.size(); ++i) {
    auto it = x.find(lyndon_[i]);
    if (it == x.end()) throw std::invalid_argument("no value for Lyndon variable " + lyndon_var_name(lyndon_[i]));
    vals[kFirstLyndon + i] = it->second;
  }
  return vals;
}

int NuPoly::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    if (!coeffs[k].is_zero()) return k;
  }
  return -1;
}

std::vector<FlatPoly> NuPoly::descending() const {
  const int n = degree();
  std::vector<FlatPoly> out;
  for (int k = n; k >= 0; --k) out.push_back(coeffs[k]);
  return out;
}

NuPoly split_x(const FlatPoly& p, int xvar) {
  NuPoly nu;
  for (auto& [e, part] : p.split_by(xvar)) {
    if (nu.coeffs.size() <= e) nu.coeffs.resize(e + 1);
    nu.coeffs[e] = part;
  }
  return nu;
}

FlatPoly f22_poly() { return var(li(2)) - (var(kLog) * var(li(1))).scaled(Rational(1, 2)); }

namespace {

// the pieces shared by both closed forms
struct Common {
  FlatPoly fp, fq, fs3, fs5, fqp, L, A, B, X, LOG;
};

Common common(PolyContext& ctx) {
  Common c;
  auto F = [&](std::initializer_list<Generator> g) { return ctx.f(Word(g)); };
  c.X = var(kX);
  c.LOG = var(kLog);
  c.fp = F({P});
  c.fq = F({Q});
  c.fs3 = F({S3});
  c.fs5 = F({S5});
  c.fqp = F({Q, P}) - F({P, Q});
  c.L = c.LOG - c.fp * c.X;
  // Delta Phi_e1^p and f_q Delta Phi_e1^q after substituting the closed forms
  c.A = (c.fqp * var(li(1)) * c.X).scaled(Rational(1, 2)) - c.fq * f22_poly();
  c.B = (F({P, P, Q}) - F({Q, P, P})) * var(li(1)) * c.X + c.fp * c.fq * var(li(2)) - F({P, Q}) * c.LOG * var(li(1));
  return c;
}

Generator tsel(int k, unsigned mask, int first) { return (mask >> (k - first)) & 1 ? P : Q; }

}  // namespace

NuPoly build_nu4(PolyContext& ctx) {
  auto F = [&](std::initializer_list<Generator> g) { return ctx.f(Word(g)); };
  const Common c = common(ctx);
  const FlatPoly half = cst(Rational(1, 2));
  FlatPoly r = -(half * c.fq.pow(4) * c.fs3 * c.fqp * c.LOG * var(li(4)));
  r += half * c.fq.pow(3) * F({S3, Q}) * c.fqp * c.LOG.pow(2) * var(li(3));
  r += half * c.fq.pow(3) * c.fqp * (F({S3, P}) * c.fq - F({S3, Q}) * c.fp) * c.LOG * var(li(3)) * c.X;
  // I ranges over subsets of {2,3,4}; tau_k = p for k in I
  for (unsigned mask = 0; mask < 8; ++mask) {
    const int i = std::popcount(mask);
    const Generator t2 = tsel(2, mask, 2), t3 = tsel(3, mask, 2), t4 = tsel(4, mask, 2);
    const FlatPoly c1 = F({P, t2, t3, t4}) * c.fs3 - F({P, t3, t4}) * F({S3, t2});
    const FlatPoly c2 = F({Q, t2, t3, t4}) * c.fs3 - F({Q, t3, t4}) * F({S3, t2});
    const FlatPoly inner = c.fq.pow(i + 1) * c1 * c.A + c.fq.pow(i) * c2 * c.B;
    r += inner * c.X.pow(i) * c.L.pow(3 - i);
  }
  return split_x(r);
}

NuPoly build_nu6(PolyContext& ctx) {
  auto F = [&](std::initializer_list<Generator> g) { return ctx.f(Word(g)); };
  auto Fw = [&](const std::vector<Generator>& g) { return ctx.f(Word(g)); };
  const Common c = common(ctx);
  const FlatPoly half = cst(Rational(1, 2));
  FlatPoly r = -(half * c.fq.pow(6) * c.fs3 * c.fs5 * c.fqp * c.LOG * var(li(6)));
  r += half * c.fq.pow(5) * c.fs3 * F({S5, Q}) * c.fqp * c.LOG.pow(2) * var(li(5));
  r += half * c.fq.pow(5) * c.fs3 * c.fqp * (F({S5, P}) * c.fq - F({S5, Q}) * c.fp) * c.LOG * var(li(5)) * c.X;
  // J ranges over subsets of {4,5,6}
  for (unsigned mask = 0; mask < 8; ++mask) {
    const int j = std::popcount(mask);
    const Generator t4 = tsel(4, mask, 4), t5 = tsel(5, mask, 4), t6 = tsel(6, mask, 4);
    const FlatPoly k = F({S3, t4, t5, t6}) * c.fs5 - F({S3, t4, t5}) * F({S5, t6});
    r += half * c.fq.pow(3 + j) * c.fqp * k * c.LOG * var(li(3)) * c.X.pow(j) * c.L.pow(3 - j);
  }
  // I ranges over subsets of {2,...,6}
  for (unsigned mask = 0; mask < 32; ++mask) {
    const int i = std::popcount(mask);
    std::vector<Generator> t(7, Q);
    for (int k = 2; k <= 6; ++k) t[k] = tsel(k, mask, 2);
    auto coef = [&](Generator h) {
      FlatPoly x = F({h, t[2], t[3]}) * F({S3, t[4], t[5]}) * F({S5, t[6]});
      x -= Fw({h, t[2], t[3], t[4], t[5]}) * c.fs3 * F({S5, t[6]});
      x -= F({h, t[2], t[3]}) * F({S3, t[4], t[5], t[6]}) * c.fs5;
      x += Fw({h, t[2], t[3], t[4], t[5], t[6]}) * c.fs3 * c.fs5;
      return x;
    };
    const FlatPoly inner = c.fq.pow(i + 1) * coef(P) * c.A + c.fq.pow(i) * coef(Q) * c.B;
    r += inner * c.X.pow(i) * c.L.pow(5 - i);
  }
  return split_x(r);
}

FlatPoly sylvester_resultant(const NuPoly& f, const NuPoly& g) {
  if (f.degree() < 0 || g.degree() < 0) throw std::invalid_argument("not of stated degree");
  return sylvester_resultant(f.descending(), g.descending(), cst(1));
}

FlatPoly extract_f618(const FlatPoly& resultant, FlatPoly* stripped) {
  auto s = resultant.divide_var(kLog, 6);
  if (!s) throw std::runtime_error("factorization claim violated: log^6 does not divide the resultant");
  if (stripped) *stripped = *s;
  auto q = divide_linear(*s, li(2), (var(kLog) * var(li(1))).scaled(Rational(1, 2)));
  if (!q) throw std::runtime_error("factorization claim violated: F22 does not divide the resultant");
  return *q;
}

void Report::add(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

void Report::append(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }

bool Report::ok() const {
  for (const auto& c : checks) {
    if (!c.ok) return false;
  }
  return true;
}

namespace {

using PhiS = PhiPoly<ShuffleElem>;

ShuffleElem fw(std::initializer_list<Generator> g) { return ShuffleElem::word(Word(g)); }
PhiS phi(PhiVar v) { return PhiS::variable(v, ShuffleElem::one()); }

}  // namespace

PhiS delta_matrix_det() {
  const auto Pp = phi(PhiVar::e0(1)), Pq = phi(PhiVar::e0(2));
  return (Pp.scaled(fw({Q, P})) + Pq.scaled(fw({Q, Q}))).scaled(fw({P})) -
         (Pp.scaled(fw({P, P})) + Pq.scaled(fw({P, Q}))).scaled(fw({Q}));
}

PhiS delta_phi_e1_p_adjugate() {
  auto im = theta_images(2, 2);
  const auto Pp = phi(PhiVar::e0(1)), Pq = phi(PhiVar::e0(2));
  return (Pp.scaled(fw({Q, P})) + Pq.scaled(fw({Q, Q}))) * (*im)[PLVar::li(1)] - (*im)[PLVar::li(2)].scaled(fw({Q}));
}

PhiS delta_phi_e1_q_adjugate() {
  auto im = theta_images(2, 2);
  const auto Pp = phi(PhiVar::e0(1)), Pq = phi(PhiVar::e0(2));
  return (*im)[PLVar::li(2)].scaled(fw({P})) - (Pp.scaled(fw({P, P})) + Pq.scaled(fw({P, Q}))) * (*im)[PLVar::li(1)];
}

Report verify_lemmas() {
  Report rep;
  auto im = theta_images(2, 2);
  const auto& tlog = (*im)[PLVar::log()];
  const auto& tli1 = (*im)[PLVar::li(1)];
  const auto& tli2 = (*im)[PLVar::li(2)];
  const ShuffleElem fqp = fw({Q, P}) - fw({P, Q});
  const ShuffleElem half_fqp = fqp * Rational(1, 2);
  const auto Pp = phi(PhiVar::e0(1));
  const auto delta = delta_matrix_det();
  const PhiS tf22 = tli2 - (tlog * tli1).scaled(ShuffleElem(Rational(1, 2)));

  rep.add("Delta = 1/2 f[q,p] theta(log)", delta == tlog.scaled(half_fqp));

  // Cramer: the adjugate expressions equal Delta times the unknowns
  const auto e1p = phi(PhiVar::e1(1)), e1q = phi(PhiVar::e1(2));
  rep.add("Cramer: Delta Phi_e1^p from the adjugate", delta * e1p == delta_phi_e1_p_adjugate());
  rep.add("Cramer: Delta Phi_e1^q from the adjugate", delta * e1q == delta_phi_e1_q_adjugate());

  const PhiS rhs_a = (tli1 * Pp).scaled(half_fqp) - tf22.scaled(fw({Q}));
  rep.add("Delta Phi_e1^p in closed form", delta * e1p == rhs_a);

  const PhiS rhs_b = (tli1 * Pp).scaled(fw({P, P, Q}) - fw({Q, P, P})) + tli2.scaled(fw({P}) * fw({Q})) -
                     (tlog * tli1).scaled(fw({P, Q}));
  rep.add("f_q Delta Phi_e1^q in closed form", (delta * e1q).scaled(fw({Q})) == rhs_b);
  return rep;
}

Report verify_sigma_elimination() {
  Report rep;
  auto im = theta_images(2, 5);
  auto e0 = [&](Generator t) { return phi(PhiVar::e0(t.index())); };
  auto e1 = [&](Generator t) { return phi(PhiVar::e1(t.index())); };
  const Generator T[2] = {P, Q};

  // f_s3 Phi^s3 = theta(Li3) - sum f_{t1t2t3} Phi_e1 Phi_e0 Phi_e0
  PhiS rhs3 = (*im)[PLVar::li(3)];
  for (auto a : T)
    for (auto b : T)
      for (auto c : T) rhs3 -= (e1(a) * e0(b) * e0(c)).scaled(fw({a, b, c}));
  rep.add("sigma3 elimination", phi(PhiVar::sigma(3)).scaled(fw({S3})) == rhs3);

  // f_s3 f_s5 Phi^s5 with Phi^s3 already eliminated
  PhiS rhs5 = (*im)[PLVar::li(5)].scaled(fw({S3}));
  for (auto a : T)
    for (auto b : T) rhs5 -= ((*im)[PLVar::li(3)] * e0(a) * e0(b)).scaled(fw({S3, a, b}));
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::vector<Generator> t(5, Q);
    for (int k = 0; k < 5; ++k) t[k] = (mask >> k) & 1 ? P : Q;
    const ShuffleElem k = fw({t[0], t[1], t[2]}) * fw({S3, t[3], t[4]}) -
                          ShuffleElem::word(Word({t[0], t[1], t[2], t[3], t[4]})) * fw({S3});
    rhs5 += (e1(t[0]) * e0(t[1]) * e0(t[2]) * e0(t[3]) * e0(t[4])).scaled(k);
  }
  rep.add("sigma5 elimination", phi(PhiVar::sigma(5)).scaled(fw({S3}) * fw({S5})) == rhs5);
  return rep;
}

Rational evaluate_phi(const PhiPoly<LyndonPoly>& p, const LyndonPoint& x, const std::map<PhiVar, Rational>& phi) {
  Rational total = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational t = evaluate(c, x);
    if (sgn(t) == 0) continue;
    for (const auto& [v, e] : m.factors()) {
      Rational pw;
      mpz_pow_ui(pw.get_num_mpz_t(), phi.at(v).get_num_mpz_t(), e);
      mpz_pow_ui(pw.get_den_mpz_t(), phi.at(v).get_den_mpz_t(), e);
      t *= pw;
    }
    total += t;
  }
  return total;
}

namespace {

Rational random_rational(Rng& rng) {
  std::int64_t n = 0;
  while (n == 0) n = rng.uniform_signed(-1000, 1000);
  Rational r(static_cast<long>(n), static_cast<unsigned long>(rng.uniform(1, 97)));
  r.canonicalize();
  return r;
}

}  // namespace

ThetaSample sample_theta(int depth, const std::vector<Word>& extra_vars, std::uint64_t seed) {
  auto im = theta_images_lyndon(2, depth);
  std::set<Word> vars = lyndon_variables(*im);
  vars.insert(extra_vars.begin(), extra_vars.end());
  Rng rng(mix64(seed ^ 0x7468657461ULL));
  ThetaSample s;
  for (const auto& w : vars) s.lyndon.emplace(w, random_rational(rng));
  for (const auto& v : phi_variables(2, depth)) s.phi.emplace(v, random_rational(rng));
  for (int k = 0; k <= depth; ++k) s.pl.push_back(evaluate_phi((*im)[PLVar{k}], s.lyndon, s.phi));
  return s;
}

namespace {

std::vector<Rational> sample_values(PolyContext& ctx, const ThetaSample& s) {
  auto vals = ctx.lyndon_values(s.lyndon);
  for (int k = 0; k < kPL && k < static_cast<int>(s.pl.size()); ++k) vals[k] = s.pl[k];
  vals[kX] = s.phi.at(PhiVar::e0(1));
  return vals;
}

Rational eval_nu(const NuPoly& nu, const std::vector<Rational>& vals) {
  Rational total = 0, xp = 1;
  for (const auto& c : nu.coeffs) {
    total += c.evaluate(vals) * xp;
    xp *= vals[kX];
  }
  return total;
}

// flip the sign of one term of the coefficient of X^k
NuPoly mutate(const NuPoly& nu, int k) {
  NuPoly m = nu;
  const auto& c = m.coeffs.at(k);
  if (c.is_zero()) throw std::logic_error("cannot mutate a zero coefficient");
  const auto& t = c.terms().front();
  m.coeffs[k] = c - FlatPoly::monomial(t.m, c.coeff(t)).scaled(2);
  return m;
}

std::string witness(std::uint64_t seed, int trial, const Rational& v) {
  return "seed=" + std::to_string(seed) + " trial=" + std::to_string(trial) + " value=" + to_string(v);
}

}  // namespace

Report verify_nu_roots(PolyContext& ctx, const NuPoly& nu4, const NuPoly& nu6, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  Report rep;
  const NuPoly bad4 = mutate(nu4, 1);
  bool ok4 = true, ok6 = true, caught = false;
  std::string w4, w6;
  for (int t = 0; t < trials; ++t) {
    const auto s = sample_theta(6, ctx.lyndon_vars(), mix64(seed + t));
    const auto vals = sample_values(ctx, s);
    const Rational p4 = eval_nu(nu4, vals), p6 = eval_nu(nu6, vals);
    if (sgn(p4) != 0 && ok4) ok4 = false, w4 = witness(seed, t, p4);
    if (sgn(p6) != 0 && ok6) ok6 = false, w6 = witness(seed, t, p6);
    if (sgn(eval_nu(bad4, vals)) != 0) caught = true;
  }
  const std::string n = std::to_string(trials) + " trials";
  rep.add("P4(Phi_e0^p) = 0", ok4, ok4 ? n : w4);
  rep.add("P6(Phi_e0^p) = 0", ok6, ok6 ? n : w6);
  rep.add("mutation control: perturbed nu4 is detected", caught);
  return rep;
}

Report verify_elimination_identities(PolyContext& ctx, const NuPoly& nu4, const NuPoly& nu6, int trials,
                                     std::uint64_t seed) {
  Report rep = verify_lemmas();
  rep.append(verify_sigma_elimination());
  rep.append(verify_nu_roots(ctx, nu4, nu6, trials, seed));
  return rep;
}

Report verify_structure(PolyContext& ctx, const NuPoly& nu4, const NuPoly& nu6) {
  Report rep;
  const auto plw = ctx.pl_weights(), ww = ctx.word_weights();
  const FlatPoly half = cst(Rational(1, 2)), LOG = var(kLog);
  auto F = [&](std::initializer_list<Generator> g) { return ctx.f(Word(g)); };
  const FlatPoly fq = F({Q}), fs3 = F({S3}), fs5 = F({S5}), fqp = F({Q, P}) - F({P, Q});
  const FlatPoly c22 = (var(kLog) * var(li(1))).scaled(Rational(1, 2));

  rep.add("deg_X nu4 = 2", nu4.degree() == 2, std::to_string(nu4.degree()));
  rep.add("deg_X nu6 = 4", nu6.degree() == 4, std::to_string(nu6.degree()));

  auto check_coeffs = [&](const NuPoly& nu, char name, int top) {
    for (int k = nu.degree(); k >= 0; --k) {
      const int idx = top - k;
      const std::string lbl = std::string(1, name) + std::to_string(idx);
      const FlatPoly& a = nu.coeffs[k];
      std::string seen;
      bool ok = single_degree(a, plw, idx, seen);
      rep.add(lbl + " PL-degree " + std::to_string(idx), ok, seen);
      const long wd = (name == 'a' ? 14 : 23) - idx;
      ok = single_degree(a, ww, wd, seen);
      rep.add(lbl + " word-degree " + std::to_string(wd), ok, seen);
      rep.add(lbl + " divisible by log", a.divide_var(kLog, 1).has_value());
    }
  };
  check_coeffs(nu4, 'a', 5);
  check_coeffs(nu6, 'b', 7);
  if (nu4.degree() != 2 || nu6.degree() != 4) return rep;

  const FlatPoly &a3 = nu4.coeffs[2], &a4 = nu4.coeffs[1], &a5 = nu4.coeffs[0];
  const FlatPoly& b3 = nu6.coeffs[4];
  const FlatPoly& b7 = nu6.coeffs[0];
  auto a3p = a3.divide_var(kLog, 1), b3p = b3.divide_var(kLog, 1);
  rep.add("a3' divisible by F22", a3p && divide_linear(*a3p, li(2), c22).has_value());
  rep.add("b3' divisible by F22", b3p && divide_linear(*b3p, li(2), c22).has_value());
  rep.add("a3, a4 free of Li4", a3.degree_in(li(4)) == 0 && a4.degree_in(li(4)) == 0);
  const FlatPoly li4_term = -(half * fq.pow(4) * fs3 * fqp * LOG * var(li(4)));
  rep.add("Li4 part of a5", a5.filter_exp(li(4), 1, 255) == li4_term);
  bool no_li6 = true;
  for (int k = 1; k <= 4; ++k) no_li6 = no_li6 && nu6.coeffs[k].degree_in(li(6)) == 0;
  rep.add("b3..b6 free of Li6", no_li6);
  const FlatPoly li6_term = -(half * fq.pow(6) * fs3 * fs5 * fqp * LOG) * var(li(6));
  rep.add("Li6 part of b7", b7.filter_exp(li(6), 1, 255) == li6_term);
  return rep;
}

namespace {

SliceKey slice_key(const FlatMono& m) {
  return {m.exp(li(2)), m.exp(li(3)), m.exp(li(4)), m.exp(li(5)), m.exp(li(6))};
}

std::map<SliceKey, FlatPoly> graded(const FlatPoly& p) {
  std::map<SliceKey, std::vector<FlatPoly::Term>> parts;
  for (const auto& t : p.terms()) parts[slice_key(t.m)].push_back(t);
  std::map<SliceKey, FlatPoly> out;
  for (auto& [k, ts] : parts) out.emplace(k, FlatPoly::from_terms(std::move(ts), p.den()));
  return out;
}

Integer lcm_den(const std::vector<FlatPoly>& ps) {
  Integer l = 1;
  for (const auto& p : ps) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p.den().get_mpz_t());
  return l;
}

PLMonomial pl_head(const FlatMono& m) {
  std::vector<PLMonomial::Factor> f;
  for (int v = 0; v < kPL; ++v) {
    if (m.exp(v)) f.emplace_back(PLVar{v}, m.exp(v));
  }
  return PLMonomial::from_factors(std::move(f));
}

}  // namespace

StreamStats stream_f618(const NuPoly& nu4, const NuPoly& nu6, const std::function<void(const ResultantSlice&)>& sink) {
  const auto t0 = std::chrono::steady_clock::now();
  StreamStats st;
  auto f = nu4.descending(), g = nu6.descending();
  if (f.size() < 2 || g.size() < 2) throw std::invalid_argument("not of stated degree");
  const int m = static_cast<int>(f.size()) - 1, n = static_cast<int>(g.size()) - 1;

  // integer coefficients: Res is homogeneous of degree n in f and m in g
  const Integer Df = lcm_den(f), Dg = lcm_den(g);
  for (auto& x : f) x = x.scaled(Rational(Df));
  for (auto& x : g) x = x.scaled(Rational(Dg));
  Integer scale = 1;
  for (int i = 0; i < n; ++i) scale *= Df;
  for (int i = 0; i < m; ++i) scale *= Dg;

  // Res as a polynomial in symbols standing for the coefficients
  std::vector<FlatPoly> fs, gs;
  for (int i = 0; i <= m; ++i) fs.push_back(var(i));
  for (int j = 0; j <= n; ++j) gs.push_back(var(m + 1 + j));
  const FlatPoly generic = sylvester_resultant(fs, gs, cst(1));

  struct GenTerm {
    Integer c;
    const std::map<SliceKey, FlatPoly>* A;
    const std::map<SliceKey, FlatPoly>* B;
  };
  std::map<std::vector<unsigned>, std::map<SliceKey, FlatPoly>> acache, bcache;
  std::vector<GenTerm> gen;
  for (const auto& t : generic.terms()) {
    std::vector<unsigned> mu, nu;
    FlatPoly A = cst(1), B = cst(1);
    for (int i = 0; i <= m; ++i) {
      mu.push_back(t.m.exp(i));
      if (t.m.exp(i)) A *= f[i].pow(t.m.exp(i));
    }
    for (int j = 0; j <= n; ++j) {
      nu.push_back(t.m.exp(m + 1 + j));
      if (t.m.exp(m + 1 + j)) B *= g[j].pow(t.m.exp(m + 1 + j));
    }
    auto ia = acache.find(mu);
    if (ia == acache.end()) ia = acache.emplace(mu, graded(A)).first;
    auto ib = bcache.find(nu);
    if (ib == bcache.end()) ib = bcache.emplace(nu, graded(B)).first;
    gen.push_back({t.c, &ia->second, &ib->second});
  }

  std::map<std::array<unsigned, 4>, unsigned> top_li2;
  for (const auto& gt : gen) {
    for (const auto& [ka, pa] : *gt.A) {
      for (const auto& [kb, pb] : *gt.B) {
        const std::array<unsigned, 4> K{ka[1] + kb[1], ka[2] + kb[2], ka[3] + kb[3], ka[4] + kb[4]};
        auto& top = top_li2[K];
        top = std::max(top, ka[0] + kb[0]);
      }
    }
  }

  Rational inv_scale(Integer(1), scale);
  inv_scale.canonicalize();
  const FlatPoly c22 = (var(kLog) * var(li(1))).scaled(Rational(1, 2));
  for (const auto& [K, top] : top_li2) {
    FlatPoly q;
    for (unsigned k = top + 1; k-- > 0;) {
      const SliceKey key{k, K[0], K[1], K[2], K[3]};
      std::vector<ProductTerm> prods;
      for (const auto& gt : gen) {
        for (const auto& [ka, pa] : *gt.A) {
          SliceKey kb;
          bool ok = true;
          for (int i = 0; i < 5 && ok; ++i) {
            ok = ka[i] <= key[i];
            kb[i] = key[i] - ka[i];
          }
          if (!ok) continue;
          auto ib = gt.B->find(kb);
          if (ib != gt.B->end()) prods.push_back({gt.c, &pa, &ib->second});
        }
      }
      ResultantSlice sl;
      sl.key = key;
      sl.resultant = sum_of_products(prods).scaled(inv_scale);
      auto stripped = sl.resultant.divide_var(kLog, 6);
      if (!stripped) throw std::runtime_error("factorization claim violated: log^6 does not divide the resultant");
      auto pk = stripped->divide_var(li(2), k);
      if (!pk) throw std::logic_error("slice key mismatch");
      FlatPoly next = *pk + c22 * q;
      if (k > 0) {
        q = std::move(next);
        sl.quotient = q.times_var(li(2), k - 1);
      } else if (!next.is_zero()) {
        throw std::runtime_error("factorization claim violated: F22 does not divide the resultant");
      }
      ++st.slices;
      st.resultant_terms += sl.resultant.size();
      st.f618_terms += sl.quotient.size();
      st.max_slice_terms = std::max(st.max_slice_terms, sl.resultant.size());
      sink(sl);
    }
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

namespace {

// writes one PLPoly line per PL monomial without materializing the slice
void write_flat_pl(std::ostream& out, const PolyContext& ctx, const FlatPoly& p) {
  std::vector<std::uint32_t> idx(p.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto& T = p.terms();
  auto head_less = [&](std::uint32_t a, std::uint32_t b) {
    for (int v = 0; v < kPL; ++v) {
      if (T[a].m.exp(v) != T[b].m.exp(v)) return T[a].m.exp(v) < T[b].m.exp(v);
    }
    return false;
  };
  std::stable_sort(idx.begin(), idx.end(), head_less);
  std::map<PLMonomial, LyndonPoly> group;
  for (std::size_t lo = 0; lo < idx.size();) {
    std::size_t hi = lo + 1;
    while (hi < idx.size() && !head_less(idx[lo], idx[hi]) && !head_less(idx[hi], idx[lo])) ++hi;
    std::vector<FlatPoly::Term> ts;
    for (std::size_t i = lo; i < hi; ++i) ts.push_back(T[idx[i]]);
    group = ctx.to_pl_poly(FlatPoly::from_terms(std::move(ts), p.den()));
    write_pl_poly_terms(out, group);
    lo = hi;
  }
}

Rational pl_value(const FlatMono& head, const std::vector<Rational>& pl) {
  Rational v = 1;
  for (int k = 0; k < kPL; ++k) {
    for (unsigned e = head.exp(k); e > 0; --e) v *= pl[k];
  }
  return v;
}

}  // namespace

F618Result construct_f618(PolyContext& ctx, const F618Options& opt) {
  F618Result r;
  Report& rep = r.report;
  const NuPoly nu4 = build_nu4(ctx), nu6 = build_nu6(ctx);
  if (nu4.degree() != 2 || nu6.degree() != 4) {
    rep.append(verify_structure(ctx, nu4, nu6));
    return r;
  }
  const auto plw = ctx.pl_weights(), ww = ctx.word_weights();

  // Li6^2 part of the resultant must be a3^4 (Li6 coefficient of b7)^2 Li6^2
  const FlatPoly li6c = nu6.coeffs[0].filter_exp(li(6), 1, 1).divide_var(li(6), 1).value_or(FlatPoly());
  auto expected_sq = graded(nu4.coeffs[2].pow(4) * li6c.pow(2) * var(li(6), 2));
  std::set<SliceKey> sq_seen;
  bool sq_ok = true;

  std::set<long> res_pl, res_word, f_pl, f_word;
  bool li6_sq = false;
  unsigned f_depth = 0;

  // (a) random rational points
  std::vector<ThetaSample> samples;
  std::vector<std::vector<Rational>> svals;
  for (int t = 0; t < opt.trials; ++t) {
    samples.push_back(sample_theta(6, ctx.lyndon_vars(), mix64(opt.seed + 0x1000 + t)));
    svals.push_back(sample_values(ctx, samples.back()));
  }
  std::vector<Rational> fval(opt.trials, Rational(0)), flip(opt.trials, Rational(0));
  bool flip_set = false;

  // (b) integer points
  const auto cols = pl_monomials(6, 18);
  std::map<PLMonomial, std::size_t> col_index;
  for (std::size_t i = 0; i < cols.size(); ++i) col_index.emplace(cols[i], i);
  std::set<Word> vars = lyndon_variables(*theta_images_lyndon(2, 6));
  vars.insert(ctx.lyndon_vars().begin(), ctx.lyndon_vars().end());
  std::vector<LyndonPoint> xs;
  std::vector<std::vector<Rational>> xvals, colvec;
  for (int k = 0; k < opt.points; ++k) {
    xs.push_back(sample_point(vars, mix64(opt.seed * 0x9e3779b97f4a7c15ULL + 0x51 + k)));
    xvals.push_back(ctx.lyndon_values(xs.back()));
    colvec.emplace_back(cols.size(), Rational(0));
  }
  bool in_basis = true;

  if (opt.out) write_pl_poly_header(*opt.out, 2, 6, 18);
  std::string err;
  StreamStats st;
  try {
    st = stream_f618(nu4, nu6, [&](const ResultantSlice& sl) {
      for (long d : sl.resultant.degrees(plw)) res_pl.insert(d);
      for (long d : sl.resultant.degrees(ww)) res_word.insert(d);
      if (sl.key[4] == 2) {
        auto it = expected_sq.find(sl.key);
        sq_ok = sq_ok && (it == expected_sq.end() ? sl.resultant.is_zero() : sl.resultant == it->second);
        sq_seen.insert(sl.key);
      }
      const FlatPoly& q = sl.quotient;
      if (q.is_zero()) return;
      for (long d : q.degrees(plw)) f_pl.insert(d);
      for (long d : q.degrees(ww)) f_word.insert(d);
      f_depth = std::max(f_depth, q.degree_in(li(6)) ? 6u : 0u);
      for (int k = 5; k >= 1 && !f_depth; --k) {
        if (q.degree_in(li(k))) f_depth = std::max<unsigned>(f_depth, k);
      }
      if (q.degree_in(li(6)) >= 2) li6_sq = true;
      if (opt.out) write_flat_pl(*opt.out, ctx, q);
      if (!svals.empty()) {
        for (const auto& [head, vals] : evaluate_tail(q, kPL, svals)) {
          for (int t = 0; t < opt.trials; ++t) fval[t] += pl_value(head, samples[t].pl) * vals[t];
        }
        if (!flip_set) {
          const auto& t0 = q.terms().front();
          const FlatPoly one_term = FlatPoly::monomial(t0.m, q.coeff(t0));
          for (int t = 0; t < opt.trials; ++t) flip[t] = 2 * one_term.evaluate(svals[t]);
          flip_set = true;
        }
      }
      if (!xvals.empty()) {
        for (const auto& [head, vals] : evaluate_tail(q, kPL, xvals)) {
          auto it = col_index.find(pl_head(head));
          if (it == col_index.end()) {
            in_basis = false;
            continue;
          }
          for (int k = 0; k < opt.points; ++k) colvec[k][it->second] += vals[k];
        }
      }
    });
  } catch (const std::runtime_error& e) {
    err = e.what();
  }
  r.stats = st;
  rep.append(verify_structure(ctx, nu4, nu6));
  rep.add("exact division by log^6 F22", err.empty(), err);
  if (!err.empty()) return r;

  auto set_str = [](const std::set<long>& s) { return join(std::vector<long>(s.begin(), s.end())); };
  auto is_single = [](const std::set<long>& s, long v) { return s.size() == 1 && *s.begin() == v; };
  rep.add("resultant PL-degree 26", is_single(res_pl, 26), set_str(res_pl));
  rep.add("resultant word-degree 76", is_single(res_word, 76), set_str(res_word));
  for (const auto& [k, p] : expected_sq) sq_ok = sq_ok && (sq_seen.count(k) || p.is_zero());
  rep.add("Li6^2 part of the resultant", sq_ok);
  rep.add("F618 nonzero", st.f618_terms > 0, std::to_string(st.f618_terms) + " terms");
  rep.add("F618 PL-degree 18", is_single(f_pl, 18), set_str(f_pl));
  rep.add("F618 word-degree 76", is_single(f_word, 76), set_str(f_word));
  rep.add("F618 depth 6", f_depth == 6, std::to_string(f_depth));
  rep.add("F618 has a Li6^2 part", li6_sq);

  if (opt.trials > 0) {
    bool zero = true, commute = true, caught = false;
    std::string wz, wc;
    const auto f4 = nu4.descending(), f6 = nu6.descending();
    for (int t = 0; t < opt.trials; ++t) {
      if (sgn(fval[t]) != 0 && zero) zero = false, wz = witness(opt.seed, t, fval[t]);
      if (sgn(fval[t] - flip[t]) != 0) caught = true;
      // theta(Res) through the verified factorization log^6 F22 F618
      const auto& pl = samples[t].pl;
      Rational lhs = pl[0] * pl[0] * pl[0];
      lhs *= lhs;
      lhs *= (pl[2] - pl[0] * pl[1] / 2) * fval[t];
      std::vector<Rational> n4, n6;
      for (const auto& x : f4) n4.push_back(x.evaluate(svals[t]));
      for (const auto& x : f6) n6.push_back(x.evaluate(svals[t]));
      const Rational rhs = sylvester_resultant(n4, n6, Rational(1));
      if (lhs != rhs && commute) commute = false, wc = witness(opt.seed, t, lhs - rhs);
    }
    const std::string n = std::to_string(opt.trials) + " trials";
    rep.add("theta(F618) = 0 at random rational points", zero, zero ? n : wz);
    rep.add("theta(Res(nu4,nu6)) = Res(theta nu4, theta nu6)", commute, commute ? n : wc);
    rep.add("mutation control: perturbed F618 is detected", caught);
  }

  for (int k = 0; k < opt.points; ++k) {
    const auto M = specialized_matrix(2, 6, 18, xs[k]);
    const auto& vec = colvec[k];
    bool nonzero = false;
    for (const auto& q : vec) nonzero = nonzero || sgn(q) != 0;
    bool annihilated = true;
    for (const auto& q : M.multiply(vec)) annihilated = annihilated && sgn(q) == 0;
    Rng rng(mix64(opt.seed + 0x77 + k));
    std::size_t rk = 0;
    for (int attempt = 0; attempt < 3 && rk + 1 != cols.size(); ++attempt) {
      rk = std::max(rk, rank_mod_p(M, random_prime_62(rng)));
    }
    const bool ok_b = in_basis && nonzero && annihilated && rk + 1 == cols.size();
    std::ostringstream d;
    d << "x_hash=" << point_hash(xs[k]) << " rows=" << M.rows() << " cols=" << M.cols() << " rank_mod_p=" << rk
      << " in_kernel=" << annihilated << " nonzero=" << nonzero;
    rep.add("F618(x) spans ker M(x), point " + std::to_string(k + 1), ok_b, d.str());
  }
  return r;
}

void write_pl_poly_header(std::ostream& out, int s, int d, long v) {
  out << "%%CKPoly v1 s=" << s << " d=" << d << " v=" << v << "\n";
}

void write_pl_poly_terms(std::ostream& out, const std::map<PLMonomial, LyndonPoly>& p) {
  for (const auto& [m, c] : p) {
    if (!c.is_zero()) out << to_string(m) << '\t' << to_string(c) << '\n';
  }
}

void write_pl_poly(std::ostream& out, const std::map<PLMonomial, LyndonPoly>& p, int s, int d, long v) {
  write_pl_poly_header(out, s, d, v);
  write_pl_poly_terms(out, p);
}

std::map<PLMonomial, LyndonPoly> read_pl_poly(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%CKPoly v1", 0) != 0) throw std::runtime_error("not a CKPoly v1 file");
  std::map<PLMonomial, LyndonPoly> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("malformed CKPoly line: " + line);
    out[parse_pl_monomial(std::string_view(line).substr(0, tab))] += parse_lyndon_poly(std::string_view(line).substr(tab + 1));
  }
  return out;
}

GeneralNu build_general_nu(int d, std::uint64_t seed) {
  if (d < 2 || d > 5) throw std::invalid_argument("experimental builder supports 2 <= d <= 5");
  const int N = 2 * d;
  const int kXg = N + 1, kYq = N + 2, kZp = N + 3, kZq = N + 4;
  auto S = [&](int m) { return N + 5 + (m - 3) / 2; };

  GeneralNu g;
  g.d = d;
  auto im = theta_images_lyndon(2, N);
  g.point = sample_point(lyndon_variables(*im), seed);
  auto fv = [&](std::initializer_list<Generator> w) {
    return evaluate(to_lyndon_poly(ShuffleElem::word(Word(w)), N, &global_conversion_cache()), g.point);
  };

  auto index_of = [&](const PhiVar& v) {
    if (v.rho.kind() == GeneratorKind::Sigma) return S(v.rho.degree());
    const bool p = v.rho.index() == 1;
    return v.lambda == Lambda::E0 ? (p ? kXg : kYq) : (p ? kZp : kZq);
  };
  auto image = [&](int k) {
    FlatPoly out;
    for (const auto& [m, c] : (*im)[PLVar{k}].terms()) {
      FlatMono fm;
      for (const auto& [v, e] : m.factors()) fm.set(index_of(v), e);
      out += FlatPoly::monomial(fm, evaluate(c, g.point));
    }
    return out;
  };

  // eq = 0 on the cocycle locus; eliminate Phi^sigma from the top down
  FlatPoly eq = image(N) - var(li(N));
  for (int m = N - 1; m >= 3; m -= 2) {
    const FlatPoly rel = image(m) - var(li(m));
    auto rp = rel.split_by(S(m));
    const FlatPoly& fs = rp.at(1);
    if (fs.degree_in(kXg) || fs.size() != 1 || fs.terms().front().m.max_exp() != 0)
      throw std::logic_error("sigma coefficient is not a scalar");
    const Rational fsig = fs.coeff(fs.terms().front());
    auto ep = eq.split_by(S(m));
    FlatPoly next = ep.count(0) ? ep.at(0) : FlatPoly();
    if (ep.count(1)) next -= ep.at(1) * (rp.count(0) ? rp.at(0) : FlatPoly()).scaled(1 / fsig);
    eq = next;
  }

  const Rational fp = fv({P}), fq = fv({Q}), fqp = fv({Q, P}) - fv({P, Q});
  auto zp = eq.split_by(kZp);
  FlatPoly up = zp.count(1) ? zp.at(1) : FlatPoly();
  auto zq = (zp.count(0) ? zp.at(0) : FlatPoly()).split_by(kZq);
  FlatPoly uq = zq.count(1) ? zq.at(1) : FlatPoly();
  FlatPoly w = zq.count(0) ? zq.at(0) : FlatPoly();

  const FlatPoly X = var(kXg), LOG = var(kLog), L1 = var(li(1)), L2 = var(li(2));
  const FlatPoly delta = LOG.scaled(fqp / 2);
  const FlatPoly dzp = (L1 * X).scaled(fqp / 2) - (L2 - (LOG * L1).scaled(Rational(1, 2))).scaled(fq);
  const FlatPoly dzq = ((L1 * X).scaled(fv({P, P, Q}) - fv({Q, P, P})) + L2.scaled(fp * fq) -
                        (LOG * L1).scaled(fv({P, Q})))
                           .scaled(1 / fq);
  FlatPoly res = up * dzp + uq * dzq + delta * w;
  res = compose(res, kYq, (LOG - X.scaled(fp)).scaled(1 / fq));
  Rational scale = 1;
  for (int k = 0; k < N; ++k) scale *= fq;
  for (int m = 3; m < N; m += 2) scale *= fv({Generator::sigma(m)});
  g.nu = split_x(res.scaled(scale), kXg);

  const int deg = g.nu.degree();
  if (deg >= 0) {
    auto lead = g.nu.coeffs[deg].divide_var(kLog, 1);
    if (lead) g.leading_divisible_by_f22 = divide_linear(*lead, li(2), (LOG * L1).scaled(Rational(1, 2))).has_value();
  }
  return g;
}

Report verify_general_nu(const GeneralNu& g, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  const int N = 2 * g.d;
  auto im = specialize_images(*theta_images_lyndon(2, N), g.point);
  bool ok = true;
  std::string wit;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix64(seed + 0x2000 + t));
    std::map<PhiVar, Rational> phi;
    for (const auto& v : phi_variables(2, N)) phi.emplace(v, random_rational(rng));
    std::vector<Rational> vals(FlatMono::kVars, Rational(0));
    for (int k = 0; k <= N; ++k) {
      Rational tot = 0;
      for (const auto& [m, c] : im[PLVar{k}].terms()) {
        Rational x = c;
        for (const auto& [v, e] : m.factors()) {
          for (unsigned i = 0; i < e; ++i) x *= phi.at(v);
        }
        tot += x;
      }
      vals[k] = tot;
    }
    vals[N + 1] = phi.at(PhiVar::e0(1));
    Rational total = 0, xp = 1;
    for (const auto& c : g.nu.coeffs) {
      total += c.evaluate(vals) * xp;
      xp *= vals[N + 1];
    }
    if (sgn(total) != 0 && ok) ok = false, wit = witness(seed, t, total);
  }
  Report rep;
  rep.add("P" + std::to_string(N) + "(Phi_e0^p) = 0", ok, ok ? std::to_string(trials) + " trials" : wit);
  rep.add("nu" + std::to_string(N) + " nonzero", g.nu.degree() >= 0);
  return rep;
}

}  // namespace ckforge
