#include "ckforge/theta.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

namespace ckforge {

std::string PhiVar::name() const {
  switch (lambda) {
    case Lambda::E0:
      return "Phi[" + rho.name() + ":e0]";
    case Lambda::E1:
      return "Phi[" + rho.name() + ":e1]";
    case Lambda::E1E0:
      break;
  }
  return "Phi[" + rho.name() + ":e1e0^" + std::to_string(rho.degree() - 1) + "]";
}

std::string to_string(const PLMonomial& m) {
  return m.to_string([](const PLVar& x) { return x.name(); });
}

std::string to_string(const PhiMonomial& m) {
  return m.to_string([](const PhiVar& x) { return x.name(); });
}

PLMonomial parse_pl_monomial(std::string_view text) {
  std::vector<PLMonomial::Factor> factors;
  if (text == "1") return PLMonomial();
  std::size_t start = 0;
  while (start < text.size()) {
    auto star = text.find('*', start);
    auto f = text.substr(start, star == std::string_view::npos ? std::string_view::npos : star - start);
    unsigned e = 1;
    auto caret = f.find('^');
    if (caret != std::string_view::npos) {
      e = static_cast<unsigned>(std::stoul(std::string(f.substr(caret + 1))));
      f = f.substr(0, caret);
    }
    if (f == "log") {
      factors.emplace_back(PLVar::log(), e);
    } else if (f.size() > 2 && f.substr(0, 2) == "Li") {
      factors.emplace_back(PLVar::li(std::stoi(std::string(f.substr(2)))), e);
    } else {
      throw std::invalid_argument("bad PL monomial: " + std::string(text));
    }
    if (star == std::string_view::npos) break;
    start = star + 1;
  }
  return PLMonomial::from_factors(std::move(factors));
}

long degree(const PLMonomial& m) {
  return m.weighted_degree([](const PLVar& x) { return x.degree(); });
}

long degree(const PhiMonomial& m) {
  return m.weighted_degree([](const PhiVar& x) { return x.degree(); });
}

std::vector<PLVar> pl_variables(int d) {
  std::vector<PLVar> out{PLVar::log()};
  for (int n = 1; n <= d; ++n) out.push_back(PLVar::li(n));
  return out;
}

std::vector<PhiVar> phi_variables(int s, int d) {
  std::vector<PhiVar> out;
  for (int i = 1; i <= s; ++i) {
    out.push_back(PhiVar::e0(i));
    out.push_back(PhiVar::e1(i));
  }
  for (int k = 3; k <= d; k += 2) out.push_back(PhiVar::sigma(k));
  return out;
}

namespace {

template <class Var>
void enumerate_monomials(const std::vector<Var>& vars, std::size_t k, int remaining,
                         std::vector<typename Monomial<Var>::Factor>& cur, std::vector<Monomial<Var>>& out) {
  if (remaining == 0) {
    out.push_back(Monomial<Var>::from_factors(cur));
    return;
  }
  if (k == vars.size()) return;
  const int w = vars[k].degree();
  for (int e = remaining / w; e >= 0; --e) {
    if (e) cur.emplace_back(vars[k], static_cast<unsigned>(e));
    enumerate_monomials(vars, k + 1, remaining - e * w, cur, out);
    if (e) cur.pop_back();
  }
}

}  // namespace

std::vector<PLMonomial> pl_monomials(int d, int v) {
  std::vector<PLMonomial> out;
  if (v < 0) return out;
  std::vector<PLMonomial::Factor> cur;
  enumerate_monomials(pl_variables(d), 0, v, cur, out);
  return out;
}

std::vector<PhiMonomial> phi_monomials(int s, int d, int v) {
  std::vector<PhiMonomial> out;
  if (v < 0) return out;
  std::vector<PhiMonomial::Factor> cur;
  enumerate_monomials(phi_variables(s, d), 0, v, cur, out);
  return out;
}

PhiPoly<ShuffleElem> theta_image(PLVar x, int s, int d) {
  if (x.degree() > d) throw std::invalid_argument("PL variable exceeds depth bound");
  std::map<PhiMonomial, ShuffleElem> acc;
  if (x.index == 0) {
    for (int i = 1; i <= s; ++i) acc[PhiMonomial::var(PhiVar::e0(i))].add_term(Word{Generator::tau(i)}, 1);
  } else {
    const int k = x.index;
    for (int head = 1; head <= k; ++head) {
      std::vector<std::pair<Generator, PhiVar>> heads;
      if (head == 1) {
        for (int i = 1; i <= s; ++i) heads.emplace_back(Generator::tau(i), PhiVar::e1(i));
      } else if (head % 2 == 1 && head <= d) {
        heads.emplace_back(Generator::sigma(head), PhiVar::sigma(head));
      }
      const int r = k - head;
      for (const auto& [g, phi] : heads) {
        // every ordered tail tau(1)...tau(r)
        std::vector<int> tail(r, 1);
        for (;;) {
          std::u16string letters(1, g.code());
          std::vector<PhiMonomial::Factor> factors{{phi, 1u}};
          for (int t : tail) {
            letters.push_back(Generator::tau(t).code());
            factors.emplace_back(PhiVar::e0(t), 1u);
          }
          acc[PhiMonomial::from_factors(std::move(factors))].add_term(Word(letters), 1);
          int pos = r - 1;
          while (pos >= 0 && tail[pos] == s) tail[pos--] = 1;
          if (pos < 0) break;
          ++tail[pos];
        }
      }
    }
  }
  PhiPoly<ShuffleElem> out;
  for (auto& [m, c] : acc) out.add_term(m, c);
  return out;
}

std::shared_ptr<const ThetaImages<ShuffleElem>> theta_images(int s, int d) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ThetaImages<ShuffleElem>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{s, d}];
  if (!slot) {
    auto im = std::make_shared<ThetaImages<ShuffleElem>>();
    im->s = s;
    im->d = d;
    im->one = ShuffleElem::one();
    for (const auto& x : pl_variables(d)) im->images.push_back(theta_image(x, s, d));
    slot = im;
  }
  return slot;
}

std::shared_ptr<const ThetaImages<LyndonPoly>> theta_images_lyndon(int s, int d) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ThetaImages<LyndonPoly>>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({s, d});
    if (it != cache.end()) return it->second;
  }
  auto sym = theta_images(s, d);
  std::vector<std::pair<std::size_t, const std::pair<const PhiMonomial, ShuffleElem>*>> jobs;
  for (std::size_t i = 0; i < sym->images.size(); ++i) {
    for (const auto& term : sym->images[i].terms()) jobs.emplace_back(i, &term);
  }
  std::vector<LyndonPoly> converted(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) { converted[j] = to_lyndon_poly(jobs[j].second->second, d); });
  auto im = std::make_shared<ThetaImages<LyndonPoly>>();
  im->s = s;
  im->d = d;
  im->one = LyndonPoly::constant(1);
  im->images.resize(sym->images.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) im->images[jobs[j].first].add_term(jobs[j].second->first, converted[j]);
  std::lock_guard lock(mutex);
  auto& slot = cache[{s, d}];
  if (!slot) slot = im;
  return slot;
}

std::set<Word> lyndon_variables(const ThetaImages<LyndonPoly>& im) {
  std::set<Word> out;
  for (const auto& img : im.images) {
    for (const auto& [m, c] : img.terms()) {
      auto v = variables(c);
      out.insert(v.begin(), v.end());
    }
  }
  return out;
}

ThetaMatrix<ShuffleElem> build_matrix(int s, int d, int v) { return build_matrix(*theta_images(s, d), v); }

namespace {

template <class C, class F>
void export_impl(const ThetaMatrix<C>& m, const std::filesystem::path& prefix, F&& entry_text) {
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  auto with_ext = [&](const char* ext) {
    auto p = prefix;
    p += ext;
    return p;
  };
  std::ofstream out(with_ext(".mtx"));
  out << "%%CKMatrix s=" << m.s << " d=" << m.d << " v=" << m.v << " rows=" << m.rows.size()
      << " cols=" << m.cols.size() << "\n";
  // row-major listing, 1-based
  std::vector<std::tuple<std::size_t, std::size_t, const C*>> entries;
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    for (const auto& [r, x] : m.columns[c]) entries.emplace_back(r, c, &x);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b)); });
  for (const auto& [r, c, x] : entries) out << r + 1 << ' ' << c + 1 << ' ' << entry_text(*x) << '\n';
  std::ofstream rows(with_ext(".rows"));
  rows << "%%CKLabels rows v1\n";
  for (const auto& r : m.rows) rows << to_string(r) << '\n';
  std::ofstream cols(with_ext(".cols"));
  cols << "%%CKLabels cols v1\n";
  for (const auto& c : m.cols) cols << to_string(c) << '\n';
}

int header_field(const std::string& header, const std::string& key) {
  auto pos = header.find(" " + key + "=");
  if (pos == std::string::npos) throw std::invalid_argument("matrix header lacks " + key);
  return std::stoi(header.substr(pos + key.size() + 2));
}

}  // namespace

void export_matrix(const ThetaMatrix<ShuffleElem>& m, const std::filesystem::path& prefix) {
  export_impl(m, prefix, [](const ShuffleElem& e) { return e.to_string(); });
}

void export_matrix(const ThetaMatrix<LyndonPoly>& m, const std::filesystem::path& prefix) {
  export_impl(m, prefix, [](const LyndonPoly& e) { return to_string(e); });
}

CoordinateMatrix read_matrix(const std::filesystem::path& prefix) {
  auto with_ext = [&](const char* ext) {
    auto p = prefix;
    p += ext;
    return p;
  };
  std::ifstream in(with_ext(".mtx"));
  if (!in) throw std::runtime_error("cannot open " + with_ext(".mtx").string());
  CoordinateMatrix m;
  std::string line;
  std::getline(in, line);
  if (line.rfind("%%CKMatrix", 0) != 0) throw std::invalid_argument("not a CKMatrix file");
  m.s = header_field(line, "s");
  m.d = header_field(line, "d");
  m.v = header_field(line, "v");
  m.rows = static_cast<std::size_t>(header_field(line, "rows"));
  m.cols = static_cast<std::size_t>(header_field(line, "cols"));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t r, c;
    ls >> r >> c;
    std::string rest;
    std::getline(ls, rest);
    if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
    if (r < 1 || r > m.rows || c < 1 || c > m.cols) throw std::out_of_range("matrix index out of bounds");
    LyndonPoly entry = rest.find("X[") != std::string::npos || rest.find('*') == std::string::npos
                           ? parse_lyndon_poly(rest)
                           : to_lyndon_poly(ShuffleElem::parse(rest), m.d);
    m.entries.emplace_back(r - 1, c - 1, std::move(entry));
  }
  for (const char* ext : {".rows", ".cols"}) {
    std::ifstream lab(with_ext(ext));
    auto& target = std::string(ext) == ".rows" ? m.row_labels : m.col_labels;
    if (!lab) continue;
    std::getline(lab, line);
    while (std::getline(lab, line)) target.push_back(line);
  }
  return m;
}

namespace {

PLPoly<ShuffleElem> pl_term(std::vector<PLMonomial::Factor> f, const ShuffleElem& c) {
  return PLPoly<ShuffleElem>::monomial(PLMonomial::from_factors(std::move(f)), c);
}

}  // namespace

PLPoly<ShuffleElem> f22_one_prime() {
  return pl_term({{PLVar::li(2), 1}}, ShuffleElem::one()) -
         pl_term({{PLVar::log(), 1}, {PLVar::li(1), 1}}, ShuffleElem(Rational(1, 2)));
}

PLPoly<ShuffleElem> f44_one_prime() {
  const Generator t = Generator::tau(1), s3 = Generator::sigma(3);
  const ShuffleElem fs = ShuffleElem::word(Word{s3}), ft = ShuffleElem::word(Word{t});
  const ShuffleElem fst = ShuffleElem::word(Word{s3, t});
  const ShuffleElem prod = fs * ft;
  return pl_term({{PLVar::li(4), 1}}, prod) - pl_term({{PLVar::log(), 1}, {PLVar::li(3), 1}}, fst) -
         pl_term({{PLVar::log(), 3}, {PLVar::li(1), 1}}, (prod - fst * Rational(4)) * Rational(1, 24));
}

}  // namespace ckforge
