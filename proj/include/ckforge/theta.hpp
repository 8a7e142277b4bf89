#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <tuple>
#include <stdexcept>
#include <string>
#include <vector>

#include "ckforge/alphabet.hpp"
#include "ckforge/lyndon.hpp"
#include "ckforge/parallel.hpp"
#include "ckforge/poly.hpp"
#include "ckforge/shuffle.hpp"

namespace ckforge {

// 0 is log, n >= 1 is Li_n.
struct PLVar {
  int index = 0;
  static PLVar log() { return {0}; }
  static PLVar li(int n) { return {n}; }
  int degree() const { return index == 0 ? 1 : index; }
  std::string name() const { return index == 0 ? "log" : "Li" + std::to_string(index); }
  auto operator<=>(const PLVar&) const = default;
};

enum class Lambda : std::uint8_t { E0 = 0, E1 = 1, E1E0 = 2 };

struct PhiVar {
  Generator rho = Generator::tau(1);
  Lambda lambda = Lambda::E0;
  static PhiVar e0(int tau_index) { return {Generator::tau(tau_index), Lambda::E0}; }
  static PhiVar e1(int tau_index) { return {Generator::tau(tau_index), Lambda::E1}; }
  static PhiVar sigma(int k) { return {Generator::sigma(k), Lambda::E1E0}; }
  int degree() const { return rho.degree(); }
  std::string name() const;
  auto operator<=>(const PhiVar&) const = default;
};

using PLMonomial = Monomial<PLVar>;
using PhiMonomial = Monomial<PhiVar>;
template <class C>
using PLPoly = Polynomial<PLVar, C>;
template <class C>
using PhiPoly = Polynomial<PhiVar, C>;

std::string to_string(const PLMonomial& m);
std::string to_string(const PhiMonomial& m);
PLMonomial parse_pl_monomial(std::string_view text);
long degree(const PLMonomial& m);
long degree(const PhiMonomial& m);

std::vector<PLVar> pl_variables(int d);
std::vector<PhiVar> phi_variables(int s, int d);
// all monomials of degree v; lexicographic with the first variable most
// significant and larger exponents first
std::vector<PLMonomial> pl_monomials(int d, int v);
std::vector<PhiMonomial> phi_monomials(int s, int d, int v);

PhiPoly<ShuffleElem> theta_image(PLVar x, int s, int d);

// Images of log, Li_1, ..., Li_d over some coefficient ring.
template <class C>
struct ThetaImages {
  int s = 0;
  int d = 0;
  C one{};
  std::vector<PhiPoly<C>> images;  // indexed by PLVar::index
  const PhiPoly<C>& operator[](PLVar x) const {
    if (x.index < 0 || x.index > d) throw std::invalid_argument("PL variable exceeds depth bound");
    return images[x.index];
  }
};

// cached per (s, d)
std::shared_ptr<const ThetaImages<ShuffleElem>> theta_images(int s, int d);
std::shared_ptr<const ThetaImages<LyndonPoly>> theta_images_lyndon(int s, int d);

template <class C, class C2, class F>
ThetaImages<C2> map_images(const ThetaImages<C>& in, const C2& one, F&& f) {
  ThetaImages<C2> out{in.s, in.d, one, {}};
  out.images.reserve(in.images.size());
  for (const auto& img : in.images) out.images.push_back(img.map_coeffs(f));
  return out;
}

template <class C>
PhiPoly<C> theta_apply_monomial(const PLMonomial& m, const ThetaImages<C>& im) {
  auto r = PhiPoly<C>::constant(im.one);
  for (const auto& [x, e] : m.factors()) r = r * im[x].pow(e, im.one);
  return r;
}

// O(U_S)-algebra extension; the coefficient of each term multiplies the image
template <class C>
PhiPoly<C> theta_apply(const PLPoly<C>& f, const ThetaImages<C>& im) {
  PhiPoly<C> out;
  for (const auto& [m, c] : f.terms()) out += theta_apply_monomial(m, im).scaled(c);
  return out;
}

std::set<Word> lyndon_variables(const ThetaImages<LyndonPoly>& im);

template <class C>
struct ThetaMatrix {
  int s = 0, d = 0, v = 0;
  std::vector<PhiMonomial> rows;
  std::vector<PLMonomial> cols;
  // column-major sparse storage: columns[c] = (row, entry) sorted by row
  std::vector<std::vector<std::pair<std::size_t, C>>> columns;

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& c : columns) n += c.size();
    return n;
  }
  const C* entry(std::size_t r, std::size_t c) const {
    for (const auto& [i, x] : columns[c]) {
      if (i == r) return &x;
    }
    return nullptr;
  }
  template <class C2, class F>
  ThetaMatrix<C2> map_entries(F&& f) const {
    ThetaMatrix<C2> out{s, d, v, rows, cols, {}};
    out.columns.resize(columns.size());
    parallel_for(columns.size(), [&](std::size_t c) {
      for (const auto& [r, x] : columns[c]) {
        C2 y = f(x);
        if (!is_zero(y)) out.columns[c].emplace_back(r, std::move(y));
      }
    });
    return out;
  }
};

template <class C>
ThetaMatrix<C> build_matrix(const ThetaImages<C>& im, int v) {
  ThetaMatrix<C> m;
  m.s = im.s;
  m.d = im.d;
  m.v = v;
  m.rows = phi_monomials(im.s, im.d, v);
  m.cols = pl_monomials(im.d, v);
  std::map<PhiMonomial, std::size_t> row_index;
  for (std::size_t i = 0; i < m.rows.size(); ++i) row_index.emplace(m.rows[i], i);

  // powers are shared between columns
  std::map<std::pair<int, unsigned>, PhiPoly<C>> powers;
  for (const auto& col : m.cols) {
    for (const auto& [x, e] : col.factors()) {
      if (powers.count({x.index, e})) continue;
      powers.emplace(std::make_pair(x.index, e), im[x].pow(e, im.one));
    }
  }
  m.columns.resize(m.cols.size());
  parallel_for(m.cols.size(), [&](std::size_t c) {
    auto prod = PhiPoly<C>::constant(im.one);
    for (const auto& [x, e] : m.cols[c].factors()) prod = prod * powers.at({x.index, e});
    auto& out = m.columns[c];
    for (const auto& [mono, coeff] : prod.terms()) {
      auto it = row_index.find(mono);
      if (it == row_index.end()) throw std::logic_error("theta image left the degree-v monomial basis");
      out.emplace_back(it->second, coeff);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  });
  return m;
}

ThetaMatrix<ShuffleElem> build_matrix(int s, int d, int v);

// coordinate export: PREFIX.mtx, PREFIX.rows, PREFIX.cols
void export_matrix(const ThetaMatrix<ShuffleElem>& m, const std::filesystem::path& prefix);
void export_matrix(const ThetaMatrix<LyndonPoly>& m, const std::filesystem::path& prefix);

struct CoordinateMatrix {
  int s = 0, d = 0, v = 0;
  std::size_t rows = 0, cols = 0;
  std::vector<std::string> row_labels, col_labels;
  // entries converted to Lyndon form whichever format the file used
  std::vector<std::tuple<std::size_t, std::size_t, LyndonPoly>> entries;
};
CoordinateMatrix read_matrix(const std::filesystem::path& prefix);

// The two known functions for one prime (s = 1, tau = t1).
PLPoly<ShuffleElem> f22_one_prime();  // Li2 - 1/2 log Li1
PLPoly<ShuffleElem> f44_one_prime();

}  // namespace ckforge
