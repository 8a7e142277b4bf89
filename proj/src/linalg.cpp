#include "ckforge/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ckforge {

SparseRatMatrix SparseRatMatrix::from_dense(const std::vector<std::vector<Rational>>& a) {
  SparseRatMatrix m(a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < a[r].size(); ++c) m.set(r, c, a[r][c]);
  }
  return m;
}

std::size_t SparseRatMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

void SparseRatMatrix::set(std::size_t r, std::size_t c, const Rational& x) {
  if (r >= rows_.size() || c >= cols_) throw std::out_of_range("matrix index out of bounds");
  if (sgn(x) == 0) {
    rows_[r].erase(c);
  } else {
    rows_[r][c] = x;
  }
}

Rational SparseRatMatrix::get(std::size_t r, std::size_t c) const {
  auto it = rows_.at(r).find(c);
  return it == rows_[r].end() ? Rational(0) : it->second;
}

std::vector<Rational> SparseRatMatrix::multiply(const std::vector<Rational>& x) const {
  if (x.size() != cols_) throw std::invalid_argument("dimension mismatch");
  std::vector<Rational> y(rows_.size(), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const auto& [c, a] : rows_[r]) y[r] += a * x[c];
  }
  return y;
}

SparseRatMatrix SparseRatMatrix::transposed() const {
  SparseRatMatrix t(cols_, rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const auto& [c, a] : rows_[r]) t.rows_[c].emplace(r, a);
  }
  return t;
}

namespace {

using IntRow = std::vector<std::pair<std::size_t, Integer>>;  // sorted by column

IntRow integer_row(const SparseRatMatrix::Row& row) {
  Integer den = 1;
  for (const auto& [c, x] : row) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  IntRow out;
  out.reserve(row.size());
  Integer g = 0;
  for (const auto& [c, x] : row) {
    out.emplace_back(c, x.get_num() * (den / x.get_den()));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out.back().second.get_mpz_t());
  }
  if (g > 1) {
    for (auto& e : out) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
  }
  return out;
}

const Integer* row_find(const IntRow& row, std::size_t c) {
  auto it = std::lower_bound(row.begin(), row.end(), c, [](const auto& e, std::size_t k) { return e.first < k; });
  return (it != row.end() && it->first == c) ? &it->second : nullptr;
}

// row := a*row - b*piv, then strip the content
IntRow combine(const IntRow& row, const Integer& a, const IntRow& piv, const Integer& b) {
  IntRow out;
  out.reserve(row.size() + piv.size());
  auto i = row.begin(), j = piv.begin();
  Integer t;
  while (i != row.end() || j != piv.end()) {
    if (j == piv.end() || (i != row.end() && i->first < j->first)) {
      out.emplace_back(i->first, a * i->second);
      ++i;
    } else if (i == row.end() || j->first < i->first) {
      out.emplace_back(j->first, -b * j->second);
      ++j;
    } else {
      t = a * i->second;
      t -= b * j->second;
      if (sgn(t) != 0) out.emplace_back(i->first, t);
      ++i, ++j;
    }
  }
  Integer g = 0;
  for (const auto& e : out) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
    if (g == 1) break;
  }
  if (g > 1) {
    for (auto& e : out) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
  }
  return out;
}

}  // namespace

std::size_t rank(const SparseRatMatrix& input) {
  const SparseRatMatrix& m0 = input;
  SparseRatMatrix tr;
  const SparseRatMatrix* m = &m0;
  if (m0.rows() > m0.cols()) {
    tr = m0.transposed();
    m = &tr;
  }
  std::vector<IntRow> rows;
  for (const auto& r : m->row_data()) {
    if (!r.empty()) rows.push_back(integer_row(r));
  }
  // column -> active rows holding it
  std::vector<std::set<std::size_t>> col_rows(m->cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& e : rows[i]) col_rows[e.first].insert(i);
  }
  std::vector<char> active(rows.size(), 1);
  std::size_t active_count = rows.size();
  std::size_t r = 0;
  while (active_count > 0) {
    // Markowitz-style choice: sparsest column, then shortest row in it
    std::size_t best_col = SIZE_MAX, best_cost = SIZE_MAX;
    for (std::size_t c = 0; c < col_rows.size(); ++c) {
      if (!col_rows[c].empty() && col_rows[c].size() < best_cost) {
        best_cost = col_rows[c].size();
        best_col = c;
        if (best_cost == 1) break;
      }
    }
    if (best_col == SIZE_MAX) break;
    std::size_t piv = SIZE_MAX;
    for (std::size_t i : col_rows[best_col]) {
      if (piv == SIZE_MAX || rows[i].size() < rows[piv].size()) piv = i;
    }
    const IntRow pivot = rows[piv];
    const Integer pv = *row_find(pivot, best_col);
    for (const auto& e : pivot) col_rows[e.first].erase(piv);
    active[piv] = 0;
    --active_count;
    ++r;
    std::vector<std::size_t> targets(col_rows[best_col].begin(), col_rows[best_col].end());
    for (std::size_t i : targets) {
      const Integer b = *row_find(rows[i], best_col);
      for (const auto& e : rows[i]) col_rows[e.first].erase(i);
      rows[i] = combine(rows[i], pv, pivot, b);
      if (rows[i].empty()) {
        active[i] = 0;
        --active_count;
      }
      for (const auto& e : rows[i]) col_rows[e.first].insert(i);
    }
  }
  return r;
}

std::vector<std::vector<Rational>> kernel_basis(const SparseRatMatrix& m) {
  // fraction-free Gauss-Jordan on integer rows, pivots in column order, so
  // the basis is the reduced row echelon one
  std::vector<IntRow> rows;
  for (const auto& r : m.row_data()) {
    if (!r.empty()) rows.push_back(integer_row(r));
  }
  std::vector<std::set<std::size_t>> col_rows(m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& e : rows[i]) col_rows[e.first].insert(i);
  }
  std::vector<char> reduced(rows.size(), 0);
  std::vector<std::size_t> pivot_of(m.cols(), SIZE_MAX);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::size_t piv = SIZE_MAX;
    for (std::size_t i : col_rows[c]) {
      if (!reduced[i] && (piv == SIZE_MAX || rows[i].size() < rows[piv].size())) piv = i;
    }
    if (piv == SIZE_MAX) continue;
    reduced[piv] = 1;
    pivot_of[c] = piv;
    const IntRow pivot = rows[piv];
    const Integer pv = *row_find(pivot, c);
    std::vector<std::size_t> targets;
    for (std::size_t i : col_rows[c])
      if (i != piv) targets.push_back(i);
    for (std::size_t i : targets) {
      const Integer b = *row_find(rows[i], c);
      for (const auto& e : rows[i]) col_rows[e.first].erase(i);
      rows[i] = combine(rows[i], pv, pivot, b);
      for (const auto& e : rows[i]) col_rows[e.first].insert(i);
    }
  }
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (pivot_of[f] != SIZE_MAX) continue;
    std::vector<Rational> k(m.cols(), 0);
    k[f] = 1;
    for (std::size_t i : col_rows[f]) {
      // row i: p x_c + a x_f + ... = 0 with c its pivot column
      const std::size_t c = rows[i].front().first;
      k[c] = Rational(Integer(-*row_find(rows[i], f)), rows[i].front().second);
      k[c].canonicalize();
    }
    basis.push_back(std::move(k));
  }
  return basis;
}

namespace {

// Montgomery arithmetic modulo an odd p < 2^62
struct Montgomery {
  std::uint64_t p, pinv, r2;
  explicit Montgomery(std::uint64_t prime) : p(prime) {
    pinv = p;
    for (int i = 0; i < 6; ++i) pinv *= 2 - p * pinv;  // p^-1 mod 2^64
    pinv = ~pinv + 1;                                  // -p^-1
    unsigned __int128 r = (static_cast<unsigned __int128>(1) << 64) % p;
    r2 = static_cast<std::uint64_t>(r * r % p);
  }
  std::uint64_t reduce(unsigned __int128 t) const {
    std::uint64_t m = static_cast<std::uint64_t>(t) * pinv;
    std::uint64_t u = static_cast<std::uint64_t>((t + static_cast<unsigned __int128>(m) * p) >> 64);
    return u >= p ? u - p : u;
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return reduce(static_cast<unsigned __int128>(a) * b); }
  std::uint64_t to(std::uint64_t a) const { return mul(a % p, r2); }
  std::uint64_t from(std::uint64_t a) const { return reduce(a); }
};

}  // namespace

std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> rows, std::size_t cols, std::uint64_t p) {
  if (p < 3 || p % 2 == 0 || p >= (1ULL << 62)) {
    // plain arithmetic for small or even moduli
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
      std::size_t piv = r;
      while (piv < rows.size() && rows[piv][c] % p == 0) ++piv;
      if (piv == rows.size()) continue;
      std::swap(rows[r], rows[piv]);
      std::uint64_t inv = invmod(rows[r][c] % p, p);
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        std::uint64_t f = mulmod(rows[i][c] % p, inv, p);
        if (!f) continue;
        for (std::size_t k = c; k < cols; ++k) rows[i][k] = submod(rows[i][k] % p, mulmod(f, rows[r][k] % p, p), p);
      }
      ++r;
    }
    return r;
  }
  const Montgomery mg(p);
  for (auto& row : rows) {
    for (auto& x : row) x = mg.to(x);
  }
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    // scale pivot row to 1 (in Montgomery form, one is to(1))
    const std::uint64_t inv = mg.to(invmod(mg.from(rows[r][c]), p));
    auto& pr = rows[r];
    for (std::size_t k = c; k < cols; ++k) pr[k] = mg.mul(pr[k], inv);
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      auto& row = rows[i];
      const std::uint64_t f = row[c];
      if (!f) continue;
      for (std::size_t k = c; k < cols; ++k) {
        if (pr[k]) row[k] = submod(row[k], mg.mul(f, pr[k]), p);
      }
    }
    ++r;
  }
  return r;
}

std::size_t rank_mod_p(const SparseRatMatrix& m, std::uint64_t p) {
  const bool flip = m.rows() > m.cols();
  const std::size_t R = flip ? m.cols() : m.rows();
  const std::size_t C = flip ? m.rows() : m.cols();
  std::vector<std::vector<std::uint64_t>> dense(R, std::vector<std::uint64_t>(C, 0));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (const auto& [c, x] : m.row_data()[r]) {
      const std::uint64_t v = reduce_mod(x, p);
      if (flip) {
        dense[c][r] = v;
      } else {
        dense[r][c] = v;
      }
    }
  }
  return rank_mod_p(std::move(dense), C, p);
}

SparseRatMatrix to_sparse(const ThetaMatrix<Rational>& m) {
  SparseRatMatrix out(m.rows.size(), m.cols.size());
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    for (const auto& [r, x] : m.columns[c]) out.set(r, c, x);
  }
  return out;
}

SparseRatMatrix specialize(const ThetaMatrix<LyndonPoly>& m, const LyndonPoint& x) {
  return to_sparse(m.map_entries<Rational>([&](const LyndonPoly& p) { return evaluate(p, x); }));
}

SparseRatMatrix specialize(const ThetaMatrix<ShuffleElem>& m, const LyndonPoint& x) {
  return to_sparse(m.map_entries<Rational>([&](const ShuffleElem& e) { return evaluate(to_lyndon_poly(e, m.d), x); }));
}

std::uint64_t evaluate_mod(const LyndonPoly& poly, const LyndonPoint& x, std::uint64_t prime) {
  std::uint64_t total = 0;
  for (const auto& [m, c] : poly.terms()) {
    std::uint64_t t = reduce_mod(c, prime);
    for (const auto& [w, e] : m.factors()) {
      auto it = x.find(w);
      if (it == x.end()) throw std::out_of_range("no value for Lyndon variable " + lyndon_var_name(w));
      t = mulmod(t, powmod(reduce_mod(it->second, prime), e, prime), prime);
    }
    total = addmod(total, t, prime);
  }
  return total;
}

std::size_t rank_mod_p(const ThetaMatrix<LyndonPoly>& m, const LyndonPoint& x, std::uint64_t prime) {
  const bool flip = m.rows.size() > m.cols.size();
  const std::size_t R = flip ? m.cols.size() : m.rows.size();
  const std::size_t C = flip ? m.rows.size() : m.cols.size();
  std::vector<std::vector<std::uint64_t>> dense(R, std::vector<std::uint64_t>(C, 0));
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    for (const auto& [r, e] : m.columns[c]) {
      const std::uint64_t v = evaluate_mod(e, x, prime);
      if (flip) {
        dense[c][r] = v;
      } else {
        dense[r][c] = v;
      }
    }
  }
  return rank_mod_p(std::move(dense), C, prime);
}

std::size_t symbolic_rank(const ThetaMatrix<LyndonPoly>& m) {
  std::vector<std::vector<LyndonPoly>> a(m.rows.size(), std::vector<LyndonPoly>(m.cols.size()));
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    for (const auto& [r, e] : m.columns[c]) a[r][c] = e;
  }
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols.size() && r < a.size(); ++c) {
    std::size_t piv = SIZE_MAX;
    for (std::size_t i = r; i < a.size(); ++i) {
      if (!a[i][c].is_zero() && (piv == SIZE_MAX || a[i][c].size() < a[piv][c].size())) piv = i;
    }
    if (piv == SIZE_MAX) continue;
    std::swap(a[r], a[piv]);
    for (std::size_t i = r + 1; i < a.size(); ++i) {
      if (a[i][c].is_zero()) continue;
      const LyndonPoly f = a[i][c];
      for (std::size_t k = c; k < m.cols.size(); ++k) a[i][k] = a[r][c] * a[i][k] - f * a[r][k];
    }
    ++r;
  }
  return r;
}

}  // namespace ckforge
