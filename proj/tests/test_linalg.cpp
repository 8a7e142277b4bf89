#include <map>

#include "doctest.h"

#include "ckforge/linalg.hpp"
#include "ckforge/random.hpp"
#include "ckforge/upper_bound.hpp"

using namespace ckforge;

namespace {

using Dense = std::vector<std::vector<Rational>>;

// dense Bareiss elimination on the rows scaled to integers
std::size_t dense_rank(const Dense& a) {
  std::vector<std::vector<Integer>> b;
  for (const auto& row : a) {
    Integer den = 1;
    for (const auto& x : row) den = lcm(den, Integer(x.get_den()));
    std::vector<Integer> r;
    for (const auto& x : row) r.push_back(x.get_num() * (den / x.get_den()));
    b.push_back(std::move(r));
  }
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  std::size_t r = 0;
  Integer prev = 1;
  for (std::size_t c = 0; c < cols && r < b.size(); ++c) {
    std::size_t p = r;
    while (p < b.size() && sgn(b[p][c]) == 0) ++p;
    if (p == b.size()) continue;
    std::swap(b[p], b[r]);
    for (std::size_t i = r + 1; i < b.size(); ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) b[i][j] = (b[r][c] * b[i][j] - b[i][c] * b[r][j]) / prev;
      b[i][c] = 0;
    }
    prev = b[r][c];
    ++r;
  }
  return r;
}

// rank of a over F_p, p = 2^61 - 1; a lower bound for the rank over Q
std::size_t dense_rank_mod(const Dense& a) {
  const std::uint64_t p = (1ULL << 61) - 1;
  auto mul = [&](std::uint64_t x, std::uint64_t y) { return static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * y % p); };
  auto inv = [&](std::uint64_t x) {
    std::uint64_t r = 1;
    for (std::uint64_t e = p - 2; e; e >>= 1, x = mul(x, x))
      if (e & 1) r = mul(r, x);
    return r;
  };
  auto red = [&](const Integer& z) {
    Integer m = z % Integer(static_cast<unsigned long>(p));
    if (m < 0) m += static_cast<unsigned long>(p);
    return static_cast<std::uint64_t>(m.get_ui());
  };
  std::vector<std::vector<std::uint64_t>> b;
  for (const auto& row : a) {
    std::vector<std::uint64_t> r;
    for (const auto& x : row) r.push_back(mul(red(x.get_num()), inv(red(x.get_den()))));
    b.push_back(std::move(r));
  }
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < b.size(); ++c) {
    std::size_t piv = r;
    while (piv < b.size() && b[piv][c] == 0) ++piv;
    if (piv == b.size()) continue;
    std::swap(b[piv], b[r]);
    const std::uint64_t iv = inv(b[r][c]);
    for (std::size_t i = r + 1; i < b.size(); ++i) {
      const std::uint64_t f = mul(b[i][c], iv);
      for (std::size_t j = c; j < cols; ++j) b[i][j] = (b[i][j] + p - mul(f, b[r][j])) % p;
    }
    ++r;
  }
  return r;
}

Dense random_sparse(Rng& rng, std::size_t rows, std::size_t cols, double density, std::size_t rank_cap) {
  // product of two random sparse factors, so the rank is usually below min(rows, cols)
  const std::size_t k = std::max<std::size_t>(1, rank_cap);
  Dense a(rows, std::vector<Rational>(k)), b(k, std::vector<Rational>(cols));
  const auto thresh = static_cast<std::uint64_t>(density * 1000);
  for (auto& row : a)
    for (auto& x : row) x = rng.uniform(0, 999) < thresh ? Rational(rng.uniform_signed(-9, 9)) : Rational(0);
  for (auto& row : b)
    for (auto& x : row) x = rng.uniform(0, 999) < thresh ? Rational(rng.uniform_signed(-9, 9), rng.uniform(1, 4)) : Rational(0);
  Dense m(rows, std::vector<Rational>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (sgn(a[i][t]) == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) m[i][j] += a[i][t] * b[t][j];
    }
  for (auto& row : m)
    for (auto& x : row) x.canonicalize();
  return m;
}

void check_invariants(const SparseRatMatrix& m, std::size_t expected_rank) {
  const std::size_t r = rank(m);
  CHECK(r == expected_rank);
  const auto ker = kernel_basis(m);
  CHECK(r + ker.size() == m.cols());
  // M k = 0 checked on integer multiples of the rows of M and of k
  std::vector<std::vector<std::pair<std::size_t, Integer>>> irows;
  for (const auto& row : m.row_data()) {
    Integer den = 1;
    for (const auto& [c, x] : row) den = lcm(den, Integer(x.get_den()));
    irows.emplace_back();
    for (const auto& [c, x] : row) irows.back().emplace_back(c, x.get_num() * (den / x.get_den()));
  }
  for (const auto& k : ker) {
    REQUIRE(k.size() == m.cols());
    Integer den = 1;
    for (const auto& x : k) den = lcm(den, Integer(x.get_den()));
    std::vector<Integer> ik;
    for (const auto& x : k) ik.push_back(x.get_num() * (den / x.get_den()));
    bool zero = true;
    for (const auto& row : irows) {
      Integer acc = 0;
      for (const auto& [c, a] : row) acc += a * ik[c];
      zero = zero && sgn(acc) == 0;
    }
    CHECK(zero);
  }
  // kernel vectors are independent (already over F_p)
  if (!ker.empty()) CHECK(dense_rank_mod(ker) == ker.size());
}

}  // namespace

TEST_CASE("rank examples") {
  CHECK(rank(SparseRatMatrix::from_dense({{1, 2}, {2, 4}})) == 1);
  CHECK(rank(SparseRatMatrix(0, 5)) == 0);
  CHECK(kernel_basis(SparseRatMatrix(0, 3)).size() == 3);
}

TEST_CASE("kernel examples") {
  CHECK(kernel_basis(SparseRatMatrix::from_dense({{1, 0}, {0, 1}})).empty());
  const auto z = kernel_basis(SparseRatMatrix(2, 2));
  REQUIRE(z.size() == 2);
  CHECK(dense_rank(z) == 2);
}

TEST_CASE("rank_mod_p examples") {
  CHECK(rank_mod_p(SparseRatMatrix::from_dense({{1, 2}, {2, 4}}), 7) == 1);
  CHECK(rank_mod_p(SparseRatMatrix::from_dense({{7, 0}, {0, 1}}), 7) == 1);
  CHECK(rank(SparseRatMatrix::from_dense({{7, 0}, {0, 1}})) == 2);
  CHECK_THROWS_WITH(rank_mod_p(SparseRatMatrix::from_dense({{Rational(1, 7)}}), 7), doctest::Contains("bad prime"));
}

TEST_CASE("specialized M(theta_{2,2}) for one prime") {
  // 2 f_tt = X[t1]^2, so every f_t^2 entry becomes a^2 at X[t1] = a
  const auto m = build_matrix(1, 2, 2);
  const auto ml = m.map_entries<LyndonPoly>([](const ShuffleElem& x) { return to_lyndon_poly(x, 2); });
  for (int a : {1, 3, 10}) {
    const LyndonPoint x{{Word{Generator::tau(1)}, a}};
    const auto spec = specialize(ml, x);
    CHECK(spec.nnz() == 4);
    std::map<std::pair<std::string, std::string>, Rational> got;
    for (std::size_t r = 0; r < spec.rows(); ++r)
      for (const auto& [c, q] : spec.row_data()[r]) got[{to_string(m.rows[r]), to_string(m.cols[c])}] = q;
    const Rational c2 = a * a;
    CHECK(got[{"Phi[t1:e0]^2", "log^2"}] == c2);
    CHECK(got[{"Phi[t1:e1]^2", "Li1^2"}] == c2);
    CHECK(got[{"Phi[t1:e0]*Phi[t1:e1]", "log*Li1"}] == c2);
    CHECK(got[{"Phi[t1:e0]*Phi[t1:e1]", "Li2"}] == c2 / 2);
    CHECK(rank(spec) == 3);
    CHECK(rank_mod_p(ml, x, 1000000007ULL) == 3);
    CHECK(specialize(m, x).row_data() == spec.row_data());

    const auto ker = kernel_basis(spec);
    REQUIRE(ker.size() == 1);
    // proportional to (0, -1/2, 0, 1) over (log^2, log*Li1, Li1^2, Li2)
    std::map<std::string, Rational> k;
    for (std::size_t c = 0; c < m.cols.size(); ++c) k[to_string(m.cols[c])] = ker[0][c];
    CHECK(sgn(k["log^2"]) == 0);
    CHECK(sgn(k["Li1^2"]) == 0);
    CHECK(k["log*Li1"] == -k["Li2"] / 2);
  }
}

TEST_CASE("zero and constant matrices specialize to themselves") {
  ThetaMatrix<LyndonPoly> z{1, 1, 1, {PhiMonomial(), PhiMonomial()}, {PLMonomial(), PLMonomial()}, {{}, {}}};
  CHECK(specialize(z, {}).nnz() == 0);
  ThetaMatrix<LyndonPoly> id = z;
  id.columns = {{{0, LyndonPoly::constant(1)}}, {{1, LyndonPoly::constant(1)}}};
  const auto s = specialize(id, {});
  CHECK(s.get(0, 0) == 1);
  CHECK(s.get(1, 1) == 1);
  CHECK(s.nnz() == 2);
}

TEST_CASE("seeded random sparse matrices up to 200 x 200") {
  Rng rng(1234);
  const std::size_t shapes[][3] = {{5, 7, 3},    {12, 12, 12}, {30, 20, 9},  {40, 60, 25},
                                   {80, 80, 50}, {120, 90, 70}, {150, 200, 60}, {200, 200, 140}};
  for (const auto& sh : shapes) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto d = random_sparse(rng, sh[0], sh[1], 0.25, sh[2]);
      const auto m = SparseRatMatrix::from_dense(d);
      const std::size_t r = dense_rank(d);
      check_invariants(m, r);
      check_invariants(m.transposed(), r);
      int agree = 0;
      for (int k = 0; k < 3; ++k) {
        const std::size_t rp = rank_mod_p(m, random_prime_62(rng));
        CHECK(rp <= r);
        agree += rp == r;
      }
      CHECK(agree >= 2);
    }
  }
}

TEST_CASE("many small random matrices") {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t rows = rng.uniform(1, 9), cols = rng.uniform(1, 9);
    const auto d = random_sparse(rng, rows, cols, 0.4, rng.uniform(1, 9));
    const auto m = SparseRatMatrix::from_dense(d);
    check_invariants(m, dense_rank(d));
  }
}

TEST_CASE("specialized kernel dimension equals the symbolic one, s = 1") {
  for (auto [d, v] : {std::pair{2, 2}, std::pair{4, 4}}) {
    const auto m = build_matrix(1, d, v);
    const auto ml = m.map_entries<LyndonPoly>([&](const ShuffleElem& x) { return to_lyndon_poly(x, d); });
    const std::size_t symbolic_kernel = m.cols.size() - symbolic_rank(ml);
    const auto vars = lyndon_variables(*theta_images_lyndon(1, d));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto spec = specialize(ml, sample_point(vars, seed));
      const std::size_t k = spec.cols() - rank(spec);
      CHECK(k >= symbolic_kernel);
      CHECK(k == symbolic_kernel);
    }
  }
}

TEST_CASE("modular evaluation matches exact evaluation") {
  Rng rng(3);
  const auto im = theta_images_lyndon(2, 5);
  const auto vars = lyndon_variables(*im);
  const auto x = sample_point(vars, 11);
  for (int t = 0; t < 5; ++t) {
    const std::uint64_t p = random_prime_62(rng);
    for (const auto& img : im->images)
      for (const auto& [m, c] : img.terms()) CHECK(evaluate_mod(c, x, p) == reduce_mod(evaluate(c, x), p));
  }
}
