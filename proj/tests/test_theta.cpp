#include <filesystem>
#include <map>

#include "doctest.h"

#include "ckforge/dimensions.hpp"
#include "ckforge/random.hpp"
#include "ckforge/theta.hpp"

using namespace ckforge;

namespace {

const Generator t1 = Generator::tau(1), t2 = Generator::tau(2), s3 = Generator::sigma(3);

using Phi = PhiPoly<ShuffleElem>;
using PL = PLPoly<ShuffleElem>;

Phi phi_term(std::vector<PhiMonomial::Factor> f, const ShuffleElem& c) {
  return Phi::monomial(PhiMonomial::from_factors(std::move(f)), c);
}

// appends tau_i to every word and multiplies by Phi[t_i:e0]
Phi append_tau(const Phi& p, int i) {
  Phi out;
  for (const auto& [m, c] : p.terms()) {
    ShuffleElem shifted;
    for (const auto& [w, q] : c.terms()) shifted.add_term(w + Word{Generator::tau(i)}, q);
    out.add_term(m * PhiMonomial::var(PhiVar::e0(i)), shifted);
  }
  return out;
}

// theta(Li_k) = heads of degree k + sum_i append_tau(theta(Li_{k-1}), i)
Phi oracle_li(int k, int s, int d) {
  Phi out;
  if (k == 1) {
    for (int i = 1; i <= s; ++i) out += phi_term({{PhiVar::e1(i), 1}}, ShuffleElem::word(Word{Generator::tau(i)}));
    return out;
  }
  if (k % 2 == 1 && k <= d) out += phi_term({{PhiVar::sigma(k), 1}}, ShuffleElem::word(Word{Generator::sigma(k)}));
  const Phi prev = oracle_li(k - 1, s, d);
  for (int i = 1; i <= s; ++i) out += append_tau(prev, i);
  return out;
}

long pl_degree(const PLMonomial& m) { return degree(m); }

PL random_pl(Rng& rng, int d, int max_deg) {
  PL out;
  const int n = static_cast<int>(rng.uniform(1, 3));
  for (int k = 0; k < n; ++k) {
    const int v = static_cast<int>(rng.uniform(0, max_deg));
    const auto monos = pl_monomials(d, v);
    const auto& m = monos[rng.uniform(0, monos.size() - 1)];
    const auto words = enumerate_words(2, d, static_cast<int>(rng.uniform(0, 2)));
    out.add_term(m, ShuffleElem::word(words[rng.uniform(0, words.size() - 1)], Rational(rng.uniform_signed(-3, 3) | 1)));
  }
  return out;
}

}  // namespace

TEST_CASE("theta_image examples") {
  CHECK(theta_image(PLVar::log(), 1, 2) == phi_term({{PhiVar::e0(1), 1}}, ShuffleElem::word(Word{t1})));
  CHECK(theta_image(PLVar::li(2), 1, 2) ==
        phi_term({{PhiVar::e0(1), 1}, {PhiVar::e1(1), 1}}, ShuffleElem::word(Word{t1, t1})));
  CHECK(theta_image(PLVar::log(), 2, 6) == phi_term({{PhiVar::e0(1), 1}}, ShuffleElem::word(Word{t1})) +
                                              phi_term({{PhiVar::e0(2), 1}}, ShuffleElem::word(Word{t2})));
  CHECK_THROWS(theta_image(PLVar::li(3), 1, 2));
}

TEST_CASE("theta_image agrees with the recursive oracle") {
  for (int s = 1; s <= 2; ++s) {
    for (int d = 1; d <= 7; ++d) {
      for (int k = 1; k <= d; ++k) CHECK(theta_image(PLVar::li(k), s, d) == oracle_li(k, s, d));
    }
  }
}

TEST_CASE("images are homogeneous of their degree") {
  const auto im = theta_images(2, 8);
  for (const auto& x : pl_variables(8)) {
    for (const auto& [m, c] : im->images[x.index].terms()) {
      CHECK(degree(m) == x.degree());
      for (const auto& [w, q] : c.terms()) CHECK(w.degree() == x.degree());
    }
  }
}

TEST_CASE("build_matrix examples") {
  const auto m = build_matrix(1, 1, 1);
  REQUIRE(m.rows.size() == 2);
  REQUIRE(m.cols.size() == 2);
  CHECK(to_string(m.cols[0]) == "log");
  CHECK(to_string(m.cols[1]) == "Li1");
  CHECK(m.nnz() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    for (const auto& [r, e] : m.columns[c]) CHECK(e == ShuffleElem::word(Word{t1}));
  }

  const auto m22 = build_matrix(1, 2, 2);
  CHECK(m22.rows.size() == 3);
  CHECK(m22.cols.size() == 4);
}

TEST_CASE("matrix shape matches the dimension counts") {
  for (int s = 1; s <= 2; ++s) {
    for (int d = 1; d <= 6; ++d) {
      for (int v = 0; v <= 12; ++v) {
        const DimQuery q{s, d, v};
        CHECK(Integer(pl_monomials(d, v).size()) == dim_pl(q));
        CHECK(Integer(phi_monomials(s, d, v).size()) == dim_phi(q));
      }
    }
  }
}

TEST_CASE("(2,6,18) matrix has shape 4183 x 996") {
  CHECK(phi_monomials(2, 6, 18).size() == 4183);
  CHECK(pl_monomials(6, 18).size() == 996);
}

TEST_CASE("theta is a graded homomorphism") {
  Rng rng(99);
  const auto im = theta_images(2, 6);
  for (int trial = 0; trial < 40; ++trial) {
    const int v = static_cast<int>(rng.uniform(1, 10));
    const auto monos = pl_monomials(6, v);
    const auto& m = monos[rng.uniform(0, monos.size() - 1)];
    const auto image = theta_apply_monomial(m, *im);
    for (const auto& [pm, c] : image.terms()) {
      CHECK(degree(pm) == pl_degree(m));
      for (const auto& [w, q] : c.terms()) CHECK(w.degree() == pl_degree(m));
    }
  }
}

TEST_CASE("theta is multiplicative") {
  Rng rng(7);
  const auto im = theta_images(2, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const PL f = random_pl(rng, 4, 3), g = random_pl(rng, 4, 3);
    CHECK(theta_apply(f * g, *im) == theta_apply(f, *im) * theta_apply(g, *im));
  }
}

TEST_CASE("matrix columns equal theta of the column monomial") {
  Rng rng(5);
  const auto im = theta_images(2, 5);
  for (int v = 1; v <= 8; ++v) {
    const auto m = build_matrix(*im, v);
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t c = rng.uniform(0, m.cols.size() - 1);
      Phi rebuilt;
      for (const auto& [r, e] : m.columns[c]) rebuilt.add_term(m.rows[r], e);
      CHECK(rebuilt == theta_apply_monomial(m.cols[c], *im));
    }
  }
}

TEST_CASE("known one-prime functions vanish") {
  CHECK(theta_apply(f22_one_prime(), *theta_images(1, 2)).is_zero());
  CHECK(theta_apply(f44_one_prime(), *theta_images(1, 4)).is_zero());
  // the same functions with a wrong coefficient do not
  auto bad = f22_one_prime() + PL::monomial(PLMonomial::var(PLVar::li(2)), ShuffleElem::one());
  CHECK_FALSE(theta_apply(bad, *theta_images(1, 2)).is_zero());
}

TEST_CASE("Lyndon variable counts in the theta images") {
  CHECK(lyndon_variables(*theta_images_lyndon(2, 6)).size() == 30);
  CHECK(lyndon_variables(*theta_images_lyndon(2, 14)).size() == 296);
}

TEST_CASE("PL monomial text round trip") {
  for (const auto& m : pl_monomials(6, 7)) CHECK(parse_pl_monomial(to_string(m)) == m);
  CHECK(to_string(PLMonomial()) == "1");
}

TEST_CASE("matrix export and read back") {
  const auto dir = std::filesystem::temp_directory_path() / "ckforge_test_matrix";
  std::filesystem::create_directories(dir);
  const auto m = build_matrix(2, 3, 4);
  export_matrix(m, dir / "m");
  const auto back = read_matrix(dir / "m");
  CHECK(back.rows == m.rows.size());
  CHECK(back.cols == m.cols.size());
  CHECK(back.entries.size() == m.nnz());
  for (std::size_t c = 0; c < m.cols.size(); ++c) CHECK(back.col_labels[c] == to_string(m.cols[c]));
  for (const auto& [r, c, p] : back.entries) CHECK(p == to_lyndon_poly(*m.entry(r, c), 3));
  std::filesystem::remove_all(dir);
}
