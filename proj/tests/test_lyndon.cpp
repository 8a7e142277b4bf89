#include <filesystem>
#include <map>

#include "doctest.h"

#include "ckforge/dimensions.hpp"
#include "ckforge/linalg.hpp"
#include "ckforge/lyndon.hpp"
#include "ckforge/random.hpp"

using namespace ckforge;

namespace {

const Generator t1 = Generator::tau(1), t2 = Generator::tau(2), s3 = Generator::sigma(3);

LyndonPoly X(const Word& w) { return LyndonPoly::variable(w, Rational(1)); }
LyndonPoly c(const Rational& q) { return LyndonPoly::constant(q); }

std::vector<Word> words_up_to(int s, int d, int v_max) {
  std::vector<Word> out;
  for (int v = 0; v <= v_max; ++v) {
    for (auto& w : enumerate_words(s, d, v)) out.push_back(std::move(w));
  }
  return out;
}

Word random_word(Rng& rng, const std::vector<Generator>& gens, int max_degree) {
  const int target = static_cast<int>(rng.uniform(0, max_degree));
  std::vector<Generator> letters;
  int deg = 0;
  for (int guard = 0; guard < 64 && deg < target; ++guard) {
    const auto& g = gens[rng.uniform(0, gens.size() - 1)];
    if (deg + g.degree() > target) continue;
    letters.push_back(g);
    deg += g.degree();
  }
  return Word(letters);
}

}  // namespace

TEST_CASE("to_lyndon_poly examples") {
  CHECK(to_lyndon_poly(ShuffleElem::word(Word{t1}), 1) == X(Word{t1}));
  CHECK(to_lyndon_poly(ShuffleElem::word(Word{t1, t1}), 1) == c(Rational(1, 2)) * X(Word{t1}) * X(Word{t1}));
  CHECK(to_lyndon_poly(ShuffleElem::word(Word{t2, t1}), 1) == X(Word{t1}) * X(Word{t2}) - X(Word{t1, t2}));
  CHECK(to_lyndon_poly(ShuffleElem::one(), 1) == c(1));
  CHECK(to_lyndon_poly(ShuffleElem(), 3).is_zero());
}

TEST_CASE("depth bound is enforced") {
  CHECK_THROWS_WITH(to_lyndon_poly(ShuffleElem::word(Word{s3}), 2), doctest::Contains("generator exceeds depth bound"));
  CHECK_NOTHROW(to_lyndon_poly(ShuffleElem::word(Word{s3}), 3));
}

TEST_CASE("evaluate examples") {
  const LyndonPoint ones{{Word{t1}, 1}, {Word{t2}, 1}, {Word{t1, t2}, 1}};
  CHECK(evaluate(X(Word{t1}) * X(Word{t2}) - X(Word{t1, t2}), ones) == 0);
  CHECK(evaluate(c(Rational(1, 2)) * X(Word{t1}) * X(Word{t1}), {{Word{t1}, 4}}) == 8);
  CHECK(evaluate(c(7), {}) == 7);
  CHECK_THROWS_WITH(evaluate(X(Word{s3}), ones), doctest::Contains("X[s3]"));
}

TEST_CASE("text format round trip") {
  const auto p = c(Rational(-3, 4)) * X(Word{t1}).pow(3, 1) * X(Word{t1, s3}) + c(2) * X(Word{t2});
  CHECK(parse_lyndon_poly(to_string(p)) == p);
  CHECK(lyndon_var_name(Word{t1, t2}) == "X[t1.t2]");
  CHECK(parse_lyndon_poly(to_string(LyndonPoly())).is_zero());
}

TEST_CASE("lyndon_basis_expansion contains w with coefficient 1") {
  for (const auto& w : words_up_to(2, 3, 6)) {
    if (w.empty()) continue;
    bool found = false;
    for (const auto& [x, k] : lyndon_basis_expansion(w)) {
      if (x == w) found = k == 1;
      CHECK_FALSE(w < x);  // triangular: nothing above w
    }
    CHECK(found);
  }
}

TEST_CASE("exhaustive, degree <= 5: ring isomorphism and inverse") {
  const auto words = words_up_to(2, 5, 5);
  for (const auto& u : words) {
    const auto fu = ShuffleElem::word(u);
    const auto pu = to_lyndon_poly(fu, 5);
    CHECK(pu == rewrite_to_lyndon(fu));
    CHECK(from_lyndon_poly(pu) == fu);
    for (const auto& v : words) {
      if (u.degree() + v.degree() > 5) continue;
      const auto fv = ShuffleElem::word(v);
      CHECK(to_lyndon_poly(shuffle(fu, fv), 5) == pu * to_lyndon_poly(fv, 5));
    }
  }
}

TEST_CASE("1000 seeded random pairs, degree <= 8: ring isomorphism") {
  Rng rng(4242);
  const auto gens = generators(2, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    const Word u = random_word(rng, gens, 4), v = random_word(rng, gens, 4);
    const auto fu = ShuffleElem::word(u), fv = ShuffleElem::word(v);
    const auto lhs = to_lyndon_poly(shuffle(fu, fv), 5);
    CHECK(lhs == to_lyndon_poly(fu, 5) * to_lyndon_poly(fv, 5));
    for (const auto& [m, q] : lhs.terms()) CHECK(degree(m) == u.degree() + v.degree());
  }
}

TEST_CASE("conversion is injective on each degree <= 6") {
  const auto lyn = lyndon_words(2, 5, 6);
  std::vector<int> weights;
  for (const auto& l : lyn) weights.push_back(l.degree());
  const auto monomial_counts = partition_counts(weights, 6);
  for (int v = 1; v <= 6; ++v) {
    const auto words = enumerate_words(2, 5, v);
    CHECK(Integer(words.size()) == monomial_counts[v]);
    std::map<LyndonMonomial, std::size_t> col;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> rows;
    for (const auto& w : words) {
      rows.emplace_back();
      const auto lp = to_lyndon_poly(ShuffleElem::word(w), 5);
      for (const auto& [m, q] : lp.terms()) {
        auto it = col.emplace(m, col.size()).first;
        rows.back().emplace_back(it->second, q);
      }
    }
    SparseRatMatrix a(rows.size(), col.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [k, q] : rows[r]) a.set(r, k, q);
    }
    CHECK(rank(a) == words.size());
  }
}

TEST_CASE("conversion cache persists to disk") {
  const auto dir = std::filesystem::temp_directory_path() / "ckforge_test_cache";
  std::filesystem::remove_all(dir);
  ConversionCache cache;
  const auto e = ShuffleElem::word(Word{t2, t1, t1});
  const auto direct = to_lyndon_poly(e, 1, &cache);
  CHECK(cache.size() > 0);
  const auto file = ConversionCache::file_for(dir, 2, 1);
  cache.save(file, 2, 1);
  ConversionCache warm;
  CHECK(warm.load(file) == cache.size());
  CHECK(to_lyndon_poly(e, 1, &warm) == direct);
  CHECK(ConversionCache().load(dir / "missing.tsv") == 0);
  std::filesystem::remove_all(dir);
}
