#include <algorithm>
#include <set>

#include "doctest.h"

#include "ckforge/alphabet.hpp"

using namespace ckforge;

namespace {

const Generator t1 = Generator::tau(1), t2 = Generator::tau(2), s3 = Generator::sigma(3);

// all sequences over gens with total degree v
void brute_words(const std::vector<Generator>& gens, int v, std::vector<Generator>& cur, std::set<Word>& out) {
  if (v == 0) {
    out.insert(Word(cur));
    return;
  }
  for (const auto& g : gens) {
    if (g.degree() > v) continue;
    cur.push_back(g);
    brute_words(gens, v - g.degree(), cur, out);
    cur.pop_back();
  }
}

bool lyndon_by_rotation(const Word& w) {
  const auto& c = w.code();
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (!(c < c.substr(k) + c.substr(0, k))) return false;
  }
  return true;
}

// number of factorizations of w into weakly decreasing Lyndon words
int count_cfl(const std::u16string& w, const std::u16string& prev) {
  if (w.empty()) return 1;
  int n = 0;
  for (std::size_t len = 1; len <= w.size(); ++len) {
    auto head = w.substr(0, len);
    if (!lyndon_by_rotation(Word(head))) continue;
    if (!prev.empty() && prev < head) continue;
    n += count_cfl(w.substr(len), head);
  }
  return n;
}

int mobius(int n) {
  int m = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    m = -m;
  }
  return n > 1 ? -m : m;
}

long ipow(long b, int e) {
  long r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

TEST_CASE("generator degrees, order and names") {
  CHECK(t1.degree() == 1);
  CHECK(Generator::tau(7).degree() == 1);
  CHECK(s3.degree() == 3);
  CHECK(Generator::sigma(9).degree() == 9);
  CHECK(t1 < t2);
  CHECK(t2 < s3);
  CHECK(s3 < Generator::sigma(5));
  CHECK(t1.name() == "t1");
  CHECK(s3.name() == "s3");
  CHECK(Generator::parse("s5") == Generator::sigma(5));
  CHECK_THROWS(Generator::sigma(4));
  CHECK_THROWS(Generator::sigma(1));
}

TEST_CASE("word text format and degree") {
  CHECK(Word{}.to_string() == "1");
  CHECK(Word{}.degree() == 0);
  const Word w{t1, t2, s3};
  CHECK(w.to_string() == "t1.t2.s3");
  CHECK(w.degree() == 5);
  CHECK(Word::parse("t1.t2.s3") == w);
  CHECK(Word::parse("1") == Word{});
  CHECK((Word{t1} + Word{s3}).degree() == Word{t1}.degree() + Word{s3}.degree());
}

TEST_CASE("enumerate_words examples") {
  CHECK(enumerate_words(1, 1, 2) == std::vector<Word>{Word{t1, t1}});
  CHECK(enumerate_words(2, 3, 2) == std::vector<Word>{Word{t1, t1}, Word{t1, t2}, Word{t2, t1}, Word{t2, t2}});
  CHECK(enumerate_words(1, 3, 3) == std::vector<Word>{Word{t1, t1, t1}, Word{s3}});
  CHECK(enumerate_words(1, 1, 0) == std::vector<Word>{Word{}});
}

TEST_CASE("enumerate_words against brute force") {
  for (int s = 1; s <= 2; ++s) {
    for (int d = 1; d <= 5; ++d) {
      for (int v = 0; v <= 7; ++v) {
        std::set<Word> expect;
        std::vector<Generator> cur;
        brute_words(generators(s, d), v, cur, expect);
        const auto got = enumerate_words(s, d, v);
        CHECK(std::set<Word>(got.begin(), got.end()) == expect);
        CHECK(got.size() == expect.size());
        CHECK(std::is_sorted(got.begin(), got.end()));
      }
    }
  }
}

TEST_CASE("is_lyndon examples and rotation oracle") {
  CHECK(is_lyndon(Word{t1, t2}));
  CHECK_FALSE(is_lyndon(Word{t2, t1}));
  CHECK(is_lyndon(Word{t1}));
  CHECK_FALSE(is_lyndon(Word{t1, t1}));
  CHECK_THROWS(is_lyndon(Word{}));
  for (int v = 1; v <= 8; ++v) {
    for (const auto& w : enumerate_words(2, 3, v)) CHECK(is_lyndon(w) == lyndon_by_rotation(w));
  }
}

TEST_CASE("lyndon_words examples") {
  CHECK(lyndon_words(1, 1, 3) == std::vector<Word>{Word{t1}});
  const auto l = lyndon_words(2, 1, 2);
  CHECK(std::set<Word>(l.begin(), l.end()) == std::set<Word>{Word{t1}, Word{t2}, Word{t1, t2}});
  CHECK(l.size() == 3);
}

TEST_CASE("lyndon counts follow the necklace formula") {
  for (int k = 1; k <= 3; ++k) {
    const auto words = lyndon_words(k, 1, 8);
    for (int n = 1; n <= 8; ++n) {
      long expect = 0;
      for (int e = 1; e <= n; ++e) {
        if (n % e == 0) expect += mobius(e) * ipow(k, n / e);
      }
      expect /= n;
      const long got = std::count_if(words.begin(), words.end(), [&](const Word& w) {
        return static_cast<int>(w.length()) == n;
      });
      CHECK(got == expect);
    }
  }
}

TEST_CASE("cfl_factorize examples") {
  CHECK(cfl_factorize(Word{t2, t1}) == std::vector<Word>{Word{t2}, Word{t1}});
  CHECK(cfl_factorize(Word{t1, t2}) == std::vector<Word>{Word{t1, t2}});
  CHECK(cfl_factorize(Word{t1, t1, t2}) == std::vector<Word>{Word{t1, t1, t2}});
  CHECK(cfl_factorize(Word{}).empty());
}

TEST_CASE("cfl_factorize exists, is unique and concatenates back, degree <= 8") {
  for (int v = 1; v <= 8; ++v) {
    for (const auto& w : enumerate_words(2, 3, v)) {
      const auto f = cfl_factorize(w);
      Word cat;
      for (const auto& l : f) {
        CHECK(lyndon_by_rotation(l));
        cat = cat + l;
      }
      CHECK(cat == w);
      for (std::size_t i = 1; i < f.size(); ++i) CHECK_FALSE(f[i - 1] < f[i]);
      CHECK(count_cfl(w.code(), {}) == 1);
    }
  }
}

TEST_CASE("word order is total and sorting is idempotent") {
  auto words = enumerate_words(2, 5, 6);
  std::reverse(words.begin(), words.end());
  auto once = words;
  std::sort(once.begin(), once.end());
  auto twice = once;
  std::sort(twice.begin(), twice.end());
  CHECK(once == twice);
  for (std::size_t i = 1; i < once.size(); ++i) CHECK(once[i - 1] < once[i]);
}
