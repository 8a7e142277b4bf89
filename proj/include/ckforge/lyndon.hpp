#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "ckforge/alphabet.hpp"
#include "ckforge/poly.hpp"
#include "ckforge/rational.hpp"
#include "ckforge/shuffle.hpp"

namespace ckforge {

using LyndonMonomial = Monomial<Word>;
using LyndonPoly = Polynomial<Word, Rational>;
using LyndonPoint = std::map<Word, Rational>;

std::string lyndon_var_name(const Word& w);  // X[t1.t2]
std::string to_string(const LyndonPoly& p);
LyndonPoly parse_lyndon_poly(std::string_view text);

long degree(const LyndonMonomial& m);
std::set<Word> variables(const LyndonPoly& p);
Rational evaluate(const LyndonPoly& p, const LyndonPoint& x);

// Expansion of prod_j f_{l_j}^{sh i_j} / i_j! for the CFL factorization of w,
// as (word, integer coefficient) pairs. The coefficient of w itself is 1.
std::vector<std::pair<Word, long long>> lyndon_basis_expansion(const Word& w);

// In-process conversion cache, keyed by the canonical text of the element
// (the bare word for single words). Optional file backing per (s, d).
class ConversionCache {
 public:
  bool lookup(const std::string& key, LyndonPoly& out) const;
  void insert(const std::string& key, const LyndonPoly& value);
  std::size_t size() const;
  void clear();

  static std::filesystem::path file_for(const std::filesystem::path& dir, int s, int d);
  // returns number of records read; a missing file reads as 0
  std::size_t load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file, int s, int d) const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, LyndonPoly> map_;
};

ConversionCache& global_conversion_cache();

// The isomorphism f_l -> X_l. Throws if a letter exceeds degree d.
LyndonPoly to_lyndon_poly(const ShuffleElem& a, int d);
LyndonPoly to_lyndon_poly(const ShuffleElem& a, int d, ConversionCache* cache);

// Uncached triangular rewriting, exposed for tests.
LyndonPoly rewrite_to_lyndon(const ShuffleElem& a);

// inverse map: product of f_l's expanded by shuffle
ShuffleElem from_lyndon_poly(const LyndonPoly& p);

}  // namespace ckforge
