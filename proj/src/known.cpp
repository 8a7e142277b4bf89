#include <map>
#include <sstream>
#include <string>

#include "ckforge/linalg.hpp"
#include "ckforge/resultant.hpp"
#include "ckforge/upper_bound.hpp"

namespace ckforge {

namespace {

template <class C>
std::string show(const C& c) {
  std::ostringstream s;
  s << c;
  return s.str();
}

}  // namespace

Report verify_known() {
  Report rep;
  const auto f22 = f22_one_prime(), f44 = f44_one_prime();
  const auto t22 = theta_apply(f22, *theta_images(1, 2));
  rep.add("theta(F22) = 0", t22.is_zero(), std::to_string(t22.size()) + " terms");
  const auto t44 = theta_apply(f44, *theta_images(1, 4));
  rep.add("theta(F44) = 0", t44.is_zero(), std::to_string(t44.size()) + " terms");

  // f_t^2 = 2 f_tt
  const Generator t = Generator::tau(1);
  const ShuffleElem sq = ShuffleElem::word(Word{t, t}, 2), half_sq = ShuffleElem::word(Word{t, t}, 1);
  const std::map<std::pair<std::string, std::string>, ShuffleElem> expected{
      {{"Phi[t1:e0]^2", "log^2"}, sq},
      {{"Phi[t1:e1]^2", "Li1^2"}, sq},
      {{"Phi[t1:e0]*Phi[t1:e1]", "log*Li1"}, sq},
      {{"Phi[t1:e0]*Phi[t1:e1]", "Li2"}, half_sq},
  };
  const auto m = build_matrix(1, 2, 2);
  bool shape = m.rows.size() == 3 && m.cols.size() == 4;
  bool entries = shape;
  std::size_t seen = 0;
  for (std::size_t c = 0; c < m.cols.size() && shape; ++c) {
    for (const auto& [r, e] : m.columns[c]) {
      auto it = expected.find({to_string(m.rows[r]), to_string(m.cols[c])});
      if (it == expected.end() || !(it->second == e)) entries = false;
      ++seen;
    }
  }
  entries = entries && seen == expected.size();
  rep.add("M(theta_{2,2}) is 3x4", shape,
          std::to_string(m.rows.size()) + "x" + std::to_string(m.cols.size()));
  rep.add("M(theta_{2,2}) matches entrywise", entries);

  const auto ml = m.map_entries<LyndonPoly>([](const ShuffleElem& x) { return to_lyndon_poly(x, 2); });
  const std::size_t srank = symbolic_rank(ml);
  rep.add("symbolic kernel of (1,2,2) has rank 1", m.cols.size() - srank == 1,
          "rank " + std::to_string(srank));

  // F22 as a column vector, and the kernel at a sample point
  std::vector<Rational> v(m.cols.size(), Rational(0));
  for (std::size_t c = 0; c < m.cols.size(); ++c) {
    if (const ShuffleElem* x = f22.find(m.cols[c])) v[c] = x->coeff(Word{});
  }
  bool in_kernel = true;
  const auto x = sample_point(lyndon_variables(*theta_images_lyndon(1, 2)), 1);
  const auto spec = specialize(ml, x);
  for (const auto& y : spec.multiply(v)) in_kernel = in_kernel && sgn(y) == 0;
  const auto ker = kernel_basis(spec);
  bool spans = ker.size() == 1;
  if (spans) {
    // proportional: k_i v_j = k_j v_i
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) spans = spans && ker[0][i] * v[j] == ker[0][j] * v[i];
    }
  }
  rep.add("F22 spans the kernel of (1,2,2)", in_kernel && spans,
          ker.size() == 1 ? "kernel vector " + show(ker[0][0]) + "," + show(ker[0][1]) + "," + show(ker[0][2]) + "," +
                                show(ker[0][3])
                          : std::to_string(ker.size()) + " kernel vectors");
  return rep;
}

}  // namespace ckforge
