#pragma once

#include <array>
#include <bit>
#include <functional>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ckforge/flatpoly.hpp"
#include "ckforge/lyndon.hpp"
#include "ckforge/poly.hpp"
#include "ckforge/theta.hpp"

namespace ckforge {

// Packed variable layout for the two-prime construction: PL variables first,
// then Lyndon variables in registration order, X last.
namespace ckvar {
constexpr int kLog = 0;
constexpr int li(int n) { return n; }
constexpr int kPL = 7;  // log, Li1..Li6
constexpr int kFirstLyndon = kPL;
constexpr int kMaxLyndon = 48;
constexpr int kX = 55;
}  // namespace ckvar

// f_w for s = 2 as packed polynomials in Lyndon variables.
class PolyContext {
 public:
  explicit PolyContext(int depth = 6);

  const FlatPoly& f(const Word& w);
  int lyndon_var(const Word& l);
  const std::vector<Word>& lyndon_vars() const { return lyndon_; }
  int depth() const { return depth_; }

  FlatPoly from_lyndon(const LyndonPoly& p);
  // PL-degree and word-degree weight vectors over the packed variables
  std::vector<int> pl_weights() const;
  std::vector<int> word_weights() const;

  std::map<PLMonomial, LyndonPoly> to_pl_poly(const FlatPoly& p) const;
  FlatPoly from_pl_poly(const std::map<PLMonomial, LyndonPoly>& p);
  // value vector for FlatPoly::evaluate; PL slots and X filled by the caller
  std::vector<Rational> lyndon_values(const LyndonPoint& x) const;

 private:
  int depth_;
  std::map<Word, FlatPoly> f_;
  std::map<Word, int> index_;
  std::vector<Word> lyndon_;
};

// Polynomial in X with packed coefficients; coeffs[k] multiplies X^k.
struct NuPoly {
  std::vector<FlatPoly> coeffs;
  int degree() const;
  FlatPoly at(int k) const { return k >= 0 && k < static_cast<int>(coeffs.size()) ? coeffs[k] : FlatPoly(); }
  // descending coefficient list, leading first
  std::vector<FlatPoly> descending() const;
};

NuPoly split_x(const FlatPoly& p, int xvar = ckvar::kX);

// Li2 - 1/2 log Li1
FlatPoly f22_poly();

NuPoly build_nu4(PolyContext& ctx);
NuPoly build_nu6(PolyContext& ctx);

// Determinant of the Sylvester matrix, columns of f first:
// S[i+j][j] = f[i] for j < deg g, S[i+j][deg g + j] = g[i] for j < deg f.
// Expanded column by column over subsets of used rows.
template <class T>
T sylvester_resultant(const std::vector<T>& f, const std::vector<T>& g, const T& one) {
  if (f.empty() || g.empty()) throw std::invalid_argument("not of stated degree");
  if (detail::coeff_is_zero(f.front()) || detail::coeff_is_zero(g.front()))
    throw std::invalid_argument("not of stated degree");
  const int m = static_cast<int>(f.size()) - 1, n = static_cast<int>(g.size()) - 1, N = m + n;
  if (N > 30) throw std::invalid_argument("Sylvester matrix too large");
  if (N == 0) return one;
  auto entry = [&](int r, int c) -> const T* {
    const std::vector<T>& src = c < n ? f : g;
    const int i = r - (c < n ? c : c - n);
    if (i < 0 || i >= static_cast<int>(src.size()) || detail::coeff_is_zero(src[i])) return nullptr;
    return &src[i];
  };
  std::map<std::uint32_t, T> layer;
  layer.emplace(0u, one);
  for (int c = 0; c < N; ++c) {
    std::map<std::uint32_t, T> next;
    for (const auto& [mask, val] : layer) {
      for (int r = 0; r < N; ++r) {
        if (mask >> r & 1) continue;
        const T* e = entry(r, c);
        if (!e) continue;
        T prod = val * *e;
        const bool odd = std::popcount(mask >> (r + 1)) & 1;
        auto it = next.find(mask | (1u << r));
        if (it == next.end()) {
          next.emplace(mask | (1u << r), odd ? T(-prod) : prod);
        } else if (odd) {
          it->second -= prod;
        } else {
          it->second += prod;
        }
      }
    }
    layer = std::move(next);
  }
  auto it = layer.find((1u << N) - 1);
  return it == layer.end() ? T{} : it->second;
}

FlatPoly sylvester_resultant(const NuPoly& f, const NuPoly& g);

// in-memory extraction for small inputs: strip log^6, then divide by F22
// with Li2 as main variable; throws "factorization claim violated"
FlatPoly extract_f618(const FlatPoly& resultant, FlatPoly* stripped = nullptr);

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;
  void add(std::string name, bool ok, std::string detail = {});
  void append(const Report& other);
  bool ok() const;
};

// Named intermediates as polynomials in the cocycle variables (s = 2,
// p = t1, q = t2), with theta images taken from the theta module.
PhiPoly<ShuffleElem> delta_matrix_det();        // determinant of the Li1/Li2 system
PhiPoly<ShuffleElem> delta_phi_e1_p_adjugate();  // Delta * Phi[t1:e1] by Cramer's rule
PhiPoly<ShuffleElem> delta_phi_e1_q_adjugate();

// s = 1: theta(F22) = theta(F44) = 0, the 3x4 matrix of theta_{2,2} and its
// rank-one kernel
Report verify_known();

Report verify_lemmas();
Report verify_sigma_elimination();
Report verify_nu_roots(PolyContext& ctx, const NuPoly& nu4, const NuPoly& nu6, int trials, std::uint64_t seed);
Report verify_elimination_identities(PolyContext& ctx, const NuPoly& nu4, const NuPoly& nu6, int trials,
                                     std::uint64_t seed);
// coefficient-level ledger of nu4 and nu6
Report verify_structure(PolyContext& ctx, const NuPoly& nu4, const NuPoly& nu6);

// The full resultant does not fit in memory, so it is produced in slices
// keyed by the exponents of Li2..Li6. For a fixed (Li3..Li6) part the slices
// arrive with decreasing Li2 exponent, which is the order the division by
// F22 = Li2 - 1/2 log Li1 consumes them.
using SliceKey = std::array<unsigned, 5>;
struct ResultantSlice {
  SliceKey key{};
  FlatPoly resultant;  // terms of Res(nu4, nu6) with this key
  FlatPoly quotient;   // terms of F618 with Li2 exponent key[0] - 1
};
struct StreamStats {
  std::size_t slices = 0;
  std::size_t resultant_terms = 0;
  std::size_t f618_terms = 0;
  std::size_t max_slice_terms = 0;
  double seconds = 0;
};
StreamStats stream_f618(const NuPoly& nu4, const NuPoly& nu6, const std::function<void(const ResultantSlice&)>& sink);

struct F618Options {
  std::ostream* out = nullptr;  // PLPoly text of F618
  int trials = 0;               // random rational points for theta(F618) = 0
  int points = 0;               // integer points for the kernel check
  std::uint64_t seed = 1;
};
struct F618Result {
  Report report;
  StreamStats stats;
};
// builds nu4, nu6 and streams the resultant; the report carries the degree
// and divisibility ledger plus whichever evaluation checks were requested
F618Result construct_f618(PolyContext& ctx, const F618Options& opt);

// Random rational assignment of Phi variables and Lyndon variables, with the
// theta images of log, Li_1..Li_depth evaluated there.
struct ThetaSample {
  LyndonPoint lyndon;
  std::map<PhiVar, Rational> phi;
  std::vector<Rational> pl;  // index 0 = log
};
ThetaSample sample_theta(int depth, const std::vector<Word>& extra_vars, std::uint64_t seed);
Rational evaluate_phi(const PhiPoly<LyndonPoly>& p, const LyndonPoint& x, const std::map<PhiVar, Rational>& phi);

// PLPoly text format: header line, then "pl-monomial<TAB>lyndon-poly" per term.
void write_pl_poly_header(std::ostream& out, int s, int d, long v);
void write_pl_poly_terms(std::ostream& out, const std::map<PLMonomial, LyndonPoly>& p);
void write_pl_poly(std::ostream& out, const std::map<PLMonomial, LyndonPoly>& p, int s, int d, long v);
std::map<PLMonomial, LyndonPoly> read_pl_poly(std::istream& in);

// Experimental: nu_{2d} obtained by eliminating Phi^{sigma}, Phi_e1 and
// Phi_e0^{tq} at a fixed integer point of the Lyndon variables. Variables:
// 0 = log, n = Li_n (n <= 2d), 2d + 1 = X.
struct GeneralNu {
  int d = 0;
  LyndonPoint point;
  NuPoly nu;
  std::optional<bool> leading_divisible_by_f22;  // recorded, not asserted
};
GeneralNu build_general_nu(int d, std::uint64_t seed);
// P_{2d}(Phi_e0^{tp}) == 0 at random cocycle values, same Lyndon point
Report verify_general_nu(const GeneralNu& g, int trials, std::uint64_t seed);

}  // namespace ckforge
