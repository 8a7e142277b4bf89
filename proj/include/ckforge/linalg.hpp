#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ckforge/lyndon.hpp"
#include "ckforge/modular.hpp"
#include "ckforge/rational.hpp"
#include "ckforge/theta.hpp"

namespace ckforge {

class SparseRatMatrix {
 public:
  using Row = std::map<std::size_t, Rational>;

  SparseRatMatrix() = default;
  SparseRatMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}
  static SparseRatMatrix from_dense(const std::vector<std::vector<Rational>>& a);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const;
  const std::vector<Row>& row_data() const { return rows_; }

  void set(std::size_t r, std::size_t c, const Rational& x);
  Rational get(std::size_t r, std::size_t c) const;
  std::vector<Rational> multiply(const std::vector<Rational>& x) const;
  SparseRatMatrix transposed() const;

 private:
  std::size_t cols_ = 0;
  std::vector<Row> rows_;
};

std::size_t rank(const SparseRatMatrix& m);
std::vector<std::vector<Rational>> kernel_basis(const SparseRatMatrix& m);

// dense elimination over Z/p, p an odd prime below 2^62
std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> rows, std::size_t cols, std::uint64_t p);
std::size_t rank_mod_p(const SparseRatMatrix& m, std::uint64_t p);

SparseRatMatrix to_sparse(const ThetaMatrix<Rational>& m);
SparseRatMatrix specialize(const ThetaMatrix<LyndonPoly>& m, const LyndonPoint& x);
SparseRatMatrix specialize(const ThetaMatrix<ShuffleElem>& m, const LyndonPoint& x);

std::uint64_t evaluate_mod(const LyndonPoly& p, const LyndonPoint& x, std::uint64_t prime);
std::size_t rank_mod_p(const ThetaMatrix<LyndonPoly>& m, const LyndonPoint& x, std::uint64_t prime);

// Rank over the fraction field of Q[L] by division-free elimination; only
// sensible for small matrices.
std::size_t symbolic_rank(const ThetaMatrix<LyndonPoly>& m);

}  // namespace ckforge
