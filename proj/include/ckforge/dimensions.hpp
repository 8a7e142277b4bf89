#pragma once

#include <optional>
#include <vector>

#include "ckforge/rational.hpp"

namespace ckforge {

struct DimQuery {
  int s = 1;
  int d = 1;
  int v = 0;
};

// weight tuples of the two monomial bases
std::vector<int> pl_weights(int d);          // 1, 1, 2, ..., d
std::vector<int> phi_weights(int s, int d);  // 1 (2s times), 3, 5, ... <= d

// coefficients 0..v_max of prod 1/(1 - q^w)
std::vector<Integer> partition_counts(const std::vector<int>& weights, int v_max);

Integer dim_pl(const DimQuery& q);
Integer dim_phi(const DimQuery& q);

struct Advantage {
  int v;
  Integer dim_phi;
  Integer dim_pl;
};

constexpr int kDefaultAdvantageCap = 400;
std::optional<Advantage> first_advantage(int s, int d, int v_max = kDefaultAdvantageCap);

struct AdvantageRow {
  int d;
  std::optional<Advantage> advantage;
};
std::vector<AdvantageRow> advantage_table(int s, int d_min, int d_max, int v_max = kDefaultAdvantageCap);

}  // namespace ckforge
