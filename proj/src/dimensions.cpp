#include "ckforge/dimensions.hpp"

#include <stdexcept>

#include "ckforge/parallel.hpp"

namespace ckforge {

namespace {

void check(const DimQuery& q) {
  if (q.s < 1 || q.d < 1 || q.v < 0) throw std::invalid_argument("need s >= 1, d >= 1, v >= 0");
}

}  // namespace

std::vector<int> pl_weights(int d) {
  std::vector<int> w{1};
  for (int n = 1; n <= d; ++n) w.push_back(n);
  return w;
}

std::vector<int> phi_weights(int s, int d) {
  std::vector<int> w(2 * s, 1);
  for (int k = 3; k <= d; k += 2) w.push_back(k);
  return w;
}

std::vector<Integer> partition_counts(const std::vector<int>& weights, int v_max) {
  std::vector<Integer> c(v_max + 1, 0);
  c[0] = 1;
  for (int w : weights) {
    for (int v = w; v <= v_max; ++v) c[v] += c[v - w];
  }
  return c;
}

Integer dim_pl(const DimQuery& q) {
  check(q);
  return partition_counts(pl_weights(q.d), q.v)[q.v];
}

Integer dim_phi(const DimQuery& q) {
  check(q);
  return partition_counts(phi_weights(q.s, q.d), q.v)[q.v];
}

std::optional<Advantage> first_advantage(int s, int d, int v_max) {
  check({s, d, 0});
  auto pl = partition_counts(pl_weights(d), v_max);
  auto phi = partition_counts(phi_weights(s, d), v_max);
  for (int v = 0; v <= v_max; ++v) {
    if (pl[v] > phi[v]) return Advantage{v, phi[v], pl[v]};
  }
  return std::nullopt;
}

std::vector<AdvantageRow> advantage_table(int s, int d_min, int d_max, int v_max) {
  if (d_min < 1 || d_max < d_min) throw std::invalid_argument("need 1 <= d-min <= d-max");
  std::vector<AdvantageRow> rows(d_max - d_min + 1);
  parallel_for(rows.size(), [&](std::size_t i) {
    int d = d_min + static_cast<int>(i);
    rows[i] = {d, first_advantage(s, d, v_max)};
  });
  return rows;
}

}  // namespace ckforge
