#include <tuple>

#include "doctest.h"

#include "ckforge/dimensions.hpp"

using namespace ckforge;

namespace {

// number of nonnegative solutions of sum a_i w_i = v, by direct recursion
long brute_count(const std::vector<int>& w, std::size_t i, int v) {
  if (i == w.size()) return v == 0;
  long n = 0;
  for (int k = 0; k * w[i] <= v; ++k) n += brute_count(w, i + 1, v - k * w[i]);
  return n;
}

long binom(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Row {
  int d, v;
  long phi, pl;
};

// first degree with dim_pl > dim_phi for s = 2
const Row kTable[] = {
    {6, 251, 622565228, 622894943}, {7, 291, 9727962025, 9751434234}, {8, 99, 21381332, 21582623},
    {9, 109, 87699272, 87913253},   {10, 76, 9681421, 9802462},       {11, 82, 25152148, 25606281},
    {12, 68, 7495018, 7506398},     {13, 72, 14679671, 14817938},     {14, 65, 7354311, 7370562},
    {15, 68, 12174636, 12339732},   {16, 64, 7960970, 8045514},       {17, 66, 11301646, 11463717},
    {18, 64, 9050983, 9286340},     {19, 65, 11108926, 11275641},     {20, 63, 8824385, 8838834},
    {21, 64, 10558940, 10574205},   {22, 63, 9384203, 9394631},       {23, 64, 11044181, 11134313},
    {24, 64, 11044181, 11347166},   {25, 64, 11399096, 11523873},     {26, 64, 11399096, 11670040},
    {27, 64, 11654983, 11790526},   {28, 64, 11654983, 11889539},     {29, 64, 11837155, 11970650},
    {30, 64, 11837155, 12036909},
};

}  // namespace

TEST_CASE("weight tuples") {
  CHECK(pl_weights(4) == std::vector<int>{1, 1, 2, 3, 4});
  CHECK(phi_weights(2, 6) == std::vector<int>{1, 1, 1, 1, 3, 5});
  CHECK(phi_weights(1, 2) == std::vector<int>{1, 1});
}

TEST_CASE("dim_pl examples") {
  for (int n = 0; n <= 50; ++n) CHECK(dim_pl({2, 1, n}) == n + 1);
  for (int d = 1; d <= 20; ++d) {
    CHECK(dim_pl({2, d, 0}) == 1);
    CHECK(dim_phi({2, d, 0}) == 1);
  }
  CHECK(dim_pl({2, 6, 18}) == 996);
}

TEST_CASE("dim_phi examples") {
  for (int s = 1; s <= 4; ++s) {
    for (int v = 0; v <= 20; ++v) CHECK(dim_phi({s, 1, v}) == binom(2 * s + v - 1, 2 * s - 1));
  }
  CHECK(dim_phi({2, 6, 18}) == 4183);
  CHECK(dim_phi({2, 8, 99}) == 21381332);
  CHECK(dim_pl({2, 8, 99}) == 21582623);
}

TEST_CASE("counts agree with brute-force enumeration") {
  for (int s = 1; s <= 3; ++s) {
    for (int d = 1; d <= 7; ++d) {
      for (int v = 0; v <= 22; ++v) {
        CHECK(dim_pl({s, d, v}) == brute_count(pl_weights(d), 0, v));
        CHECK(dim_phi({s, d, v}) == brute_count(phi_weights(s, d), 0, v));
      }
    }
  }
}

TEST_CASE("monotone in d and in s") {
  for (int v = 0; v <= 60; ++v) {
    for (int d = 1; d < 12; ++d) {
      CHECK(dim_pl({2, d, v}) <= dim_pl({2, d + 1, v}));
      CHECK(dim_phi({2, d, v}) <= dim_phi({2, d + 1, v}));
    }
    for (int s = 1; s < 4; ++s) CHECK(dim_phi({s, 6, v}) <= dim_phi({s + 1, 6, v}));
  }
}

TEST_CASE("first_advantage examples") {
  const auto a8 = first_advantage(2, 8);
  REQUIRE(a8.has_value());
  CHECK(std::make_tuple(a8->v, a8->dim_phi, a8->dim_pl) == std::make_tuple(99, Integer(21381332), Integer(21582623)));
  const auto a14 = first_advantage(2, 14);
  REQUIRE(a14.has_value());
  CHECK(std::make_tuple(a14->v, a14->dim_phi, a14->dim_pl) == std::make_tuple(65, Integer(7354311), Integer(7370562)));
  CHECK_FALSE(first_advantage(2, 3).has_value());
  // one prime: already at (2, 2)
  const auto s1 = first_advantage(1, 2);
  REQUIRE(s1.has_value());
  CHECK(s1->v == 2);
}

TEST_CASE("first_advantage is the first v, by linear search") {
  for (int d = 6; d <= 12; ++d) {
    const auto a = first_advantage(2, d);
    REQUIRE(a.has_value());
    const auto pl = partition_counts(pl_weights(d), a->v), phi = partition_counts(phi_weights(2, d), a->v);
    for (int v = 0; v < a->v; ++v) CHECK(pl[v] <= phi[v]);
    CHECK(pl[a->v] > phi[a->v]);
  }
}

TEST_CASE("no advantage for s = 2, d < 6, v <= 1000") {
  for (int d = 1; d <= 5; ++d) {
    const auto pl = partition_counts(pl_weights(d), 1000), phi = partition_counts(phi_weights(2, d), 1000);
    for (int v = 0; v <= 1000; ++v) CHECK(pl[v] <= phi[v]);
    CHECK_FALSE(first_advantage(2, d, 1000).has_value());
  }
}

TEST_CASE("advantage table reproduces every row for d = 1..30") {
  const auto table = advantage_table(2, 1, 30);
  REQUIRE(table.size() == 30);
  for (int d = 1; d <= 5; ++d) CHECK_FALSE(table[d - 1].advantage.has_value());
  for (const auto& row : kTable) {
    const auto& got = table[row.d - 1];
    CHECK(got.d == row.d);
    REQUIRE(got.advantage.has_value());
    CHECK(got.advantage->v == row.v);
    CHECK(got.advantage->dim_phi == row.phi);
    CHECK(got.advantage->dim_pl == row.pl);
  }
}
