#include "ckforge/upper_bound.hpp"

#include <chrono>

#include "ckforge/random.hpp"

namespace ckforge {

LyndonPoint sample_point(const std::set<Word>& vars, std::uint64_t seed) {
  LyndonPoint x;
  for (const auto& w : vars) {
    Rng rng(hash_string(w.to_string(), seed));
    x.emplace(w, Rational(static_cast<unsigned long>(rng.uniform(1, 1ULL << 16))));
  }
  return x;
}

std::uint64_t point_hash(const LyndonPoint& x) {
  std::uint64_t h = 0;
  for (const auto& [w, c] : x) h = hash_string(w.to_string() + "=" + to_string(c), h);
  return h;
}

ThetaImages<Rational> specialize_images(const ThetaImages<LyndonPoly>& im, const LyndonPoint& x) {
  return map_images(im, Rational(1), [&](const LyndonPoly& p) { return evaluate(p, x); });
}

ThetaImages<ModInt> specialize_images_mod(const ThetaImages<LyndonPoly>& im, const LyndonPoint& x, std::uint64_t p) {
  return map_images(im, ModInt{1, p}, [&](const LyndonPoly& c) { return ModInt{evaluate_mod(c, x, p), p}; });
}

SparseRatMatrix specialized_matrix(int s, int d, int v, const LyndonPoint& x) {
  auto im = specialize_images(*theta_images_lyndon(s, d), x);
  return to_sparse(build_matrix(im, v));
}

namespace {

std::size_t modular_rank(const ThetaMatrix<ModInt>& m) {
  const bool flip = m.rows.size() > m.cols.size();
  const std::size_t R = flip ? m.cols.size() : m.rows.size();
  const std::size_t C = flip ? m.rows.size() : m.cols.size();
  std::vector<std::vector<std::uint64_t>> dense(R, std::vector<std::uint64_t>(C, 0));
  std::uint64_t p = 0;
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    for (const auto& [r, e] : m.columns[c]) {
      p = e.p;
      if (flip) {
        dense[c][r] = e.v;
      } else {
        dense[r][c] = e.v;
      }
    }
  }
  if (p == 0) return 0;
  return rank_mod_p(std::move(dense), C, p);
}

}  // namespace

UpperBound run_upper_bound(int s, int d, int v, std::uint64_t seed, Strategy strategy, int retries) {
  if (s < 1 || d < 1 || v < 0) throw std::invalid_argument("need s >= 1, d >= 1, v >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  UpperBound out;
  out.s = s;
  out.d = d;
  out.v = v;
  auto& prov = out.provenance;
  prov.seed = seed;
  prov.strategy = strategy;
  auto im = theta_images_lyndon(s, d);
  auto vars = lyndon_variables(*im);
  prov.lyndon_vars = vars.size();
  prov.rows = phi_monomials(s, d, v).size();
  prov.cols = pl_monomials(d, v).size();

  for (int attempt = 0; attempt <= retries; ++attempt) {
    prov.attempts = attempt + 1;
    const std::uint64_t point_seed = attempt == 0 ? seed : mix64(seed + 0x632be59bd9b4e019ULL * attempt);
    const LyndonPoint x = sample_point(vars, point_seed);
    prov.point_seed = point_seed;
    prov.x_hash = point_hash(x);
    prov.primes.clear();
    prov.ranks.clear();
    if (strategy == Strategy::Exact) {
      auto m = build_matrix(specialize_images(*im, x), v);
      out.rank = rank(to_sparse(m));
      break;
    }
    Rng prime_rng(mix64(point_seed ^ 0x5851f42d4c957f2dULL));
    bool bad = false;
    for (int k = 0; k < kDefaultPrimes; ++k) {
      const std::uint64_t p = random_prime_62(prime_rng);
      try {
        auto m = build_matrix(specialize_images_mod(*im, x, p), v);
        prov.primes.push_back(p);
        prov.ranks.push_back(modular_rank(m));
      } catch (const std::domain_error&) {
        bad = true;  // p divides a denominator; draw another point
        break;
      }
    }
    if (bad) continue;
    const bool agree = std::all_of(prov.ranks.begin(), prov.ranks.end(), [&](std::size_t r) { return r == prov.ranks[0]; });
    out.rank = *std::max_element(prov.ranks.begin(), prov.ranks.end());
    if (agree) break;
    if (attempt == retries) throw std::runtime_error("degenerate sample");
  }
  out.r = prov.cols - out.rank;
  prov.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<ScanCell> scan_zero_region(int s, int d_max, int v_max, std::uint64_t seed) {
  std::vector<ScanCell> cells;
  for (int d = 1; d <= d_max; ++d) {
    for (int v = 1; v <= v_max; ++v) cells.push_back({d, v, std::nullopt, {}});
  }
  for (auto& cell : cells) {
    try {
      cell.r = run_upper_bound(s, cell.d, cell.v, seed).r;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }
  return cells;
}

}  // namespace ckforge
