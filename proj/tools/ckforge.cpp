#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ckforge/dimensions.hpp"
#include "ckforge/lyndon.hpp"
#include "ckforge/parallel.hpp"
#include "ckforge/resultant.hpp"
#include "ckforge/theta.hpp"
#include "ckforge/upper_bound.hpp"

using namespace ckforge;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

enum class Format { Text, Records };

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string cache_dir;
  Format format = Format::Text;
};

// Every result is a record; text output is rendered from the same record.
class Emitter {
 public:
  explicit Emitter(Format f) : format_(f) {}
  void emit(const json& rec, const std::string& text) {
    if (format_ == Format::Records) {
      std::cout << rec.dump() << '\n';
    } else {
      std::cout << text << '\n';
    }
  }

 private:
  Format format_;
};

json big(const Integer& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

std::string str(const Integer& x) { return x.get_str(); }

class Timer {
 public:
  explicit Timer(std::string what) : what_(std::move(what)), t0_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    std::cerr << "[time] " << what_ << ": " << s << " s\n";
  }

 private:
  std::string what_;
  std::chrono::steady_clock::time_point t0_;
};

// Loads the conversion cache for (s, d) and writes it back if it grew.
class CacheScope {
 public:
  CacheScope(const std::string& dir, int s, int d) {
    if (dir.empty()) return;
    file_ = ConversionCache::file_for(dir, s, d);
    s_ = s;
    d_ = d;
    global_conversion_cache().load(*file_);
    before_ = global_conversion_cache().size();
  }
  ~CacheScope() {
    if (!file_ || global_conversion_cache().size() == before_) return;
    try {
      global_conversion_cache().save(*file_, s_, d_);
    } catch (const std::exception& e) {
      std::cerr << "warning: cache not saved: " << e.what() << "\n";
    }
  }

 private:
  std::optional<fs::path> file_;
  int s_ = 0, d_ = 0;
  std::size_t before_ = 0;
};

int report_out(Emitter& em, const std::string& cmd, const Report& rep) {
  for (const auto& c : rep.checks) {
    json rec;
    rec["cmd"] = cmd;
    rec["check"] = c.name;
    rec["ok"] = c.ok;
    rec["detail"] = c.detail;
    em.emit(rec, std::string(c.ok ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : "  [" + c.detail + "]"));
  }
  json rec;
  rec["cmd"] = cmd;
  rec["ok"] = rep.ok();
  rec["checks"] = rep.checks.size();
  em.emit(rec, std::string(rep.ok() ? "all " : "FAILED: ") + std::to_string(rep.checks.size()) + " checks");
  return rep.ok() ? 0 : 1;
}

void emit_advantage(Emitter& em, int s, const AdvantageRow& row) {
  json rec;
  rec["cmd"] = "scan";
  rec["s"] = s;
  rec["d"] = row.d;
  if (row.advantage) {
    rec["v"] = row.advantage->v;
    rec["dim_phi"] = big(row.advantage->dim_phi);
    rec["dim_pl"] = big(row.advantage->dim_pl);
  } else {
    rec["v"] = nullptr;
  }
  std::ostringstream t;
  t << std::setw(3) << row.d;
  if (row.advantage) {
    t << std::setw(6) << row.advantage->v << std::setw(24) << str(row.advantage->dim_phi) << std::setw(24)
      << str(row.advantage->dim_pl);
  }
  em.emit(rec, t.str());
}

json provenance_record(const UpperBound& ub) {
  const auto& p = ub.provenance;
  json rec;
  rec["cmd"] = "upper-bound";
  rec["s"] = ub.s;
  rec["d"] = ub.d;
  rec["v"] = ub.v;
  rec["r"] = ub.r;
  rec["rank"] = ub.rank;
  rec["seed"] = p.seed;
  rec["point_seed"] = p.point_seed;
  rec["x_hash"] = p.x_hash;
  rec["strategy"] = p.strategy == Strategy::Exact ? "exact" : "modular";
  rec["rows"] = p.rows;
  rec["cols"] = p.cols;
  rec["lyndon_vars"] = p.lyndon_vars;
  rec["primes"] = p.primes;
  rec["ranks"] = p.ranks;
  rec["attempts"] = p.attempts;
  return rec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ckforge: polylogarithmic motivic Chabauty-Kim geometric step"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string format = "text";
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker budget, 0 = all cores")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, "conversion cache directory")->envname("CKFORGE_CACHE");
  app.add_option("--format", format, "text or records")->check(CLI::IsMember({"text", "records"}));

  int s = 2, d = 1, v = 0;
  auto* dims = app.add_subcommand("dims", "dim_phi and dim_pl of a graded piece");
  dims->add_option("--s", s);
  dims->add_option("--d", d);
  dims->add_option("--v", v);

  int d_min = 0, d_max = 0, v_max = 0;
  auto add_scan_opts = [&](CLI::App* sc) {
    sc->add_option("--s", s)->required();
    sc->add_option("--d-min", d_min, "first depth of the advantage table");
    sc->add_option("--d-max", d_max)->required();
    sc->add_option("--v-max", v_max, "degree cap");
  };
  auto* dims_scan = dims->add_subcommand("scan", "first degree with dim_pl > dim_phi, per depth");
  add_scan_opts(dims_scan);
  auto* scan = app.add_subcommand("scan", "advantage table with --d-min, upper-bound grid otherwise");
  add_scan_opts(scan);

  bool exact = false, kernel = false;
  int retries = 3;
  auto* ub = app.add_subcommand("upper-bound", "specialized kernel dimension r");
  ub->add_option("--s", s)->required();
  ub->add_option("--d", d)->required();
  ub->add_option("--v", v)->required();
  ub->add_flag("--exact", exact, "exact rational rank");
  ub->add_option("--retries", retries)->capture_default_str();
  ub->add_flag("--kernel", kernel, "print an exact kernel basis at the sampled point");

  std::string out;
  bool lyndon = false;
  auto* mat = app.add_subcommand("matrix", "build and export M(theta_{d,v})");
  mat->add_option("--s", s)->required();
  mat->add_option("--d", d)->required();
  mat->add_option("--v", v)->required();
  mat->add_option("--out", out, "output prefix")->required();
  mat->add_flag("--lyndon", lyndon, "entries as Lyndon polynomials");

  auto* cons = app.add_subcommand("construct-f618", "Res(nu4, nu6) / (log^6 F22) as PLPoly text");
  cons->add_option("--out", out, "output file, stdout if omitted");

  int trials = 20, points = 3, general_d = 0;
  auto* ver = app.add_subcommand("verify-f618", "identities, ledger and kernel checks for F618");
  ver->add_option("--trials", trials)->capture_default_str();
  ver->add_option("--points", points)->capture_default_str();
  ver->add_option("--general-nu", general_d, "experimental: build and check nu_{2d} for this d instead")
      ->check(CLI::Range(2, 5));

  auto* known = app.add_subcommand("verify-known", "one-prime kernel facts");

  auto* cache = app.add_subcommand("cache", "inspect or clear the conversion cache");
  cache->require_subcommand(1);
  auto* cache_info = cache->add_subcommand("info");
  auto* cache_clear = cache->add_subcommand("clear");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  g.format = format == "records" ? Format::Records : Format::Text;
  set_worker_budget(g.threads);
  Emitter em(g.format);

  try {
    if (*dims && !*dims_scan) {
      if (!dims->count("--s") || !dims->count("--d") || !dims->count("--v")) {
        std::cerr << "dims needs --s, --d and --v\n";
        return 2;
      }
      const DimQuery q{s, d, v};
      const Integer phi = dim_phi(q), pl = dim_pl(q);
      json rec;
      rec["cmd"] = "dims";
      rec["s"] = s;
      rec["d"] = d;
      rec["v"] = v;
      rec["dim_phi"] = big(phi);
      rec["dim_pl"] = big(pl);
      em.emit(rec, str(phi) + " " + str(pl));
      return 0;
    }
    if (*dims_scan || (*scan && (scan->count("--d-min") || !scan->count("--v-max")))) {
      Timer t("scan");
      const int lo = d_min > 0 ? d_min : 1, cap = v_max > 0 ? v_max : kDefaultAdvantageCap;
      for (const auto& row : advantage_table(s, lo, d_max, cap)) emit_advantage(em, s, row);
      return 0;
    }
    if (*scan) {
      Timer t("scan");
      CacheScope cs(g.cache_dir, s, d_max);
      for (const auto& cell : scan_zero_region(s, d_max, v_max, g.seed)) {
        json rec;
        rec["cmd"] = "scan";
        rec["s"] = s;
        rec["d"] = cell.d;
        rec["v"] = cell.v;
        if (cell.r) {
          rec["r"] = *cell.r;
        } else {
          rec["r"] = nullptr;
          rec["error"] = cell.error;
        }
        std::ostringstream text;
        text << std::setw(3) << cell.d << std::setw(4) << cell.v << "  "
             << (cell.r ? "r=" + std::to_string(*cell.r) : "error: " + cell.error);
        em.emit(rec, text.str());
      }
      return 0;
    }
    if (*ub) {
      Timer t("upper-bound");
      CacheScope cs(g.cache_dir, s, d);
      const auto res = run_upper_bound(s, d, v, g.seed, exact ? Strategy::Exact : Strategy::Modular, retries);
      const auto rec = provenance_record(res);
      std::ostringstream text;
      text << "r=" << res.r << "\n"
           << "provenance: seed=" << res.provenance.seed << " point_seed=" << res.provenance.point_seed
           << " x_hash=" << res.provenance.x_hash << " strategy=" << rec["strategy"].get<std::string>()
           << " shape=" << res.provenance.rows << "x" << res.provenance.cols << " rank=" << res.rank
           << " lyndon_vars=" << res.provenance.lyndon_vars << " primes=" << json(res.provenance.primes).dump();
      em.emit(rec, text.str());
      if (kernel) {
        const auto x = sample_point(lyndon_variables(*theta_images_lyndon(s, d)), res.provenance.point_seed);
        const auto m = specialized_matrix(s, d, v, x);
        const auto cols = pl_monomials(d, v);
        std::size_t k = 0;
        for (const auto& vec : kernel_basis(m)) {
          json kr;
          kr["cmd"] = "kernel";
          kr["index"] = k++;
          json entries = json::object();
          std::string text_line = "kernel[" + std::to_string(k - 1) + "]";
          for (std::size_t c = 0; c < vec.size(); ++c) {
            if (sgn(vec[c]) == 0) continue;
            entries[to_string(cols[c])] = vec[c].get_str();
            text_line += " " + to_string(cols[c]) + ":" + vec[c].get_str();
          }
          kr["entries"] = entries;
          em.emit(kr, text_line);
        }
      }
      return 0;
    }
    if (*mat) {
      Timer t("matrix");
      CacheScope cs(g.cache_dir, s, d);
      const auto m = build_matrix(s, d, v);
      if (lyndon) {
        export_matrix(m.map_entries<LyndonPoly>([&](const ShuffleElem& x) { return to_lyndon_poly(x, d); }), out);
      } else {
        export_matrix(m, out);
      }
      json rec;
      rec["cmd"] = "matrix";
      rec["s"] = s;
      rec["d"] = d;
      rec["v"] = v;
      rec["rows"] = m.rows.size();
      rec["cols"] = m.cols.size();
      rec["nnz"] = m.nnz();
      rec["prefix"] = out;
      em.emit(rec, "wrote " + out + ".mtx (" + std::to_string(m.rows.size()) + "x" + std::to_string(m.cols.size()) +
                       ", " + std::to_string(m.nnz()) + " nonzeros)");
      return 0;
    }
    if (*cons) {
      Timer t("construct-f618");
      CacheScope cs(g.cache_dir, 2, 6);
      PolyContext ctx;
      std::ofstream file;
      F618Options opt;
      opt.seed = g.seed;
      if (out.empty()) {
        opt.out = &std::cout;
      } else {
        file.open(out);
        if (!file) throw std::runtime_error("cannot open " + out);
        opt.out = &file;
      }
      const auto res = construct_f618(ctx, opt);
      // the polynomial owns stdout when no file is given
      Emitter summary(out.empty() ? Format::Text : g.format);
      std::ostream& sink = out.empty() ? std::cerr : std::cout;
      json rec;
      rec["cmd"] = "construct-f618";
      rec["ok"] = res.report.ok();
      rec["slices"] = res.stats.slices;
      rec["resultant_terms"] = res.stats.resultant_terms;
      rec["f618_terms"] = res.stats.f618_terms;
      if (!out.empty()) rec["out"] = out;
      for (const auto& c : res.report.checks) {
        if (!c.ok) sink << "FAIL " << c.name << "  [" << c.detail << "]\n";
      }
      if (out.empty()) {
        sink << "f618_terms=" << res.stats.f618_terms << " resultant_terms=" << res.stats.resultant_terms << "\n";
      } else {
        summary.emit(rec, "wrote " + out + ": " + std::to_string(res.stats.f618_terms) + " terms in " +
                              std::to_string(res.stats.slices) + " slices");
      }
      return res.report.ok() ? 0 : 1;
    }
    if (*ver) {
      Timer t("verify-f618");
      if (general_d) {
        const auto gn = build_general_nu(general_d, g.seed);
        Report rep = verify_general_nu(gn, trials, g.seed);
        json rec;
        rec["cmd"] = "general-nu";
        rec["d"] = general_d;
        rec["degree"] = gn.nu.degree();
        if (gn.leading_divisible_by_f22) {
          rec["leading_divisible_by_f22"] = *gn.leading_divisible_by_f22;
        } else {
          rec["leading_divisible_by_f22"] = nullptr;
        }
        em.emit(rec, "experimental nu_" + std::to_string(2 * general_d) + ": X-degree " +
                         std::to_string(gn.nu.degree()) + ", leading coefficient divisible by F22: " +
                         (gn.leading_divisible_by_f22 ? (*gn.leading_divisible_by_f22 ? "yes" : "no") : "n/a"));
        return report_out(em, "verify-f618", rep);
      }
      CacheScope cs(g.cache_dir, 2, 6);
      PolyContext ctx;
      const NuPoly nu4 = build_nu4(ctx), nu6 = build_nu6(ctx);
      Report rep = verify_elimination_identities(ctx, nu4, nu6, trials, g.seed);
      F618Options opt;
      opt.trials = trials;
      opt.points = points;
      opt.seed = g.seed;
      rep.append(construct_f618(ctx, opt).report);
      return report_out(em, "verify-f618", rep);
    }
    if (*known) {
      Timer t("verify-known");
      return report_out(em, "verify-known", verify_known());
    }
    if (*cache) {
      const fs::path dir = g.cache_dir;
      if (g.cache_dir.empty()) {
        std::cerr << "no cache directory: pass --cache-dir or set CKFORGE_CACHE\n";
        return 2;
      }
      std::vector<fs::path> files;
      if (fs::is_directory(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) {
          const auto name = e.path().filename().string();
          if (name.rfind("lyndon-s", 0) == 0 && e.path().extension() == ".tsv") files.push_back(e.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        json rec;
        rec["cmd"] = std::string("cache ") + (*cache_clear ? "clear" : "info");
        rec["file"] = f.filename().string();
        if (*cache_info) {
          ConversionCache c;
          const std::size_t n = c.load(f);
          rec["records"] = n;
          rec["bytes"] = fs::file_size(f);
          em.emit(rec, f.filename().string() + "  " + std::to_string(n) + " records, " +
                           std::to_string(fs::file_size(f)) + " bytes");
        } else {
          fs::remove(f);
          em.emit(rec, "removed " + f.filename().string());
        }
      }
      if (files.empty()) {
        json rec;
        rec["cmd"] = std::string("cache ") + (*cache_clear ? "clear" : "info");
        rec["files"] = 0;
        em.emit(rec, "cache is empty: " + dir.string());
      }
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
