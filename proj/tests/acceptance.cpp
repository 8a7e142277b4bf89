// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ckforge/dimensions.hpp"
#include "ckforge/theta.hpp"

using namespace ckforge;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run sh(const std::string& cmd) {
  Run r;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  std::array<char, 65536> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

Run cli(const std::string& args) { return sh(std::string(CKFORGE_CLI_PATH) + " " + args); }

std::vector<json> records(const std::string& out) {
  std::vector<json> v;
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) v.push_back(json::parse(line));
  return v;
}

int failures = 0;

void report(int n, bool ok, const std::string& what, double secs) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << " (" << static_cast<long>(secs)
            << " s)" << std::endl;
}

template <class F>
void criterion(int n, const std::string& what, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = false;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(n, ok, note.empty() ? what : what + " [" + note + "]", s);
}

struct Row {
  int d, v;
  long phi, pl;
};
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

bool all_pass(const std::string& out, std::string& note) {
  const auto recs = records(out);
  std::size_t n = 0;
  for (const auto& r : recs) {
    if (!r.contains("check")) continue;
    ++n;
    if (!r["ok"].get<bool>()) {
      note = r["check"].get<std::string>();
      return false;
    }
  }
  note = std::to_string(n) + " checks";
  return n > 0;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "ckforge_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cache = "--cache-dir " + work.string();

  criterion(1, "advantage table d = 1..30", [](std::string& note) {
    const auto r = cli("--format records scan --s 2 --d-min 1 --d-max 30");
    const auto recs = records(r.out);
    if (r.code != 0 || recs.size() != 30) return note = "exit " + std::to_string(r.code), false;
    for (int d = 1; d <= 5; ++d)
      if (!recs[d - 1]["v"].is_null()) return note = "d=" + std::to_string(d), false;
    for (const auto& row : kTable) {
      const auto& j = recs[row.d - 1];
      if (j["d"] != row.d || j["v"] != row.v || j["dim_phi"] != row.phi || j["dim_pl"] != row.pl)
        return note = "d=" + std::to_string(row.d), false;
    }
    return true;
  });

  criterion(2, "dim_pl <= dim_phi for s = 2, d <= 5, v <= 1000", [](std::string&) {
    for (int d = 1; d <= 5; ++d) {
      const auto pl = partition_counts(pl_weights(d), 1000), phi = partition_counts(phi_weights(2, d), 1000);
      for (int v = 0; v <= 1000; ++v)
        if (pl[v] > phi[v]) return false;
    }
    return true;
  });

  criterion(3, "one-prime known kernels", [](std::string& note) {
    const auto r = cli("--format records verify-known");
    return r.code == 0 && all_pass(r.out, note);
  });

  criterion(4, "upper-bound spot values, seeds 1 and 2", [&](std::string& note) {
    struct Spot {
      int s, d, v;
      std::size_t r;
    };
    const Spot spots[] = {{1, 2, 2, 1}, {2, 2, 2, 0}, {2, 4, 6, 0}, {2, 6, 10, 0}, {2, 6, 18, 1}};
    for (const auto& sp : spots) {
      for (int seed : {1, 2}) {
        const auto r = cli("--format records --seed " + std::to_string(seed) + " " + cache + " upper-bound --s " +
                           std::to_string(sp.s) + " --d " + std::to_string(sp.d) + " --v " + std::to_string(sp.v));
        const std::string at = "(" + std::to_string(sp.s) + "," + std::to_string(sp.d) + "," +
                               std::to_string(sp.v) + ") seed " + std::to_string(seed);
        if (r.code != 0) return note = at + ": exit " + std::to_string(r.code), false;
        const auto j = json::parse(r.out);
        if (j["r"] != sp.r) return note = at + ": r=" + j["r"].dump(), false;
      }
    }
    return true;
  });

  criterion(5, "Lyndon variable counts 296 and 30", [](std::string& note) {
    const auto a = lyndon_variables(*theta_images_lyndon(2, 14)).size();
    const auto b = lyndon_variables(*theta_images_lyndon(2, 6)).size();
    note = std::to_string(a) + ", " + std::to_string(b);
    return a == 296 && b == 30;
  });

  criterion(6, "construct-f618 and verify-f618", [&](std::string& note) {
    const fs::path out = work / "f618.txt";
    const auto c = cli("--format records " + cache + " construct-f618 --out " + out.string());
    std::string header;
    {
      std::ifstream in(out);
      std::getline(in, header);
    }
    const bool wrote = fs::exists(out) && fs::file_size(out) > 0;
    fs::remove(out);
    if (c.code != 0 || !wrote) return note = "construct-f618 exit " + std::to_string(c.code), false;
    if (header.rfind("%%CKPoly", 0) != 0) return note = "bad header", false;
    const auto v = cli("--format records " + cache + " verify-f618 --trials 20 --points 3");
    return v.code == 0 && all_pass(v.out, note);
  });

  criterion(7, "property suites", [](std::string& note) {
    for (const char* suite : {TEST_SHUFFLE_PATH, TEST_LYNDON_PATH, TEST_LINALG_PATH}) {
      if (sh(suite).code != 0) return note = fs::path(suite).filename().string(), false;
    }
    return true;
  });

  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
