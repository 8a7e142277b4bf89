#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout only; stderr carries timing lines
Run run(const std::string& args) {
  const std::string cmd = std::string(CKFORGE_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("dims") {
  auto r = run("dims --s 2 --d 8 --v 99");
  CHECK(r.code == 0);
  CHECK(r.out == "21381332 21582623\n");
  r = run("--format records dims --s 2 --d 6 --v 18");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["dim_phi"] == 4183);
  CHECK(j["dim_pl"] == 996);
}

TEST_CASE("advantage scan") {
  const auto r = run("--format records scan --s 2 --d-min 5 --d-max 8");
  CHECK(r.code == 0);
  std::vector<nlohmann::json> rows;
  std::size_t pos = 0;
  while (pos < r.out.size()) {
    const auto nl = r.out.find('\n', pos);
    rows.push_back(nlohmann::json::parse(r.out.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  REQUIRE(rows.size() == 4);
  CHECK(rows[0]["v"].is_null());
  CHECK(rows[1]["v"] == 251);
  CHECK(rows[3]["v"] == 99);
  CHECK(rows[3]["dim_pl"] == 21582623);
  CHECK(run("dims scan --s 2 --d-max 8").out == run("scan --s 2 --d-min 1 --d-max 8").out);
}

TEST_CASE("upper-bound") {
  auto r = run("upper-bound --s 1 --d 2 --v 2");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("r=1\nprovenance: seed=1 ", 0) == 0);
  r = run("--format records upper-bound --s 2 --d 4 --v 6 --exact");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["r"] == 0);
  CHECK(j["strategy"] == "exact");
  r = run("upper-bound --s 1 --d 2 --v 2 --kernel");
  CHECK(r.out.find("kernel[0]") != std::string::npos);
}

TEST_CASE("records are byte-identical across runs") {
  const std::string args = "--format records --seed 7 upper-bound --s 2 --d 5 --v 7";
  const auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("time") == std::string::npos);
}

TEST_CASE("cold and warm cache give the same records") {
  const auto dir = fresh_dir("ckforge_cli_cache");
  const std::string args = "--format records --cache-dir " + dir.string() + " upper-bound --s 2 --d 6 --v 8";
  const auto cold = run(args);
  CHECK(cold.code == 0);
  const auto info = run("--cache-dir " + dir.string() + " cache info");
  CHECK(info.out.find("lyndon-s2-d6") != std::string::npos);
  const auto warm = run(args);
  CHECK(warm.out == cold.out);
  CHECK(warm.out == run("--format records upper-bound --s 2 --d 6 --v 8").out);
  CHECK(run("--cache-dir " + dir.string() + " cache clear").code == 0);
  CHECK(run("--cache-dir " + dir.string() + " cache info").out.find("empty") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("matrix export") {
  const auto dir = fresh_dir("ckforge_cli_matrix");
  const auto r = run("matrix --s 1 --d 2 --v 2 --out " + (dir / "m").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("3x4") != std::string::npos);
  CHECK(fs::exists(dir / "m.mtx"));
  fs::remove_all(dir);
}

TEST_CASE("verify-known and experimental nu") {
  auto r = run("verify-known");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run("verify-f618 --general-nu 2 --trials 5");
  CHECK(r.code == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("dims").code == 2);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("--format xml dims --s 2 --d 6 --v 1").code == 2);
  CHECK(run("upper-bound --s 0 --d 2 --v 2").code == 2);
  CHECK(run("verify-f618 --general-nu 9").code == 2);
  CHECK(run("cache info").code == 2);
  CHECK(run("--help").code == 0);
}
