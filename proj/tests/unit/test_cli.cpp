#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsvm/cli.hpp"
#include "rsvm/data.hpp"

using namespace rsvm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "rsvm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Scratch directory wiped on entry, so reruns start clean.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen-data") {
  const fs::path dir = scratch("gen");
  const std::string a = (dir / "a.libsvm").string(), b = (dir / "b.libsvm").string();
  REQUIRE(run({"gen-data", "--n", "40", "--d", "3", "--seed", "9", "--output", a}).code == 0);
  REQUIRE(run({"gen-data", "--n", "40", "--d", "3", "--seed", "9", "--output", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const Dataset ds = parse_libsvm(slurp(a));
  CHECK(ds.size() == 40);
  CHECK(ds.dim() == 3);
  CHECK(ds == gen_gaussian({40, 3, 3.0, 1.0, 9}));

  CHECK(run({"gen-data", "--n", "41", "--output", a}).code == 2);
  CHECK(run({"gen-data", "--n", "40"}).code == 2);
}

TEST_CASE("train") {
  const fs::path dir = scratch("train");
  const std::string data = (dir / "d.libsvm").string(), model = (dir / "m.json").string();
  REQUIRE(run({"gen-data", "--n", "60", "--d", "4", "--seed", "2", "--output", data}).code == 0);

  const Outcome o = run({"train", "-i", data, "--rho", "0.02", "--c", "0.5", "--eps", "1e-7", "-o", model});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("gap") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(model));
  CHECK(j["schema"] == 1);
  CHECK(j["C"] == 0.5);
  CHECK(j["rho"] == 0.02);
  CHECK(j["n"] == 60);
  CHECK(j["d"] == 4);
  CHECK(j["w"].size() == 4);
  CHECK(j["gap"].get<double>() <= 1e-7);
  CHECK(j["converged"] == true);
  CHECK(j["primal"].get<double>() - j["dual"].get<double>() == doctest::Approx(j["gap"].get<double>()));

  SUBCASE("bias and standardization are recorded") {
    REQUIRE(run({"train", "-i", data, "--bias", "--standardize", "-o", model}).code == 0);
    const auto k = nlohmann::json::parse(slurp(model));
    CHECK(k["d"] == 5);
    CHECK(k["bias_augmented"] == true);
    CHECK(k["standardization"]["mean"].size() == 4);
  }
  SUBCASE("per-sample radii") {
    const std::string radii = (dir / "r.txt").string();
    {
      std::ofstream f(radii);
      for (int i = 0; i < 60; ++i) f << (i % 2 ? "0.01\n" : "0.03\n");
    }
    REQUIRE(run({"train", "-i", data, "--rho-file", radii, "-o", model}).code == 0);
    CHECK(nlohmann::json::parse(slurp(model))["rho_file"] == radii);
  }
  SUBCASE("usage errors") {
    CHECK(run({"train", "-i", (dir / "missing.libsvm").string()}).code == 2);
    CHECK(run({"train", "-i", data, "--rho=-1"}).code == 2);
    CHECK(run({"train", "-i", data, "--c", "0"}).code == 2);
    CHECK(run({"train", "-i", data, "--format", "xml"}).code == 2);
    CHECK(run({"train"}).code == 2);
    CHECK(run({}).code == 2);
  }
  SUBCASE("epoch budget exhausted") {
    const Outcome f = run({"train", "-i", data, "--eps", "1e-12", "--max-epochs", "1", "-o", model});
    CHECK(f.code == 1);
    CHECK(f.err.find("above eps") != std::string::npos);
  }
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("screen") {
  const fs::path dir = scratch("screen");
  const std::string data = (dir / "d.libsvm").string(), trace = (dir / "t.csv").string(),
                    part = (dir / "p.json").string();
  REQUIRE(run({"gen-data", "--n", "200", "--d", "5", "--seed", "3", "--output", data}).code == 0);

  const Outcome o = run({"screen", "-i", data, "--rho", "0.01", "--trace", trace, "--partition", part});
  REQUIRE(o.code == 0);
  std::istringstream lines(slurp(trace));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "iter,gap,radius,n_zero,n_C,n_free,seconds");
  long prev_free = 1 << 30;
  int rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    const long free = std::stol(cells[5]);
    CHECK(free <= prev_free);
    prev_free = free;
    ++rows;
  }
  CHECK(rows >= 1);

  const auto j = nlohmann::json::parse(slurp(part));
  std::vector<int> seen(200, 0);
  for (const char* key : {"R", "S", "F"})
    for (const auto& i : j[key]) ++seen[i.get<std::size_t>()];
  for (const int s : seen) CHECK(s == 1);
  CHECK(j["screened_at"].size() == 200);

  SUBCASE("fmin = n leaves a single trace row") {
    REQUIRE(run({"screen", "-i", data, "--fmin", "200", "--trace", trace, "--partition", part}).code == 0);
    const std::string t = slurp(trace);
    CHECK(std::count(t.begin(), t.end(), '\n') == 2);
  }
}

TEST_CASE("bench") {
  const fs::path dir = scratch("bench");
  const std::string data = (dir / "d.libsvm").string(), recs = (dir / "r.csv").string(),
                    summ = (dir / "s.csv").string();
  REQUIRE(run({"gen-data", "--n", "80", "--d", "3", "--seed", "4", "--output", data}).code == 0);
  const Outcome o = run({"bench", "-i", data, "--c-grid", "0.1,1", "--rho-grid", "0.01", "--repeats", "1",
                         "--parallel", "--records", recs, "--summary", summ, "--reference", "spambase"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("timings contended") != std::string::npos);
  CHECK(o.out.find("Spambase") != std::string::npos);
  const std::string r = slurp(recs);
  CHECK(std::count(r.begin(), r.end(), '\n') == 5);
  CHECK(r.find("d,0.1,0.01,baseline,0,") != std::string::npos);
  const std::string s = slurp(summ);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);

  CHECK(run({"bench", "-i", data, "--reference", "iris"}).code == 2);
}
