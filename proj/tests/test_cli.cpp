#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cobb/cli.hpp"
#include "cobb/cobb.hpp"
#include "test_support.hpp"

using namespace cobb;
using cobb::testing::band_mask;
using cobb::testing::scratch_dir;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cobbctl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("measure prints the case JSON") {
  const auto dir = scratch_dir("cli_measure");
  save_mask_png(band_mask(100, 300, 0, 299, 40, 60), dir / "band.png");
  const RunResult r = run_cli({"measure", (dir / "band.png").string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["grade"] == 0);
  CHECK(j["source_id"] == "band");
  CHECK(j["main_angle_deg"].get<double>() < 0.5);
}

TEST_CASE("measure writes overlays and the centerline dump") {
  const auto dir = scratch_dir("cli_measure_files");
  save_mask_png(band_mask(100, 300, 0, 299, 40, 60), dir / "band.png");
  const RunResult r = run_cli({"measure", (dir / "band.png").string(), "--json", (dir / "o.json").string(), "--svg",
                               (dir / "o.svg").string(), "--png", (dir / "o.png").string(), "--centerline-csv",
                               (dir / "c.csv").string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(read_json(dir / "o.json")["grade"] == 0);
  CHECK(slurp(dir / "o.svg").find("<svg") != std::string::npos);
  CHECK(std::filesystem::file_size(dir / "o.png") > 0);
  CHECK(slurp(dir / "c.csv").rfind("t,x_raw,f_t\n", 0) == 0);
}

TEST_CASE("measure reports unreadable input with its stage") {
  const auto dir = scratch_dir("cli_corrupt");
  std::ofstream(dir / "bad.png") << "garbage";
  const RunResult r = run_cli({"measure", (dir / "bad.png").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("mask_io") != std::string::npos);
  CHECK(run_cli({"measure", (dir / "none.png").string()}).code == 2);
}

TEST_CASE("measure on a synthetic S-curve matches the oracle") {
  const auto dir = scratch_dir("cli_scurve");
  const RunResult s = run_cli({"synth", "--name", "s", "--amplitude", "30", "--out", dir.string()});
  REQUIRE(s.code == 0);
  const RunResult m = run_cli({"measure", (dir / "s.png").string()});
  REQUIRE(m.code == 0);
  const double measured = nlohmann::json::parse(m.out)["main_angle_deg"].get<double>();
  const double oracle = read_json(dir / "s.oracle.json")["main_angle_deg"].get<double>();
  CHECK(std::abs(measured - oracle) <= 3.0);
}

TEST_CASE("config file and flags feed the pipeline") {
  const auto dir = scratch_dir("cli_config");
  save_mask_png(band_mask(100, 300, 0, 299, 40, 60), dir / "band.png");
  std::ofstream(dir / "cfg.txt") << "# tuned\ntolerance_fraction = 0.05\nmax_degree = 6\n";
  const RunResult r = run_cli({"measure", (dir / "band.png").string(), "--config", (dir / "cfg.txt").string(),
                               "--max-degree", "8"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["tolerance_fraction"] == 0.05);
  CHECK(j["config"]["max_degree"] == 8);

  std::ofstream(dir / "bad.txt") << "no_such_key = 1\n";
  CHECK(run_cli({"measure", (dir / "band.png").string(), "--config", (dir / "bad.txt").string()}).code == 2);
  CHECK(run_cli({"measure"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
}

TEST_CASE("batch on an empty directory") {
  const auto dir = scratch_dir("cli_batch_empty");
  std::filesystem::create_directories(dir / "in");
  const RunResult r = run_cli({"batch", (dir / "in").string(), "--out", (dir / "out").string()});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "out" / "summary.csv") == "case_id,main_angle_deg,grade\n");
}

TEST_CASE("batch output matches individual measurements") {
  const auto dir = scratch_dir("cli_batch");
  std::filesystem::create_directories(dir / "in");
  for (const char* amp : {"10", "25", "40"}) {
    REQUIRE(run_cli({"synth", "--name", std::string("c") + amp, "--amplitude", amp, "--out", (dir / "in").string()})
                .code == 0);
    std::filesystem::remove(dir / "in" / (std::string("c") + amp + ".oracle.json"));
  }
  const RunResult b = run_cli({"batch", (dir / "in").string(), "--out", (dir / "out").string(), "--threads", "3",
                               "--overlays"});
  CHECK(b.code == 0);
  std::istringstream table(slurp(dir / "out" / "summary.csv"));
  std::string line;
  std::getline(table, line);
  CHECK(line == "case_id,main_angle_deg,grade");
  int rows = 0;
  for (const char* id : {"c10", "c25", "c40"}) {
    const RunResult m = run_cli({"measure", (dir / "in" / (std::string(id) + ".png")).string()});
    REQUIRE(m.code == 0);
    CHECK(slurp(dir / "out" / (std::string(id) + ".json")) == m.out);
    CHECK(std::filesystem::exists(dir / "out" / (std::string(id) + ".svg")));
    REQUIRE(std::getline(table, line));
    const auto j = nlohmann::json::parse(m.out);
    CHECK(line == std::string(id) + "," + j["main_angle_deg"].dump() + "," + j["grade"].dump());
    ++rows;
  }
  CHECK(rows == 3);
  CHECK_FALSE(std::getline(table, line));
}

TEST_CASE("batch with a corrupt file is a partial failure") {
  const auto dir = scratch_dir("cli_batch_partial");
  std::filesystem::create_directories(dir / "in");
  save_mask_png(band_mask(100, 300, 0, 299, 40, 60), dir / "in" / "a.png");
  save_mask_png(band_mask(100, 300, 0, 299, 30, 50), dir / "in" / "b.png");
  std::ofstream(dir / "in" / "c.png") << "not a png";
  const RunResult r = run_cli({"batch", (dir / "in").string(), "--out", (dir / "out").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("c.png") != std::string::npos);
  const std::string table = slurp(dir / "out" / "summary.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  CHECK(table.find("\nc,") == std::string::npos);
}

TEST_CASE("stats command") {
  const auto dir = scratch_dir("cli_stats");
  std::ofstream(dir / "agree.csv") << "case_id,r1,r2,dl\na,10,20,15\nb,30,40,35\nc,5,7,6\n";
  const RunResult ok = run_cli({"stats", (dir / "agree.csv").string(), "--report", (dir / "a.json").string()});
  REQUIRE(ok.code == 0);
  CHECK(read_json(dir / "a.json")["d_mean_bar"] == 0.0);

  std::ofstream(dir / "hand.csv") << "case_id,r1,r2,dl\na,10,20,15.5\nb,30,30,31.5\n";
  REQUIRE(run_cli({"stats", (dir / "hand.csv").string(), "--report", (dir / "h.json").string()}).code == 0);
  CHECK(read_json(dir / "h.json")["d_mean_bar"].get<double>() == doctest::Approx(1.0));

  REQUIRE(run_cli({"stats", (dir / "agree.csv").string(), "--report", (dir / "s1.json").string(), "--seed", "9"})
              .code == 0);
  REQUIRE(run_cli({"stats", (dir / "agree.csv").string(), "--report", (dir / "s2.json").string(), "--seed", "9"})
              .code == 0);
  CHECK(read_json(dir / "s1.json")["ci_95"] == read_json(dir / "s2.json")["ci_95"]);

  std::ofstream(dir / "broken.csv") << "case,r1\n";
  const RunResult bad = run_cli({"stats", (dir / "broken.csv").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("stats") != std::string::npos);
}

TEST_CASE("synth command") {
  const auto dir = scratch_dir("cli_synth");
  const RunResult one = run_cli({"synth", "--family", "arc", "--radius", "900", "--name", "arc", "--out", dir.string()});
  CHECK(one.code == 0);
  CHECK(std::filesystem::exists(dir / "arc.png"));
  CHECK(read_json(dir / "arc.oracle.json")["params"]["family"] == "arc");

  const RunResult overflow =
      run_cli({"synth", "--amplitude", "300", "--width", "100", "--out", (dir / "x").string()});
  CHECK(overflow.code == 2);
  CHECK(overflow.err.find("synth") != std::string::npos);

  CHECK(run_cli({"synth", "--family", "spiral", "--out", dir.string()}).code == 2);

  const RunResult grid = run_cli({"synth", "--grid", "--out", (dir / "grid").string()});
  CHECK(grid.code == 0);
  int pngs = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "grid")) pngs += e.path().extension() == ".png";
  CHECK(pngs == 36);
}
