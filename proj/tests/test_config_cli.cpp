#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magband/cache.hpp"
#include "magband/runner.hpp"

using namespace magband;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("magband_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kLandauConfig = R"JSON({
  "potential": {"period": 1.0, "cos": [0.0]},
  "field": 1.0,
  "basis": {"N": 32, "Q": 128},
  "bands": {"j_max": 5, "k_grid": 64},
  "output": {"directory": "out"}
})JSON";

int run_cli(const std::string& args, std::string* out = nullptr) {
  const fs::path tmp = fs::temp_directory_path() / "magband_cli_capture.txt";
  const std::string cmd =
      std::string(MAGBAND_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (out) *out = read_file(tmp);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parsing and field-path errors", "[config]") {
  nlohmann::json j = nlohmann::json::parse(kLandauConfig);
  const RunConfig cfg = parse_config(j);
  CHECK(cfg.b == 1.0);
  CHECK(cfg.N == 32);
  CHECK(cfg.quad_order() == 128);

  nlohmann::json bad = j;
  bad["potential"].erase("period");
  CHECK_THROWS_WITH(parse_config(bad),
                    Catch::Matchers::ContainsSubstring("potential.period"));

  bad = j;
  bad["basis"]["N"] = 4;
  CHECK_THROWS_AS(parse_config(bad), config_error);

  bad = j;
  bad["field"] = -2.0;
  CHECK_THROWS_AS(parse_config(bad), config_error);

  bad = j;
  bad["counting"] = {{"lambdas", {2.0}}};
  CHECK_THROWS_AS(parse_config(bad), config_error);
}

TEST_CASE("runner produces the Landau CSV", "[runner]") {
  const auto dir = temp_dir("bands");
  const auto cfgfile = dir / "cfg.json";
  write_file(cfgfile, kLandauConfig);
  RunConfig cfg = load_config(cfgfile.string());
  RunFlags flags;
  flags.out_dir = (dir / "out").string();
  CHECK(run_subcommand("bands", cfg, flags) == 0);
  const std::string csv = read_file(dir / "out" / "bands.csv");
  CHECK(csv.rfind("k,E_1,E_2,E_3,E_4,E_5", 0) == 0);
  // every row of a flat-band run carries the Landau ladder
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line)) {
    CHECK(line.find(",1,3,5,7,9") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 64);
}

TEST_CASE("reruns are byte-identical and the cache round-trips", "[runner]") {
  const auto dir = temp_dir("repro");
  write_file(dir / "cfg.json", kLandauConfig);
  RunConfig cfg = load_config((dir / "cfg.json").string());

  RunFlags f1;
  f1.out_dir = (dir / "a").string();
  RunFlags f2;
  f2.out_dir = (dir / "b").string();
  REQUIRE(run_subcommand("bands", cfg, f1) == 0);
  REQUIRE(run_subcommand("bands", cfg, f2) == 0);
  CHECK(read_file(dir / "a" / "bands.csv") == read_file(dir / "b" / "bands.csv"));

  // cache round trip: recomputation reproduces the cached payload bit for bit
  BandCache cache(fs::path(f1.out_dir) / ".cache");
  const auto key = BandCache::key(cfg);
  const auto cached = cache.load(key);
  REQUIRE(cached.has_value());
  fs::remove(cache.path_(key));
  RunFlags f3;
  f3.out_dir = f1.out_dir;
  REQUIRE(run_subcommand("bands", cfg, f3) == 0);
  const auto recomputed = cache.load(key);
  REQUIRE(recomputed.has_value());
  CHECK(cached->k_grid == recomputed->k_grid);
  CHECK(cached->values == recomputed->values);

  // a stale version header is evicted (treated as a miss)
  {
    std::fstream f(cache.path_(key), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const std::uint32_t bogus = 9999;
    f.write(reinterpret_cast<const char*>(&bogus), sizeof(bogus));
  }
  CHECK_FALSE(cache.load(key).has_value());
}

TEST_CASE("threaded sweep matches the serial one exactly", "[runner]") {
  const auto dir = temp_dir("threads");
  write_file(dir / "cfg.json", kLandauConfig);
  RunConfig cfg = load_config((dir / "cfg.json").string());
  cfg.use_cache = false;
  RunFlags serial;
  serial.out_dir = (dir / "s").string();
  serial.threads = 1;
  serial.no_cache = true;
  RunFlags par;
  par.out_dir = (dir / "p").string();
  par.threads = 4;
  par.no_cache = true;
  REQUIRE(run_subcommand("bands", cfg, serial) == 0);
  REQUIRE(run_subcommand("bands", cfg, par) == 0);
  CHECK(read_file(dir / "s" / "bands.csv") == read_file(dir / "p" / "bands.csv"));
}

TEST_CASE("CLI exit codes and artifacts", "[cli]") {
  const auto dir = temp_dir("cli");
  write_file(dir / "good.json", kLandauConfig);
  write_file(dir / "bad.json", R"({"potential": {"cos": [0.0]}, "field": 1.0})");

  std::string out;
  CHECK(run_cli("bands --config " + (dir / "good.json").string() + " --out " +
                    (dir / "o1").string(),
                &out) == 0);
  CHECK(fs::exists(dir / "o1" / "bands.csv"));

  CHECK(run_cli("bands --config " + (dir / "bad.json").string(), &out) == 2);
  CHECK(out.find("potential.period") != std::string::npos);

  CHECK(run_cli("bogus --config x.json", &out) != 0);

  // gaps subcommand emits the gap list
  CHECK(run_cli("gaps --config " + (dir / "good.json").string() + " --out " +
                    (dir / "o2").string(),
                &out) == 0);
  const std::string gaps = read_file(dir / "o2" / "gaps.json");
  CHECK(gaps.find("\"gap_above\"") != std::string::npos);

  // numerical failures exit with 3: extrema of a flat band do not exist
  CHECK(run_cli("extrema --config " + (dir / "good.json").string() + " --out " +
                    (dir / "o3").string(),
                &out) == 3);
}

TEST_CASE("CLI reproducibility with fixed seed", "[cli]") {
  const auto dir = temp_dir("clirepro");
  write_file(dir / "cfg.json", kLandauConfig);
  std::string out;
  REQUIRE(run_cli("bands --config " + (dir / "cfg.json").string() + " --out " +
                      (dir / "r1").string() + " --seed 42 --no-cache",
                  &out) == 0);
  REQUIRE(run_cli("bands --config " + (dir / "cfg.json").string() + " --out " +
                      (dir / "r2").string() + " --seed 42 --no-cache",
                  &out) == 0);
  CHECK(read_file(dir / "r1" / "bands.csv") == read_file(dir / "r2" / "bands.csv"));
}
