#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fibermatch/app/commands.hpp"
#include "fibermatch/beatlab.hpp"
#include "fibermatch/interconnect.hpp"
#include "fibermatch/special.hpp"
#include "fibermatch/units.hpp"
#include "support/synthetic.hpp"

using namespace fibermatch;
using namespace fibermatch::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fibermatch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

// Rows of a CSV written by the CLI, skipping the hash comment and header.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::getline(in, line);
  REQUIRE(line.rfind("# config_hash=", 0) == 0);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

// Small sweep so the integration tests stay quick.
const std::vector<std::string> kSmallMap{"--set", "map.length_points=41", "--set", "map.diameter_points=41"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"map", "--format", "pdf"}).code == 1);
  CHECK(run({"map", "--set", "map.nope=1"}).code == 1);
  CHECK(run({"map", "--set", "novalue"}).code == 1);
  CHECK(run({"map", "--config", "/nonexistent/config.ini"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("map command") {
  TempDir dir("map");
  const auto r = run(with({"map", "--out", dir.path().string(), "--format", "svg"}, kSmallMap));
  REQUIRE(r.code == 0);
  const auto summary = read_json(dir / "optimum.json");
  CHECK(summary["optimum_L_um"].get<double>() == doctest::Approx(250.0).epsilon(0.05));
  CHECK(summary["optimum_diameter_um"].get<double>() == doctest::Approx(35.0).epsilon(0.06));
  CHECK(summary["eta_max"].get<double>() >= 0.93);
  CHECK(summary["config_hash"].get<std::string>().size() == 16);
  CHECK(read_csv(dir / "efficiency_map.csv").size() == 41 * 41);
  CHECK(std::filesystem::exists(dir / "cut_L250um.csv"));
  CHECK(std::filesystem::exists(dir / "efficiency_map.svg"));
  CHECK(slurp(dir / "efficiency_map.svg").find(summary["config_hash"].get<std::string>()) != std::string::npos);

  SUBCASE("JSON output is byte-identical across runs") {
    TempDir again("map2");
    REQUIRE(run(with({"map", "--out", again.path().string()}, kSmallMap)).code == 0);
    CHECK(slurp(dir / "optimum.json") == slurp(again / "optimum.json"));
  }
  SUBCASE("single-cell range") {
    TempDir one("map1");
    REQUIRE(run({"map", "--out", one.path().string(), "--set", "map.length_min=250um", "--set", "map.length_max=250um",
                 "--set", "map.length_points=1", "--set", "map.diameter_min=35um", "--set", "map.diameter_max=35um",
                 "--set", "map.diameter_points=1", "--set", "map.cut_lengths="})
                .code == 0);
    const auto rows = read_csv(one / "efficiency_map.csv");
    REQUIRE(rows.size() == 1);
    CHECK(read_json(one / "optimum.json")["eta_max"].get<double>() == doctest::Approx(rows[0][2]).epsilon(1e-5));
  }
  SUBCASE("JSON tables") {
    TempDir js("mapjson");
    REQUIRE(run(with({"map", "--out", js.path().string(), "--format", "json"}, kSmallMap)).code == 0);
    CHECK(read_json(js / "efficiency_map.json")["rows"].size() == 41 * 41);
  }
}

TEST_CASE("modes command") {
  TempDir dir("modes");
  REQUIRE(run({"modes", "--out", dir.path().string(), "--set", "modes.gif_length=250um", "--set",
               "modes.core_radius=17.5um"})
              .code == 0);
  const auto smf = read_csv(dir / "profile_smf.csv");
  const auto gif = read_csv(dir / "profile_gif.csv");
  const auto hcf = read_csv(dir / "profile_hcf.csv");
  REQUIRE(smf.size() == 4096);
  double peak = 0.0;
  std::size_t where = 0;
  for (std::size_t i = 0; i < smf.size(); ++i)
    if (smf[i][1] > peak) peak = smf[i][1], where = i;
  CHECK(where == 0);
  for (const auto& row : hcf)
    if (row[0] > 17.5) CHECK(row[1] == 0.0);
  CHECK(gif.size() == smf.size());
  CHECK(read_json(dir / "modes.json")["reconstruction_eta"].get<double>() >= 0.999);

  SUBCASE("GIF profile at L = 0 overlaps the SMF profile") {
    TempDir zero("modes0");
    REQUIRE(run({"modes", "--out", zero.path().string(), "--set", "modes.gif_length=0um", "--set",
                 "modes.core_radius=17.5um"})
                .code == 0);
    RadialField a, b;
    for (const auto& row : read_csv(zero / "profile_smf.csv")) {
      a.radii.push_back(row[0] * 1e-6);
      a.amplitudes.emplace_back(row[1], row[2]);
    }
    for (const auto& row : read_csv(zero / "profile_gif.csv")) {
      b.radii.push_back(row[0] * 1e-6);
      b.amplitudes.emplace_back(row[1], row[2]);
    }
    CHECK(overlap_efficiency(a, b) >= 0.999);
  }
}

TEST_CASE("offset command") {
  TempDir dir("offset");
  REQUIRE(run({"offset", "--out", dir.path().string(), "--set", "offset.gif_length=248um", "--set",
               "offset.core_radius=17.375um", "--set", "offset.points=11"})
              .code == 0);
  const auto rows = read_csv(dir / "offset.csv");
  REQUIRE(rows.size() == 11);
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[0][2] == 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][2] >= rows[i - 1][2]);
}

TEST_CASE("beats command") {
  TempDir dir("beats");
  const double r = 17.5e-6;
  std::vector<std::string> args{"beats", "--out", (dir / "out").string()};
  const std::vector<double> lengths{0.21, 0.5, 1.0, 1.5};
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    auto s = two_mode_spectrum(2.405, 3.83, r, lengths[i]);
    if (i == 1) {
      // One file in dB to exercise mixed inputs.
      for (auto& t : s.transmission) t = 10.0 * std::log10(t);
      s.scale = TransmissionScale::Decibel;
    }
    const auto path = dir / ("L" + std::to_string(i) + ".csv");
    save_spectrum(path, s);
    args.insert(args.end(), {"--spectrum", path.string(), "--length", std::to_string(lengths[i]) + "m"});
  }
  args.insert(args.end(), {"--set", "beats.reference_u=2.405"});
  const auto result = run(args);
  REQUIRE(result.code == 0);
  const auto fit = read_json(dir / "out" / "hom_fit.json");
  CHECK(fit["U_b"].get<double>() == doctest::Approx(3.83).epsilon(0.01));
  CHECK(fit["tau_ps_per_m"].get<double>() == doctest::Approx(0.119).epsilon(0.03));
  CHECK(fit["points"].size() == 4);
  CHECK(fit.contains("slope_stderr"));
  const auto summary = slurp(dir / "out" / "summary.txt");
  CHECK(summary.find("U_b") != std::string::npos);
  CHECK(summary.find("tau") != std::string::npos);
  CHECK(summary.find("mixed dB and linear") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "out" / "beats_L0.csv"));

  SUBCASE("single spectrum skips the fit") {
    const auto one = run({"beats", "--out", (dir / "one").string(), "--spectrum", (dir / "L0.csv").string(),
                          "--length", "0.21m"});
    REQUIRE(one.code == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "one" / "hom_fit.json"));
    CHECK(slurp(dir / "one" / "summary.txt").find("fit skipped") != std::string::npos);
  }
  SUBCASE("data errors exit with 2") {
    CHECK(run({"beats", "--out", (dir / "x").string(), "--spectrum", (dir / "missing.csv").string(), "--length",
               "1m"})
              .code == 2);
    std::ofstream(dir / "short.csv") << "wavelength_nm,transmission_linear\n700,1\n701,1\n";
    const auto bad = run({"beats", "--out", (dir / "x").string(), "--spectrum", (dir / "short.csv").string(),
                          "--length", "1m"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("short.csv") != std::string::npos);
    save_spectrum(dir / "flat.csv", make_spectrum(512, 700e-9, 860e-9, [](double) { return 1.0; }));
    CHECK(run({"beats", "--out", (dir / "x").string(), "--spectrum", (dir / "flat.csv").string(), "--length", "1m"})
              .code == 2);
  }
  SUBCASE("unpaired lengths are a usage error") {
    CHECK(run({"beats", "--spectrum", (dir / "L0.csv").string(), "--length", "1m", "--length", "2m"}).code == 1);
  }
}

TEST_CASE("droop command") {
  TempDir dir("droop");
  std::vector<std::string> args{"droop", "--out", (dir / "out").string()};
  for (int i = 0; i <= 10; ++i) {
    const auto path = dir / ("d" + std::to_string(i) + ".csv");
    save_spectrum(path, cosine_spectrum(2.1e-9, 0.2, 0.1 * std::numbers::pi * i));
    args.insert(args.end(), {"--spectrum", path.string(), "--distance", std::to_string(i) + "cm"});
  }
  REQUIRE(run(args).code == 0);
  const auto rows = read_csv(dir / "out" / "droop.csv");
  REQUIRE(rows.size() == 11);
  CHECK(rows.back()[0] == doctest::Approx(10.0));
  CHECK(std::abs(std::abs(rows.back()[1]) - std::numbers::pi) < 0.05);
}

TEST_CASE("budget command and config file") {
  TempDir dir("budget");
  std::ofstream(dir / "run.ini") << "[budget]\neta_in = 0.935\neta_out = 0.935\nhcf_length = 50cm\n";
  REQUIRE(run({"budget", "--config", (dir / "run.ini").string(), "--out", (dir / "out").string()}).code == 0);
  const auto budget = read_json(dir / "out" / "budget.json");
  CHECK(budget["total_db"].get<double>() == doctest::Approx(0.60).epsilon(0.02));

  SUBCASE("environment fallback") {
    setenv("FIBERMATCH_CONFIG", (dir / "run.ini").c_str(), 1);
    REQUIRE(run({"budget", "--out", (dir / "env").string()}).code == 0);
    unsetenv("FIBERMATCH_CONFIG");
    CHECK(slurp(dir / "env" / "budget.json") == slurp(dir / "out" / "budget.json"));
  }
  SUBCASE("flags win over the file") {
    REQUIRE(run({"budget", "--config", (dir / "run.ini").string(), "--out", (dir / "flag").string(), "--set",
                 "budget.eta_in=1", "--set", "budget.eta_out=1"})
                .code == 0);
    CHECK(read_json(dir / "flag" / "budget.json")["total_db"].get<double>() == doctest::Approx(0.015));
  }
}

TEST_CASE("numerical failures exit with 3") {
  TempDir dir("num");
  CHECK(run({"map", "--out", dir.path().string(), "--set", "gif.modes=5", "--set", "map.length_points=3", "--set",
             "map.diameter_points=3"})
            .code == 3);
}
