#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wwsim/runner/runner.hpp"

using namespace wwsim;
using namespace wwsim::runner;

namespace {

const std::filesystem::path data = WWSIM_TEST_DATA;

ScenarioFile file_from(const char* text) { return ScenarioFile::parse(text); }

std::size_t column(const ResultTable& t, const std::string& name) {
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    if (t.columns[c] == name) return c;
  FAIL("no column " << name);
  return 0;
}

}  // namespace

TEST_SUITE("parse") {
  TEST_CASE("sections flatten to dotted keys, comments ignored") {
    auto f = file_from("; header\n[scenario]\nkind = mz\n[bs_in]\nt = 0.6, 0.0\n");
    CHECK(f.get("scenario.kind") == "mz");
    CHECK(f.get("bs_in.t") == "0.6, 0.0");
    CHECK(f.has_section("bs_in"));
    CHECK_FALSE(f.has_section("ww"));
  }

  TEST_CASE("trailing comments") {
    auto f = file_from("[interferometer]\nphase = 0.5   ; radians\n[output]\npath = a;b.csv\n");
    CHECK(f.get("interferometer.phase") == "0.5");
    CHECK(f.get("output.path") == "a;b.csv");
  }

  TEST_CASE("syntax errors and bad values are parse errors") {
    CHECK_THROWS_AS(file_from("[scenario\nkind = mz\n"), ParseError);
    CHECK_THROWS_AS(validate(file_from("[scenario]\nkind = mz\n[interferometer]\nphase = abc\n")), ParseError);
    CHECK_THROWS_AS(validate(file_from("[scenario]\nkind = mz\n[ww]\nenabled = maybe\n")), ParseError);
    CHECK_THROWS_AS(ScenarioFile::load(data / "does_not_exist.ini"), IoError);
  }

  TEST_CASE("complex values") {
    const auto s = interpret(file_from("[scenario]\nkind = stern_gerlach\n[stern_gerlach]\na1 = 0.6\na2 = (0, 0.8)\n"));
    CHECK(s.a1 == Complex(0.6, 0.0));
    CHECK(s.a2 == Complex(0.0, 0.8));
  }

  TEST_CASE("overrides compose left to right, last wins") {
    auto f = ScenarioFile::load(data / "recoil.ini");
    f.apply_override("interferometer.phase=1.0");
    f.apply_override("interferometer.phase = 2.0");
    CHECK(interpret(f).interferometer.phase == 2.0);
    CHECK_THROWS_AS(f.apply_override("interferometer.nothing=1"), ParseError);
    CHECK_THROWS_AS(f.apply_override("interferometer.phase"), ParseError);
  }
}

TEST_SUITE("validate") {
  TEST_CASE("valid files are clean") {
    for (const char* name : {"fringes.ini", "which_way.ini", "recoil.ini", "stern_gerlach.ini"})
      CHECK_MESSAGE(validate(ScenarioFile::load(data / name)).empty(), name);
  }

  TEST_CASE("unitarity violation cites the splitter") {
    const auto d = validate(ScenarioFile::load(data / "bad_unitarity.ini"));
    REQUIRE(d.size() == 1);
    CHECK(d[0].find("bs_in") != std::string::npos);
    CHECK(d[0].find("unitarity") != std::string::npos);
  }

  TEST_CASE("unknown sweep parameter") {
    const auto d = validate(ScenarioFile::load(data / "bad_sweep.ini"));
    REQUIRE(d.size() == 1);
    CHECK(d[0].find("unknown parameter") != std::string::npos);
  }

  TEST_CASE("scenario kind rules") {
    CHECK_FALSE(validate(file_from("[interferometer]\nphase = 1\n")).empty());
    CHECK_FALSE(validate(file_from("[scenario]\nkind = laser\n")).empty());
    // Keys of the other kind are rejected.
    CHECK_FALSE(validate(file_from("[scenario]\nkind = mz\n[stern_gerlach]\nshots = 10\n")).empty());
    CHECK_FALSE(validate(file_from("[scenario]\nkind = stern_gerlach\n[ww]\ngamma = 0\n")).empty());
  }

  TEST_CASE("sweep invariants") {
    const char* one_step = "[scenario]\nkind = mz\n[sweep]\nparameter = ww.gamma\nstart = 0\nstop = 1\nsteps = 1\n";
    CHECK_FALSE(validate(file_from(one_step)).empty());
    const char* not_sweepable = "[scenario]\nkind = mz\n[sweep]\nparameter = bs_in.n_points\nstart = 64\nstop = 128\nsteps = 2\n";
    CHECK_FALSE(validate(file_from(not_sweepable)).empty());
    // gamma = 1.5 at the far end is out of range.
    const char* bad_end = "[scenario]\nkind = mz\n[sweep]\nparameter = ww.gamma\nstart = 0\nstop = 1.5\nsteps = 4\n";
    CHECK_FALSE(validate(file_from(bad_end)).empty());
    CHECK_THROWS_AS(interpret(file_from(bad_end)), DomainError);
  }

  TEST_CASE("other domain checks") {
    CHECK_FALSE(validate(file_from("[scenario]\nkind = mz\n[ww]\narm = left\n")).empty());
    CHECK_FALSE(validate(file_from("[scenario]\nkind = mz\n[output]\nformat = xml\n")).empty());
    CHECK_FALSE(validate(file_from("[scenario]\nkind = stern_gerlach\n[stern_gerlach]\na1 = 0.9\na2 = 0.6\n")).empty());
    CHECK_FALSE(validate(file_from("[scenario]\nkind = mz\n[interferometer]\nrecoil = 6\n")).empty());
  }
}

TEST_SUITE("interpret") {
  TEST_CASE("recoil is in units of each splitter's sigma") {
    const auto s = interpret(file_from("[scenario]\nkind = mz\n[interferometer]\nrecoil = 0.5\n"
                                       "[bs_in]\nsigma = 2\n[bs_out]\nsigma = 0.5\n"));
    CHECK(s.interferometer.recoil_in() == 1.0);
    CHECK(s.interferometer.recoil_out() == 0.25);
    const auto abs = interpret(file_from("[scenario]\nkind = mz\n[interferometer]\nrecoil = 0.5\nabsolute_units = true\n"
                                         "[bs_in]\nsigma = 2\n"));
    CHECK(abs.interferometer.recoil_in() == 0.5);
  }

  TEST_CASE("detector and output splitter presence") {
    CHECK_FALSE(interpret(file_from("[scenario]\nkind = mz\n")).interferometer.ww.has_value());
    CHECK(interpret(file_from("[scenario]\nkind = mz\n[ww]\ngamma = 0.3\n")).interferometer.ww.has_value());
    CHECK_FALSE(interpret(file_from("[scenario]\nkind = mz\n[ww]\nenabled = false\ngamma = 0.3\n")).interferometer.ww.has_value());
    CHECK_FALSE(interpret(file_from("[scenario]\nkind = mz\n[bs_out]\nenabled = false\n")).interferometer.bs_out.has_value());
  }
}

TEST_SUITE("execute") {
  TEST_CASE("101-point phase sweep gives (1 - cos phi) / 2") {
    const auto t = execute(ScenarioFile::load(data / "fringes.ini"));
    REQUIRE(t.rows.size() == 101);
    CHECK(t.columns == std::vector<std::string>{"interferometer.phase", "p3", "p4"});
    for (const auto& row : t.rows) {
      REQUIRE(row.size() == t.columns.size());
      CHECK(std::abs(row[1] - 0.5 * (1.0 - std::cos(row[0]))) < 1e-10);
    }
    CHECK(std::abs(t.metadata["visibility"].get<double>() - 1.0) < 1e-10);
    CHECK(t.metadata["version"].is_string());
    CHECK(t.metadata["scenario"]["scenario.kind"] == "mz");
  }

  TEST_CASE("same sweep with an orthogonal detector is flat at one half") {
    const auto t = execute(ScenarioFile::load(data / "which_way.ini"));
    REQUIRE(t.rows.size() == 101);
    for (const auto& row : t.rows) CHECK(std::abs(row[1] - 0.5) < 1e-10);
    CHECK(std::abs(t.metadata["visibility"].get<double>()) < 1e-10);
  }

  TEST_CASE("recoil sweep: visibility column follows exp(-x^2 / 4)") {
    const auto t = execute(ScenarioFile::load(data / "recoil.ini"));
    const auto v = column(t, "visibility");
    for (const auto& row : t.rows) CHECK(std::abs(row[v] - std::exp(-row[0] * row[0] / 4.0)) < 1e-6);
    CHECK(t.metadata.contains("momentum_transfer"));
  }

  TEST_CASE("sweep rows equal single runs at the same parameters") {
    auto swept = ScenarioFile::load(data / "recoil.ini");
    swept.set("ww.gamma", "0.6");
    const auto table = execute(swept);
    for (const auto& row : table.rows) {
      ScenarioFile single = swept;
      for (const auto* k : {"sweep.parameter", "sweep.start", "sweep.stop", "sweep.steps"}) single.erase(k);
      single.apply_override("interferometer.recoil=" + format_value(row[0]));
      const auto one = execute(single);
      REQUIRE(one.rows.size() == 1);
      REQUIRE(one.rows[0].size() + 1 == row.size());
      for (std::size_t c = 0; c < one.rows[0].size(); ++c) CHECK(std::abs(one.rows[0][c] - row[c + 1]) <= 1e-14);
    }
  }

  TEST_CASE("two sweeps: last varies fastest, visibility per outer setting") {
    auto f = ScenarioFile::load(data / "fringes.ini");
    f.set("sweep.steps", "4");
    f.set("sweep2.parameter", "ww.gamma");
    f.set("sweep2.start", "0");
    f.set("sweep2.stop", "1");
    f.set("sweep2.steps", "3");
    const auto t = execute(f);
    REQUIRE(t.rows.size() == 12);
    CHECK(t.rows[0][1] == 0.0);
    CHECK(t.rows[1][1] == 0.5);
    CHECK(t.rows[3][0] == t.rows[0][0] + 2.0 * std::numbers::pi / 3.0);
    const auto& vis = t.metadata["visibility"];
    REQUIRE(vis.size() == 3);
    CHECK(std::abs(vis[1]["visibility"].get<double>() - 0.5) < 1e-8);
  }

  TEST_CASE("stern-gerlach counts are reproducible bitwise") {
    const auto f = ScenarioFile::load(data / "stern_gerlach.ini");
    const auto a = execute(f);
    const auto b = execute(f);
    CHECK(to_csv(a) == to_csv(b));
    REQUIRE(a.rows.size() == 2);
    const auto count = column(a, "count");
    CHECK(a.rows[0][count] + a.rows[1][count] == 100000.0);
    const double sd = std::sqrt(0.36 * 0.64 / 1e5);
    CHECK(std::abs(a.rows[0][column(a, "frequency")] - 0.36) < 5.0 * sd);
    auto reseeded = f;
    reseeded.set("scenario.seed", "43");
    CHECK(execute(reseeded).rows != a.rows);
  }
}

TEST_SUITE("formats") {
  TEST_CASE("csv: header, 17 digits, newline endings") {
    ResultTable t;
    t.columns = {"x", "y"};
    t.rows = {{0.1, 1.0 / 3.0}};
    t.metadata["seed"] = 7;
    CHECK(to_csv(t) == "# seed: 7\nx,y\n0.10000000000000001,0.33333333333333331\n");
  }

  TEST_CASE("csv values read back exactly") {
    const auto t = execute(ScenarioFile::load(data / "recoil.ini"));
    std::istringstream in(to_csv(t));
    std::string line;
    std::size_t r = 0;
    while (std::getline(in, line)) {
      if (line.starts_with("#") || line.starts_with("interferometer")) continue;
      std::istringstream cells(line);
      std::string cell;
      for (std::size_t c = 0; std::getline(cells, cell, ','); ++c) CHECK(std::stod(cell) == t.rows[r][c]);
      ++r;
    }
    CHECK(r == t.rows.size());
  }

  TEST_CASE("json: metadata and rows") {
    const auto t = execute(ScenarioFile::load(data / "recoil.ini"));
    const auto doc = nlohmann::json::parse(to_json(t));
    CHECK(doc["metadata"]["tool"] == "wwsim");
    REQUIRE(doc["rows"].size() == t.rows.size());
    CHECK(doc["rows"][2]["p3"].get<double>() == t.rows[2][1]);
  }
}

TEST_SUITE("commands") {
  TEST_CASE("exit codes") {
    std::ostringstream out, err;
    CHECK(run_command(data / "recoil.ini", {}, out, err) == exit_code::ok);
    CHECK(run_command(data / "broken.ini", {}, out, err) == exit_code::parse);
    CHECK(run_command(data / "bad_unitarity.ini", {}, out, err) == exit_code::domain);
    CHECK(run_command(data / "missing.ini", {}, out, err) == exit_code::io);
    RunOptions bad_key;
    bad_key.overrides = {"bs_in.colour=red"};
    CHECK(run_command(data / "recoil.ini", bad_key, out, err) == exit_code::parse);
    CHECK(validate_command(data / "recoil.ini", out, err) == exit_code::ok);
    CHECK(validate_command(data / "bad_sweep.ini", out, err) == exit_code::domain);
    CHECK(validate_command(data / "broken.ini", out, err) == exit_code::parse);
  }

  TEST_CASE("options override the file") {
    std::ostringstream out, err;
    RunOptions o;
    o.format = OutputFormat::json;
    o.seed = 42;
    o.overrides = {"stern_gerlach.shots=10", "stern_gerlach.shots=20"};
    REQUIRE(run_command(data / "stern_gerlach.ini", o, out, err) == exit_code::ok);
    const auto doc = nlohmann::json::parse(out.str());
    CHECK(doc["rows"][0]["count"].get<double>() + doc["rows"][1]["count"].get<double>() == 20.0);
  }

  TEST_CASE("output file") {
    const auto path = std::filesystem::temp_directory_path() / "wwsim_test_output.csv";
    std::ostringstream out, err;
    RunOptions o;
    o.output = path;
    REQUIRE(run_command(data / "recoil.ini", o, out, err) == exit_code::ok);
    CHECK(out.str().empty());
    CHECK(std::filesystem::file_size(path) > 0);
    std::filesystem::remove(path);
    o.output = "/nonexistent-dir/x.csv";
    CHECK(run_command(data / "recoil.ini", o, out, err) == exit_code::io);
  }
}
