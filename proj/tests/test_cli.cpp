#include <atomic>
#include <catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catena/cli/commands.hpp"
#include "catena/parallel.hpp"

using namespace catena;
using namespace catena::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("catena_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "catena");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json summary_of(const fs::path& dir) { return json::parse(slurp(dir / "summary.json")); }

bool has_provenance(const json& j) {
  if (j.is_object()) {
    if (j.contains("value")) return j.contains("provenance");
    for (const auto& [k, v] : j.items()) {
      if (v.is_number() && k != "index" && k != "sigma") return false;  // input echoes
      if (!has_provenance(v)) return false;
    }
  }
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!has_provenance(v)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("defaults and flags") {
  const char* argv[] = {"catena", "--sigma", "2", "--command", "eigencurve"};
  const auto p = parse_args(5, argv);
  CHECK_FALSE(p.help_text.has_value());
  CHECK(p.config.command == Command::Eigencurve);
  CHECK(p.config.sigma == 2.0);
  CHECK(p.config.grid_n == 401);
  CHECK(p.config.model == Model::Sar);
  CHECK(p.config.branch == Branch::Outer);
  CHECK(p.config.newton_tol == 1e-10);

  const char* argv2[] = {"catena",   "deflect", "--grid-n", "101",
                         "--branch", "inner",   "--lambda", "0:0.02:4"};
  const auto q = parse_args(8, argv2);
  CHECK(q.config.command == Command::Deflect);
  CHECK(q.config.grid_n == 101);
  CHECK(q.config.branch == Branch::Inner);
  CHECK(q.config.lambda.stop == 0.02);
  CHECK(q.config.lambda.steps == 4);

  const char* argv3[] = {"catena", "--help"};
  CHECK(parse_args(2, argv3).help_text.has_value());
}

TEST_CASE("config file parsing and validation") {
  const auto kv = parse_config_text("# comment\nsigma = 3  # trailing\n\nmodel = fbp\n");
  CHECK(kv.at("sigma") == "3");
  const auto c = make_config(kv);
  CHECK(c.sigma == 3.0);
  CHECK(c.model == Model::Fbp);

  auto error_of = [](const std::string& text) -> std::string {
    try {
      make_config(parse_config_text(text));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidConfig);
      return e.what();
    }
    return "";
  };
  CHECK(error_of("grid_n = 4").find("grid_n") != std::string::npos);
  CHECK(error_of("grid_n = 1").find("grid_n") != std::string::npos);
  CHECK(error_of("colour = red").find("colour") != std::string::npos);
  CHECK(error_of("sigma = abc").find("sigma") != std::string::npos);
  CHECK(error_of("newton_tol = 0").find("newton_tol") != std::string::npos);
  CHECK(error_of("lambda = 0.1:0.05:3").find("lambda") != std::string::npos);
  CHECK(error_of("branch = middle").find("branch") != std::string::npos);
  CHECK(error_of("n_eta = 3").find("n_eta") != std::string::npos);
  CHECK(error_of("sigma 2").find("line 1") != std::string::npos);
  CHECK(error_of("c_lo = 3").find("c_hi") != std::string::npos);
}

TEST_CASE("flags override the config file") {
  const auto dir = fresh_dir("override");
  fs::create_directories(dir);
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "sigma = 3\ngrid_n = 201\ncommand = catenoid\n";
  const std::string f = file.string();
  const char* argv[] = {"catena", "--config", f.c_str(), "--sigma", "4"};
  const auto p = parse_args(5, argv);
  CHECK(p.config.sigma == 4.0);
  CHECK(p.config.grid_n == 201);
  CHECK(p.config.command == Command::Catenoid);

  const auto bad = dir / "bad.cfg";
  std::ofstream(bad) << "grid_n = 4\n";
  const auto r = invoke({"--config", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("grid_n") != std::string::npos);
  CHECK(invoke({"--config", (dir / "missing.cfg").string()}).code == 2);
  CHECK(invoke({"--no-such-flag", "1"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
}

TEST_CASE("sigma below critical is a domain error") {
  const auto dir = fresh_dir("below");
  const auto r = invoke({"continue", "--sigma", "1.0", "--output", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("sigma_crit") != std::string::npos);
}

TEST_CASE("catenoid command") {
  const auto dir = fresh_dir("catenoid");
  const auto r = invoke({"catenoid", "--sigma", "2", "--grid-n", "101", "--output", dir.string()});
  REQUIRE(r.code == 0);
  const auto s = summary_of(dir);
  CHECK(std::abs(s["results"]["c_out"]["value"].get<double>() - 0.5893877635) <= 1e-9);
  CHECK(s["config"]["grid_n"] == 101);
  CHECK(has_provenance(s["results"]));
  const auto table = slurp(dir / "catenoid.tsv");
  CHECK(table.rfind("z\tu_out\tu_in\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 102);
}

TEST_CASE("eigencurve command") {
  const auto dir = fresh_dir("eigencurve");
  const auto r =
      invoke({"eigencurve", "--grid-n", "401", "--samples", "11", "--output", dir.string()});
  REQUIRE(r.code == 0);
  const auto s = summary_of(dir)["results"];
  CHECK(s["sign_changes"]["value"] == 1);
  CHECK(std::abs(s["zero"]["value"].get<double>() - solve_c_crit()) <= 1e-4);
  CHECK(s["sign_table"]["mu0_out"]["value"].get<double>() < 0.0);
  CHECK(s["sign_table"]["mu0_in"]["value"].get<double>() > 0.0);
  CHECK(has_provenance(s));
}

TEST_CASE("deflect command at sigma = 10") {
  const auto dir = fresh_dir("deflect");
  const auto r = invoke({"deflect", "--sigma", "10", "--model", "sar", "--branch", "inner",
                         "--output", dir.string()});
  REQUIRE(r.code == 0);
  const auto s = summary_of(dir)["results"];
  CHECK(s["sign_pattern"] == "TwoSignChanges");
  CHECK(s["r0"]["value"].get<double>() > 0.0);
  CHECK(s["r0"]["provenance"]["grid_n"] == 401);
  CHECK(has_provenance(s));
  CHECK(fs::exists(dir / "sensitivity.tsv"));
}

TEST_CASE("thresholds command") {
  const auto dir = fresh_dir("thresholds");
  REQUIRE(invoke({"thresholds", "--output", dir.string()}).code == 0);
  const auto s = summary_of(dir)["results"];
  CHECK(std::abs(s["sigma_star_est"]["value"].get<double>() - 1.70637) <= 1e-4);
  CHECK(s["sigma_upper_star_est"]["value"].get<double>() >=
        s["sigma_star_est"]["value"].get<double>());
  CHECK(has_provenance(s));
  const auto table = slurp(dir / "thresholds.tsv");
  CHECK(table.rfind("sigma\tI1\tI4\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 201);
}

TEST_CASE("continue command on both models") {
  for (const char* model : {"sar", "fbp"}) {
    const auto dir = fresh_dir(std::string("continue_") + model);
    const auto r = invoke({"continue", "--model", model, "--grid-n", "101", "--lambda", "0.02",
                           "--output", dir.string()});
    REQUIRE(r.code == 0);
    const auto s = summary_of(dir)["results"];
    CHECK(s["complete"] == true);
    CHECK(s["points"]["value"] == 11);
    CHECK(has_provenance(s));
    CHECK(fs::exists(dir / "profiles.tsv"));
  }
}

TEST_CASE("simulate and potential commands") {
  const auto dir = fresh_dir("simulate");
  REQUIRE(invoke({"simulate", "--grid-n", "201", "--lambda", "0.01", "--t-end", "3", "--output",
                  dir.string()})
              .code == 0);
  const auto s = summary_of(dir)["results"];
  CHECK(s["verdict"] == "Stable");
  CHECK(s["fitted_rate"]["value"].get<double>() < 0.0);
  CHECK(has_provenance(s));

  const auto dp = fresh_dir("potential");
  REQUIRE(
      invoke({"potential", "--grid-n", "51", "--lambda", "0.01", "--output", dp.string()}).code ==
      0);
  const auto sp = summary_of(dp)["results"];
  CHECK(sp["psi_min"]["value"].get<double>() >= -1e-12);
  CHECK(sp["psi_max"]["value"].get<double>() <= 1.0 + 1e-12);
  CHECK(fs::exists(dp / "potential.tsv"));
  CHECK(fs::exists(dp / "force.tsv"));
}

TEST_CASE("identical configs give identical bytes") {
  for (const char* pert : {"mode", "random"}) {
    std::vector<std::string> outputs;
    for (int k = 0; k < 2; ++k) {
      const auto dir = fresh_dir(std::string("det_") + pert + std::to_string(k));
      REQUIRE(invoke({"simulate", "--grid-n", "101", "--t-end", "1", "--perturbation", pert,
                      "--seed", "42", "--output", dir.string()})
                  .code == 0);
      outputs.push_back(slurp(dir / "summary.json") + slurp(dir / "trajectory.tsv"));
      for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
    }
    CHECK(outputs[0] == outputs[1]);
  }
  // A different seed gives a different random perturbation.
  const auto a = fresh_dir("seed_a");
  const auto b = fresh_dir("seed_b");
  invoke({"simulate", "--grid-n", "101", "--t-end", "0.1", "--perturbation", "random", "--seed",
          "1", "--output", a.string()});
  invoke({"simulate", "--grid-n", "101", "--t-end", "0.1", "--perturbation", "random", "--seed",
          "2", "--output", b.string()});
  CHECK(slurp(a / "trajectory.tsv") != slurp(b / "trajectory.tsv"));
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code(ErrorKind::InvalidConfig) == 2);
  CHECK(exit_code(ErrorKind::NoSolution) == 3);
  CHECK(exit_code(ErrorKind::SingularGap) == 3);
  CHECK(exit_code(ErrorKind::NoConvergence) == 4);
  CHECK(exit_code(ErrorKind::NotBracketed) == 4);
}

TEST_CASE("parallel map keeps order and rethrows the first error") {
  std::vector<int> in(100);
  for (int i = 0; i < 100; ++i) in[static_cast<std::size_t>(i)] = i;
  const auto out = parallel_map(in, [](int x) { return x * x; });
  for (int i = 0; i < 100; ++i) CHECK(out[static_cast<std::size_t>(i)] == i * i);
  try {
    parallel_map(in, [](int x) -> int {
      if (x == 7 || x == 50) throw Error(ErrorKind::NoConvergence, "at " + std::to_string(x));
      return x;
    });
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("at 7") != std::string::npos);
  }
  CHECK(worker_count() >= 1);
}

TEST_CASE("atomic writes and tables") {
  const auto dir = fresh_dir("atomic");
  fs::create_directories(dir);
  write_atomic(dir / "x.txt", "hello");
  CHECK(slurp(dir / "x.txt") == "hello");
  write_atomic(dir / "x.txt", "again");
  CHECK(slurp(dir / "x.txt") == "again");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
  Table t({"a", "b"});
  t.add({0.1, 2.0});
  CHECK(t.str() == "a\tb\n0.10000000000000001\t2\n");
  CHECK_THROWS_AS(t.add({1.0}), Error);
}

TEST_CASE("binary exit codes") {
  const auto dir = fresh_dir("binary");
  const std::string exe = CATENA_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("catenoid --grid-n 51 --output " + dir.string()) == 0);
  CHECK(status("catenoid --grid-n 4 --output " + dir.string()) == 2);
  CHECK(status("catenoid --sigma 1 --output " + dir.string()) == 3);
  CHECK(status("eigencurve --eigen-index 60 --grid-n 51 --samples 2 --output " + dir.string()) ==
        4);
  CHECK(status("--help") == 0);
}
