#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "dmme/experiments.hpp"
#include "oracles.hpp"

using namespace dmme;

namespace {

struct env_guard {
  std::string name;
  env_guard(const std::string& n, const std::string& v) : name(n) {
    ::setenv(n.c_str(), v.c_str(), 1);
  }
  ~env_guard() { ::unsetenv(name.c_str()); }
};

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("configuration defaults") {
  run_config c;
  CHECK(c.proto.gamma == 1.0);
  CHECK(c.proto.delta == Catch::Approx(std::sqrt(0.1)).epsilon(1e-15));
  CHECK(c.proto.g2m == 0.02);
  CHECK(c.proto.variant == ansatz_variant::cos2);
  CHECK(c.proto.orientation == ansatz_orientation::forward);
  CHECK(c.bath.temperature == 0.0);
  CHECK(c.bath.s32 == 0.1);
  CHECK(c.bath.s24 == 0.01);
  CHECK(c.bath.kappa == 10.0);
  CHECK_FALSE(c.bath.include_lamb_shift);
  CHECK(c.initial_state == "psi3_0");
  CHECK(c.grid == 1000);
  CHECK(c.out_dir == "out");
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config text covers every key, comments and blanks") {
  run_config c;
  apply_config_text(c,
                    "# full sweep\n"
                    "gamma = 2.0\n"
                    "delta = 0.5\n"
                    "g2m = 0.3   # inline comment\n"
                    "omega_e = 2\n"
                    "g3 = 1.5\n"
                    "variant = sin3\n"
                    "orientation = reversed\n"
                    "\n"
                    "temperature = 0.25\n"
                    "s32 = 0.2\n"
                    "s24 = 0.02\n"
                    "cutoff_multiplier = 12\n"
                    "include_lamb_shift = true\n"
                    "initial_state = ket00\n"
                    "closed_system = yes\n"
                    "grid = 77\n"
                    "out_dir = results\n"
                    "f_const = -1.25\n"
                    "j_const = 0.5\n"
                    "scan_lo = 0.2\n"
                    "scan_hi = 0.9\n");
  CHECK(c.proto.gamma == 2.0);
  CHECK(c.proto.delta == 0.5);
  CHECK(c.proto.g2m == 0.3);
  CHECK(c.proto.omega_e == 2.0);
  CHECK(c.proto.g3 == 1.5);
  CHECK(c.proto.variant == ansatz_variant::sin3);
  CHECK(c.proto.orientation == ansatz_orientation::reversed);
  CHECK(c.bath.temperature == 0.25);
  CHECK(c.bath.s32 == 0.2);
  CHECK(c.bath.s24 == 0.02);
  CHECK(c.bath.kappa == 12.0);
  CHECK(c.bath.include_lamb_shift);
  CHECK(c.initial_state == "ket00");
  CHECK(c.closed_system);
  CHECK(c.grid == 77);
  CHECK(c.out_dir == "results");
  CHECK(c.f_const == -1.25);
  CHECK(c.j_const == 0.5);
  CHECK(c.scan_lo == 0.2);
  CHECK(c.scan_hi == 0.9);

  run_config k;
  apply_config_text(k, "kappa = 7\n");
  CHECK(k.bath.kappa == 7.0);

  run_config cs;
  apply_config_text(cs, "initial_state = custom\ncustom_state = 1,0, 0,0, 0,0, 1,0\n");
  CHECK(cs.custom_state_set);
  Vec4 v = initial_state_vector(cs, eigensystem(gvector{0, 0, 1, 0, 0, 1}));
  CHECK(std::abs(v(0) - cplx(1 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(v(3) - cplx(1 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("config errors carry context") {
  run_config c;
  CHECK_THROWS_WITH(apply_config_text(c, "gamm = 1\n"),
                    Catch::Matchers::ContainsSubstring("unknown config key") &&
                        Catch::Matchers::ContainsSubstring("accepted keys") &&
                        Catch::Matchers::ContainsSubstring("gamma"));
  CHECK_THROWS_WITH(apply_config_text(c, "gamma = abc\n"),
                    Catch::Matchers::ContainsSubstring("cannot parse"));
  CHECK_THROWS_WITH(apply_config_text(c, "grid = 1.5\n"),
                    Catch::Matchers::ContainsSubstring("integer"));
  CHECK_THROWS_WITH(apply_config_text(c, "variant = quartic\n"),
                    Catch::Matchers::ContainsSubstring("cos2"));
  CHECK_THROWS_WITH(apply_config_text(c, "include_lamb_shift = maybe\n"),
                    Catch::Matchers::ContainsSubstring("boolean"));
  CHECK_THROWS_WITH(apply_config_text(c, "custom_state = 1,2,3\n"),
                    Catch::Matchers::ContainsSubstring("8 comma-separated"));
  CHECK_THROWS_WITH(apply_config_text(c, "just a line\n"),
                    Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_AS(apply_config_text(c, "initial_state = psi9\n"), validation_error);
}

TEST_CASE("validation rejects inconsistent settings") {
  run_config c;
  c.grid = 0;
  CHECK_THROWS_AS(validate(c), validation_error);
  c = run_config{};
  c.scan_lo = 0.5;
  c.scan_hi = 0.5;
  CHECK_THROWS_AS(validate(c), validation_error);
  c = run_config{};
  c.proto.delta = 1.0;
  CHECK_THROWS_AS(validate(c), validation_error);
  c = run_config{};
  c.initial_state = "custom";  // no amplitudes supplied
  CHECK_THROWS_AS(validate(c), validation_error);
  c = run_config{};
  c.bath.temperature = -1;
  CHECK_THROWS_AS(validate(c), validation_error);
  c = run_config{};
  c.bath.kappa = 0;
  CHECK_THROWS_AS(validate(c), validation_error);
  CHECK_THROWS_AS(load_config("/nonexistent/path/to.cfg"), validation_error);
}

TEST_CASE("environment overrides beat the file") {
  const char* path = "cli_config_test_tmp.cfg";
  {
    std::ofstream out(path);
    out << "gamma = 3\ngrid = 40\n";
  }
  {
    env_guard g1("DMME_GAMMA", "2.5");
    env_guard g2("DMME_OUT_DIR", "envdir");
    run_config c = load_config(path);
    CHECK(c.proto.gamma == 2.5);  // env wins
    CHECK(c.grid == 40);          // file survives where no env is set
    CHECK(c.out_dir == "envdir");
  }
  run_config c2 = load_config(path);
  CHECK(c2.proto.gamma == 3.0);  // guard removed the variables
  std::remove(path);

  env_guard bad("DMME_GRID", "zero");
  run_config c3;
  CHECK_THROWS_AS(apply_env_overrides(c3), validation_error);
}

TEST_CASE("initial state selection") {
  protocol_params p;
  control_protocol cp = control_fields(p);
  lri_eigensystem es0 = eigensystem(cp.g(0));
  run_config c;
  CHECK((initial_state_vector(c, es0) - es0.states[2]).norm() == 0.0);
  c.initial_state = "psi4_0";
  CHECK((initial_state_vector(c, es0) - es0.states[3]).norm() == 0.0);
  c.initial_state = "ket00";
  CHECK((initial_state_vector(c, es0) - ket(0)).norm() == 0.0);
  c.initial_state = "custom";
  c.custom_state = {0, 0, 0, 0, 0, 0, 0, 0};
  c.custom_state_set = true;
  CHECK_THROWS_AS(initial_state_vector(c, es0), validation_error);
}

TEST_CASE("trajectory CSV shape and clamping") {
  std::string header(csv_header);
  CHECK(header ==
        "t,fidelity,log10_infidelity,f,J,gamma32,gamma24,alpha32,alpha24,"
        "trace_defect,min_eig");
  CHECK(log10_infidelity(1.0) == -16.0);
  CHECK(log10_infidelity(1.0 - 1e-20) == -16.0);
  CHECK(log10_infidelity(0.9) == Catch::Approx(-1.0).epsilon(1e-12));

  run_config cfg;
  cfg.grid = 23;
  run_output out = run_simulate(cfg);
  REQUIRE(out.files.size() == 1);
  CHECK(out.files[0].first == "simulate.csv");
  const std::string& csv = out.files[0].second;
  CHECK(count_lines(csv) == 25);  // header + 24 points
  CHECK(csv.compare(0, header.size(), header) == 0);
  CHECK(out.summary["trajectory"]["points"] == 24);
  CHECK(double(out.summary["trajectory"]["final_fidelity"]) > 0.99);

  // byte-for-byte determinism of the emitted file
  run_output again = run_simulate(cfg);
  CHECK(again.files[0].second == csv);
}

TEST_CASE("infidelity benchmark series") {
  run_config cfg;
  cfg.grid = 60;
  run_output out = run_figure1(cfg);
  REQUIRE(out.files.size() == 3);
  auto& series = out.summary["series"];
  double closed_final = series["figure1_ket00_closed.csv"]["final_fidelity"];
  double open_final = series["figure1_ket00_open.csv"]["final_fidelity"];
  double psi3_final = series["figure1_psi3_open.csv"]["final_fidelity"];
  CHECK(closed_final == Catch::Approx(0.9).margin(5e-3));
  CHECK(open_final > closed_final);
  CHECK(psi3_final == Catch::Approx(1.0).margin(1e-7));
  CHECK(double(series["figure1_psi3_open.csv"]["min_rate_interior"]) > 0.0);
  CHECK_FALSE(series["figure1_ket00_closed.csv"].contains("min_rate_interior"));
}

TEST_CASE("level-shift comparison series") {
  run_config cfg;
  cfg.grid = 60;
  run_output out = run_figure2(cfg);
  REQUIRE(out.files.size() == 4);
  // the engineered dark state is blind to the shift
  double d3 = out.summary["shift_effect"]["psi3_0"]["max_fidelity_diff"];
  CHECK(d3 <= 1e-7);
  // measured structural fact of this model: the bright-state trajectory is
  // too (the shift commutes with the state in the frozen eigenbasis)
  double d4 = out.summary["shift_effect"]["psi4_0"]["max_fidelity_diff"];
  CHECK(d4 <= 1e-7);

  cfg.bath.temperature = 0.5;
  CHECK_THROWS_AS(run_figure2(cfg), unsupported_error);
}

TEST_CASE("stationary-state driver") {
  run_config cfg;
  cfg.f_const = 1.0;
  cfg.j_const = 0.1;
  run_output cold = run_steady(cfg);
  CHECK(double(cold.summary["populations"]["p3"]) == Catch::Approx(1.0).margin(1e-9));
  CHECK(double(cold.summary["max_population_diff"]) < 1e-9);
  CHECK(int(cold.summary["sector_kernel_dim"]) == 1);

  cfg.bath.temperature = 1.0;
  run_output warm = run_steady(cfg);
  double n32 = warm.summary["n32"];
  double n24 = warm.summary["n24"];
  steady_populations ref = adiabatic_steady_populations(n32, n24);
  CHECK(double(warm.summary["populations"]["p2"]) == Catch::Approx(ref.p2).margin(1e-9));
  CHECK(double(warm.summary["populations"]["p3"]) == Catch::Approx(ref.p3).margin(1e-9));
  CHECK(double(warm.summary["populations"]["p4"]) == Catch::Approx(ref.p4).margin(1e-9));
  CHECK(int(warm.summary["kernel_dim"]) == 2);
}

TEST_CASE("amplitude scan pins the frequency sign change") {
  run_config cfg;  // scan_lo 0.1, scan_hi 1.0
  CHECK(min_alpha32(cfg.proto, 0.6) == Catch::Approx(1.1111).margin(2e-3));
  run_output out = run_scan(cfg);
  double threshold = out.summary["threshold_g2m"];
  CHECK(threshold == Catch::Approx(0.9428093317875).margin(1e-6));
  CHECK(bool(out.summary["admissible_at_threshold"]));
  CHECK(out.summary["samples"].size() == 11);
  CHECK(double(out.summary["min_alpha32_at_lo"]) > 0);
  CHECK(double(out.summary["min_alpha32_at_hi"]) < 0);

  run_config narrow;
  narrow.scan_hi = 0.5;  // no sign change inside [0.1, 0.5]
  CHECK_THROWS_AS(run_scan(narrow), validation_error);
}
