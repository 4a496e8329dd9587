#include <doctest.h>

#include <cstring>
#include <sstream>

#include "glpd/io.hpp"
#include "glpd/solve.hpp"
#include "support.hpp"
#include "temp_dir.hpp"

using namespace glpd;
using nlohmann::json;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

ExperimentConfig parse(const std::string& text) { return config_from_json(json::parse(text)); }

std::string error_path(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("field files round-trip bit for bit") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (const auto& n : std::vector<std::vector<int>>{{1}, {7}, {3, 4}, {2, 3, 2}}) {
    const GridSpec g(n);
    Eigen::VectorXd v(g.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::ldexp(mant(rng), expo(rng));
    v[0] = -0.0;
    if (v.size() > 1) v[1] = std::numeric_limits<double>::denorm_min();
    if (v.size() > 2) v[2] = std::numeric_limits<double>::max();
    if (v.size() > 3) v[3] = 0.1;
    const ScalarField u(g, v);
    const std::string text = field_to_string(u);
    std::istringstream in(text);
    const ScalarField back = read_field(in);
    CHECK(back.grid() == g);
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(same_bits(back[i], v[i]));
    CHECK(field_to_string(back) == text);
  }
}

TEST_CASE("field header layout") {
  const ScalarField u(GridSpec({2, 3}), Eigen::VectorXd::LinSpaced(6, 1.0, 6.0));
  const std::string text = field_to_string(u);
  CHECK(text.rfind("glpd-field v1 d=2 n=2,3\n1\n2\n3\n", 0) == 0);
  test::TempDir dir("field");
  save_field(dir / "u.field", u);
  CHECK(load_field(dir / "u.field").values() == u.values());
  CHECK_THROWS_AS(load_field(dir / "missing.field"), FormatError);
}

TEST_CASE("malformed field files are rejected") {
  const std::vector<std::string> bad{
      "",
      "glpd-fieldx v1 d=1 n=1\n1\n",
      "glpd-field v2 d=1 n=1\n1\n",
      "glpd-field v1 d=2 n=1\n1\n",
      "glpd-field v1 d=1 n=2\n1\n",
      "glpd-field v1 d=1 n=1\n1\n2\n",
      "glpd-field v1 d=1 n=1\nabc\n",
      "glpd-field v1 d=1 n=1\n1.5x\n",
      "glpd-field v1 d=1 n=0\n",
      "glpd-field v1 d=1 n=1\nnan\n",
      "glpd-field v1 d=1 n=1 extra\n1\n",
      "glpd-field v1 n=1 d=1\n1\n",
  };
  for (const auto& text : bad) {
    std::istringstream in(text);
    CHECK_THROWS_AS_MESSAGE(read_field(in), FormatError, text);
  }
  std::istringstream blank_lines("glpd-field v1 d=1 n=2\n\n1\n  \n2\r\n");
  CHECK(read_field(blank_lines).values() == Eigen::Vector2d(1.0, 2.0));
}

TEST_CASE("config defaults and full round trip") {
  const ExperimentConfig minimal = parse(R"({"grid": {"interior_counts": [5]}})");
  CHECK(minimal.interior_counts == std::vector<int>{5});
  CHECK(minimal.epsilon == 1e-2);
  CHECK_FALSE(minimal.K);
  CHECK(minimal.init.kind == ProfileSpec::Kind::bump);
  CHECK(minimal.source.kind == ProfileSpec::Kind::zero);
  CHECK_FALSE(minimal.scan);

  ExperimentConfig c;
  c.interior_counts = {3, 4, 2};
  c.gamma = 0.1;
  c.alpha = 1.0 / 3.0;
  c.beta = 9.000000000000002;
  c.epsilon = 1e-7;
  c.K = 1e10 + 0.5;
  c.source = {ProfileSpec::Kind::constant, -0.3, {}};
  c.init = {ProfileSpec::Kind::file, 1.0, "init.field"};
  c.tol = 3e-13;
  c.max_iter = 7;
  c.seed = 18446744073709551615ULL;
  c.n_starts = 0;
  c.verify_primal_tol = 2e-11;
  c.eps_list = {0.1, 1.0 / 7.0};
  c.scan = ScanSpec{5, 0.25};
  const std::string text = config_to_json(c).dump(2);
  const ExperimentConfig back = parse(text);
  CHECK(back == c);
  CHECK(same_bits(*back.K, *c.K));
  CHECK(same_bits(back.eps_list[1], c.eps_list[1]));
  CHECK(config_to_json(back).dump(2) == text);
  CHECK(parse(config_to_json(minimal).dump()) == minimal);
}

TEST_CASE("config errors carry the field path") {
  CHECK(error_path(R"([1, 2])") == "config");
  CHECK(error_path(R"({})") == "grid.interior_counts");
  CHECK(error_path(R"({"grids": {}})") == "grids");
  CHECK(error_path(R"({"grid": {"interior_counts": []}})") == "grid.interior_counts");
  CHECK(error_path(R"({"grid": {"interior_counts": [1, 2, 3, 4]}})") == "grid.interior_counts");
  CHECK(error_path(R"({"grid": {"interior_counts": [3, 0]}})") == "grid.interior_counts[1]");
  CHECK(error_path(R"({"grid": {"interior_counts": [2.5]}})") == "grid.interior_counts[0]");
  CHECK(error_path(R"({"grid": {"interior_counts": [3], "dimension": 2}})") == "grid.dimension");
  CHECK(error_path(R"({"grid": {"interior_counts": [3], "spacing": 2}})") == "grid.spacing");
  const std::string g = R"("grid": {"interior_counts": [3]})";
  CHECK(error_path("{" + g + R"(, "params": {"beta": -1}})") == "params.beta");
  CHECK(error_path("{" + g + R"(, "params": {"gamma": 0}})") == "params.gamma");
  CHECK(error_path("{" + g + R"(, "params": {"alpha": "1"}})") == "params.alpha");
  CHECK(error_path("{" + g + R"(, "params": {"epsilon": 0}})") == "params.epsilon");
  CHECK(error_path("{" + g + R"(, "params": {"beta": 2, "epsilon": 0.5, "K": 2.5}})") == "params.K");
  CHECK(error_path("{" + g + R"(, "params": {"gama": 1}})") == "params.gama");
  CHECK(error_path("{" + g + R"(, "params": []})") == "params");
  CHECK(error_path("{" + g + R"(, "source": {"kind": "gaussian"}})") == "source.kind");
  CHECK(error_path("{" + g + R"(, "source": {"kind": "constant"}})") == "source.value");
  CHECK(error_path("{" + g + R"(, "init": {"kind": "file"}})") == "init.path");
  CHECK(error_path("{" + g + R"(, "solver": {"tol": 0}})") == "solver.tol");
  CHECK(error_path("{" + g + R"(, "solver": {"max_iter": 0}})") == "solver.max_iter");
  CHECK(error_path("{" + g + R"(, "solver": {"seed": -1}})") == "solver.seed");
  CHECK(error_path("{" + g + R"(, "solver": {"n_starts": -2}})") == "solver.n_starts");
  CHECK(error_path("{" + g + R"(, "verify": {"primal_tol": -1}})") == "verify.primal_tol");
  CHECK(error_path("{" + g + R"(, "sweep": {"eps_list": [0.1, -0.2]}})") == "sweep.eps_list[1]");
  CHECK(error_path("{" + g + R"(, "sweep": {"eps_list": 0.1}})") == "sweep.eps_list");
  CHECK(error_path("{" + g + R"(, "scan": {"n_directions": 0}})") == "scan.n_directions");
  CHECK(error_path("{" + g + R"(, "scan": {"t_max": -1}})") == "scan.t_max");
  CHECK(error_path("{" + g + R"(, "scan": {"t_min": 1}})") == "scan.t_min");
  CHECK(error_path("{" + g + "}") == "<no error>");
}

TEST_CASE("config files and profiles") {
  test::TempDir dir("config");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  test::spit(dir / "broken.json", "{\"grid\": ");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);

  const GridSpec g = GridSpec::line(4);
  const ScalarField f(g, Eigen::Vector4d(0.5, -1.0, 2.0, 0.25));
  save_field(dir / "f.field", f);
  save_field(dir / "wrong.field", ScalarField(GridSpec::line(5)));
  test::spit(dir / "c.json", R"({"grid": {"interior_counts": [4]},
      "source": {"kind": "file", "path": "f.field"},
      "init": {"kind": "constant", "value": 0.5}})");
  const ExperimentConfig c = load_config(dir / "c.json");
  const Params p = make_params(c, dir.path());
  CHECK(p.f.values() == f.values());
  CHECK(p.K == c.beta + c.epsilon + 1.0);
  CHECK(make_profile(c.init, g, dir.path(), "init").values() == Eigen::Vector4d::Constant(0.5));
  CHECK(make_profile({ProfileSpec::Kind::bump, 2.0, {}}, g, dir.path(), "init").max_abs() ==
        doctest::Approx(2.0));
  CHECK(make_profile({ProfileSpec::Kind::zero, 0.0, {}}, g, dir.path(), "init").max_abs() == 0.0);

  ExperimentConfig wrong = c;
  wrong.source.path = "wrong.field";
  try {
    make_params(wrong, dir.path());
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "source.path");
  }
  wrong.source.path = "absent.field";
  CHECK_THROWS_AS(make_params(wrong, dir.path()), ConfigError);
}

TEST_CASE("run reports round-trip") {
  const GridSpec g = GridSpec::line(5);
  const Params p = test::zero_source(g, 30.0, 0.05);
  const CriticalPoint cp = newton_primal(p, sine_bump(g), 1e-12, 50);
  REQUIRE(cp.converged);

  RunReport r;
  r.command = "verify";
  r.config.interior_counts = {5};
  r.config.beta = 30.0;
  r.config.epsilon = 0.05;
  r.exit_status = 0;
  r.status = "passed";
  r.critical_point = summarize(p, cp);
  r.field_counts = g.counts();
  r.field.assign(cp.u0.values().data(), cp.u0.values().data() + cp.u0.size());
  r.theorem = verify_theorem(p, cp);
  r.sweep = epsilon_sweep(p, cp, {0.1, 0.01});
  r.scan = concavity_radius(p, cp, 3, 0.5, 2);
  r.conjugates = {ConjugateRow{"G1", 1.0, 0.4, 0.1, 0.1 + 1e-17, 1e-17}};
  r.conjugate_max_error = 1e-17;
  r.timing = {{"solve", 0.25}};

  const std::string text = dump_json(report_to_json(r));
  const RunReport back = report_from_json(json::parse(text));
  CHECK(dump_json(report_to_json(back)) == text);
  CHECK(back.field == r.field);
  for (std::size_t i = 0; i < r.field.size(); ++i) CHECK(same_bits(back.field[i], r.field[i]));
  CHECK(back.theorem->duality_gap == r.theorem->duality_gap);
  CHECK(back.theorem->epsilon_scaling == r.theorem->epsilon_scaling);
  CHECK(back.sweep->rows.size() == 2);
  CHECK(back.scan->t_per_direction == r.scan->t_per_direction);
  CHECK(back.critical_point == r.critical_point);
  CHECK(back.conjugates == r.conjugates);
  CHECK(back.config == r.config);
  CHECK(back.timing == r.timing);

  const json j = json::parse(text);
  CHECK(j["field"]["header"] == "glpd-field v1 d=1 n=5");
  CHECK(j["theorem"]["tolerances"]["perturbations"] == 100);
}

TEST_CASE("csv tables") {
  EpsilonSweep s;
  s.rows.push_back(SweepRow{0.5, 10.5, 0.0, 0.0, -6.0, -6.0, -4.5});
  s.rows.push_back(SweepRow{0.05, 10.05, 1e-16, 2e-14, -78.0, -78.0, -76.05});
  const std::string csv = sweep_to_csv(s);
  CHECK(csv.rfind("epsilon,K,gap,dual_grad_norm,min_eig_dual,max_eig_dual,predicted_min_eig\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\n0.5,10.5,0,0,-6,-6,-4.5\n") != std::string::npos);

  const std::string c = conjugates_to_csv({ConjugateRow{"F", 10.0, 10.0, 5.0, 5.0, 0.0}});
  CHECK(c == "term,coefficient,s,closed_form,oracle,abs_error\nF,10,10,5,5,0\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
}
