#include "helpers.hpp"

#include "varmin/io.hpp"

#include <sstream>

using namespace varmin;
using testing::catalog;
using testing::vec;

TEST_CASE("format_double round-trips bit for bit") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.5 / std::tan(1.0)}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("path csv layout") {
  const Problem p = Problem::two_point(catalog("free_particle", 2), 1.0, vec({0.0, 0.0}), vec({1.0, 2.0}));
  const SolveResult r = minimize_discrete(p, 4, initial_guess(p, 4, InitStrategy::straight_line));
  const std::string csv = path_csv(r.path, r.momenta);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,t_k,y0,y1,z0,z1");
  std::getline(in, line);
  CHECK(line == "0,0,0,0,1,2");
  int rows = 1;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 5);
  CHECK(last == "4,1,1,2,1,2");
}

TEST_CASE("curve csv round trip") {
  const SampledCurve zig = zigzag_curve(vec({0.0}), vec({1.0}), 1.0, 4, 1.5, 64);
  std::istringstream in(curve_csv(zig));
  const SampledCurve back = read_curve_csv(in);
  REQUIRE(back.size() == zig.size());
  for (std::size_t i = 0; i < zig.size(); ++i) {
    CHECK(back.s[i] == zig.s[i]);
    CHECK(back.y[i] == zig.y[i]);
    CHECK(back.dy[i] == zig.dy[i]);
  }
  // A path csv is also a curve.
  const Problem p = Problem::two_point(catalog("free_particle"), 1.0, vec({0.0}), vec({1.0}));
  const SolveResult r = minimize_discrete(p, 8, initial_guess(p, 8, InitStrategy::straight_line));
  std::istringstream path_in(path_csv(r.path, r.momenta));
  const SampledCurve from_path = read_curve_csv(path_in);
  CHECK(from_path.size() == 9);
  CHECK_FALSE(from_path.has_derivatives());
}

TEST_CASE("malformed curve files") {
  const auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_curve_csv(in);
  };
  CHECK_THROWS_AS(read(""), ConfigError);
  CHECK_THROWS_AS(read("a,b\n0,1\n"), ConfigError);
  CHECK_THROWS_AS(read("s,y0\n0,0\n0.5,x\n1,1\n"), ConfigError);
  CHECK_THROWS_AS(read("s,y0\n0,0\n0.5\n1,1\n"), ConfigError);
  CHECK_THROWS_AS(read("s,y0\n0,0\n1,1\n"), ConfigError);
  CHECK_THROWS_AS(read("s,y0\n0,0\n0.2,0\n1,1\n"), ConfigError);
  CHECK_THROWS_AS(read("s,y0\n0,0\n0.5,0.5\n0.5,1\n"), ConfigError);
  CHECK_THROWS_AS(read("s,y0,y1,dy0\n0,0,0,0\n0.5,0,0,0\n1,0,0,0\n"), ConfigError);
  CHECK_NOTHROW(read("s,y0\n0,0\n0.5,0.5\n1,1\n\n"));
}

TEST_CASE("solve result json and bit-exact revalidation") {
  const Problem b = Problem::bolza(catalog("harmonic_oscillator"), 1.0, vec({1.0}), TerminalCost::quadratic(0.5, vec({0.2})));
  const SolveResult r = minimize_discrete(b, 33, initial_guess(b, 33, InitStrategy::constant));
  const json j = solve_result_json(b, r);
  for (const char* key : {"action", "grad_norm", "iterations", "converged", "certificate", "nodes", "momenta"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["nodes"].size() == 34);
  CHECK(j["momenta"].size() == 33);

  const json reread = json::parse(j.dump(2));
  const Revalidation v = revalidate_solve_result(reread, b);
  CHECK(v.bit_exact());
  CHECK(v.action == r.action);
  CHECK(v.grad_norm == r.grad_norm);

  json tampered = reread;
  tampered["nodes"][3][0] = tampered["nodes"][3][0].get<double>() + 1e-9;
  CHECK_FALSE(revalidate_solve_result(tampered, b).bit_exact());
  json broken = reread;
  broken.erase("nodes");
  CHECK_THROWS_AS(revalidate_solve_result(broken, b), ConfigError);
}

TEST_CASE("convergence report serializations") {
  const Problem p = Problem::two_point(catalog("harmonic_oscillator"), 1.0, vec({0.0}), vec({1.0}));
  const ConvergenceReport r = refine_study(p, 8, 3);
  const json j = convergence_report_json(r);
  CHECK(j["levels"].size() == 3);
  CHECK(j["observed_orders"].size() == 1);
  CHECK(j["verdict"] == to_string(r.verdict));
  const std::string csv = convergence_csv(r);
  CHECK(csv.rfind("K,h,action,grad_norm,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const std::string table = convergence_table(r);
  CHECK(table.find("verdict:") != std::string::npos);
}

TEST_CASE("non-finite values serialize as null") {
  CHECK(to_json(vec({1.0, INFINITY}))[1].is_null());
  CHECK_THROWS_AS(vec_from_json(json::parse("[1, \"a\"]")), ConfigError);
  CHECK(vec_from_json(json::parse("[1.5, -2]")) == vec({1.5, -2.0}));
}
