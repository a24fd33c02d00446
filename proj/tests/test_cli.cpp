#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oeprop/cli.hpp"
#include "oeprop/errors.hpp"
#include "oeprop/oep.hpp"

using namespace oeprop;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "oeprop");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> f;
  std::stringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) f.push_back(cell);
  if (!s.empty() && s.back() == ',') f.emplace_back();
  return f;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

Outcome run_binary(const std::string& args) {
  const std::string cmd = std::string(OEPROP_CLI_PATH) + ' ' + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

}  // namespace

TEST_CASE("grid specs") {
  CHECK(cli::parse_grid("2.5") == std::vector<double>{2.5});
  CHECK(cli::parse_grid("0.1,1,5") == std::vector<double>{0.1, 1.0, 5.0});
  const auto lin = cli::parse_grid("0:1:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin.front() == 0.0);
  CHECK(lin.back() == 1.0);
  CHECK(lin[2] == doctest::Approx(0.5));
  const auto lg = cli::parse_grid("log:0.1:10:3");
  REQUIRE(lg.size() == 3);
  CHECK(lg[1] == doctest::Approx(1.0));
  CHECK(lg.back() == doctest::Approx(10.0));
  for (const char* bad : {"", "a", "1,1", "3,2", "0:1:1", "log:-1:2:3", "1:2", "1:2:3:4"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(cli::parse_grid(bad), DomainError);
  }
}

TEST_CASE("method lists") {
  CHECK(cli::parse_methods("oep,EXACT,oep") == std::vector<Method>{Method::EXACT, Method::OEP});
  CHECK_THROWS_AS(cli::parse_methods("OEP,WKB"), DomainError);
}

TEST_CASE("free-energy sweep writes one row per beta and method") {
  const auto o = run_args({"free-energy", "--m2", "1", "--lambda", "0", "--beta", "0.1:10:50"});
  REQUIRE(o.code == cli::kExitOk);
  const auto rows = data_rows(o.out);
  CHECK(rows.size() == 200);
  // Harmonic: every method must agree.
  for (std::size_t i = 0; i < rows.size(); i += 4) {
    std::vector<double> f;
    for (std::size_t j = i; j < i + 4; ++j) {
      const auto cells = split(rows[j]);
      REQUIRE(cells.size() == 6);
      CHECK(cells[5].empty());
      f.push_back(std::stod(cells[2]));
    }
    for (double v : f) CHECK(std::abs(v - f.front()) < 1e-7);
  }
  CHECK(o.out.rfind("# oeprop ", 0) == 0);
  CHECK(o.out.find("beta,method,F,omega_diag,err_est,error\n") != std::string::npos);
}

TEST_CASE("output does not depend on the thread count") {
  const auto one = run_args({"free-energy", "--m2", "-1", "--lambda", "0.1", "--beta", "0.5,2",
                             "--threads", "1"});
  const auto four = run_args({"free-energy", "--m2", "-1", "--lambda", "0.1", "--beta", "0.5,2",
                              "--threads", "4"});
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  const auto d1 = run_binary("density --lambda 1 --beta 1 --threads 1");
  const auto d4 = run_binary("density --lambda 1 --beta 1 --threads 4");
  REQUIRE(d1.code == 0);
  CHECK(d1.out == d4.out);
}

TEST_CASE("exit codes") {
  CHECK(run_binary("free-energy --no-such-flag").code == cli::kExitConfig);
  CHECK(run_binary("free-energy --lambda -1").code == cli::kExitConfig);
  CHECK(run_binary("free-energy --beta 0").code == cli::kExitConfig);
  CHECK(run_binary("--version").code == cli::kExitOk);
  CHECK(run_binary("propagator --help").code == cli::kExitOk);
  const auto caustic = run_binary("propagator --mode real --m2 1 --lambda 0.1 --xa 0.3 --xb 0.5 "
                                  "--time 3.141592653589793 --omega 1");
  CHECK(caustic.code == cli::kExitNumerical);
  CHECK(caustic.out.find("error=CausticError") != std::string::npos);
}

TEST_CASE("propagator output reproduces the library call bit for bit") {
  const OscillatorParams p{1.0, 0.3};
  const auto o = run_args({"propagator", "--m2", "1", "--lambda", "0.3", "--xa", "0.4", "--xb",
                           "-0.7", "--time", "1.7"});
  REQUIRE(o.code == 0);
  const auto kv = key_values(o.out);
  const auto a = oep::amplitude_imag(p, {0.4, -0.7, 1.7});
  CHECK(kv.at("mode") == "imag");
  CHECK(std::strtod(kv.at("W").c_str(), nullptr) == a.w_value);
  CHECK(std::strtod(kv.at("omega_star").c_str(), nullptr) == a.gap.omega_star);
  CHECK(std::strtod(kv.at("amplitude").c_str(), nullptr) == std::exp(a.w_value));

  const auto r = run_args({"propagator", "--mode", "real", "--m2", "1", "--lambda", "0.01", "--xa",
                           "0.2", "--xb", "0.5", "--time", "0.5"});
  REQUIRE(r.code == 0);
  const auto kr = key_values(r.out);
  const auto b = oep::amplitude_real({1.0, 0.01}, {0.2, 0.5, 0.5});
  CHECK(std::strtod(kr.at("W_re").c_str(), nullptr) == b.w_value.real());
  CHECK(std::strtod(kr.at("W_im").c_str(), nullptr) == b.w_value.imag());
  CHECK(std::strtod(kr.at("omega_star").c_str(), nullptr) == b.gap.omega_star);
}

TEST_CASE("symmetric grid gives a symmetric density") {
  const auto o = run_args({"density", "--m2", "-1", "--lambda", "0.1", "--beta", "2", "--x-grid",
                           "-3:3:61", "--methods", "OEP,EXACT"});
  REQUIRE(o.code == 0);
  std::map<std::string, std::vector<double>> rho;
  for (const auto& row : data_rows(o.out)) {
    const auto c = split(row);
    rho[c[1]].push_back(std::stod(c[2]));
  }
  for (const auto& [method, v] : rho) {
    CAPTURE(method);
    REQUIRE(v.size() == 61);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(std::abs(v[i] - v[v.size() - 1 - i]) <= 1e-10 * v[30] + 1e-15);
    }
  }
  CHECK(o.out.find("# normalization_error") != std::string::npos);
}

TEST_CASE("density commands reject several temperatures") {
  CHECK(run_args({"density", "--beta", "1,2"}).code == cli::kExitConfig);
}

TEST_CASE("density-matrix and exact-spectrum run") {
  const auto dm = run_args({"density-matrix", "--lambda", "1", "--beta", "1", "--x-grid",
                            "-1:1:5", "--methods", "OEP"});
  REQUIRE(dm.code == 0);
  CHECK(data_rows(dm.out).size() == 25);
  const auto sp = run_args({"exact-spectrum", "--m2", "0", "--lambda", "1", "--basis-size", "64"});
  REQUIRE(sp.code == 0);
  const auto rows = data_rows(sp.out);
  REQUIRE(rows.size() == 32);
  CHECK(std::stod(split(rows[0])[1]) == doctest::Approx(0.667986259).epsilon(1e-9));
}

TEST_CASE("config file supplies defaults that flags override") {
  const std::string path = "oeprop_test_config.ini";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("m2 = 1\nlambda = 0\nbeta = 2\nmethods = OEP\n", f);
    std::fclose(f);
  }
  const auto o = run_args({"free-energy", "--config", path, "--beta", "3"});
  std::remove(path.c_str());
  REQUIRE(o.code == 0);
  const auto rows = data_rows(o.out);
  REQUIRE(rows.size() == 1);
  const auto c = split(rows[0]);
  CHECK(c[1] == "OEP");
  CHECK(std::stod(c[0]) == 3.0);
  CHECK(std::stod(c[2]) == doctest::Approx(std::log(2.0 * std::sinh(1.5)) / 3.0).epsilon(1e-10));
}
