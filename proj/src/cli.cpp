#include "oeprop/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "oeprop/errors.hpp"
#include "oeprop/oep.hpp"
#include "oeprop/oracle.hpp"

#ifndef OEPROP_VERSION
#define OEPROP_VERSION "unknown"
#endif

namespace oeprop::cli {
namespace {

std::string fmt(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double parse_number(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != str.size() || !std::isfinite(v)) {
    throw DomainError("not a finite number: '" + str + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string error_text(const std::exception& e) {
  if (const auto* oe = dynamic_cast<const Error*>(&e)) return std::string(oe->name());
  return "Error";
}

std::string join_methods(const std::vector<Method>& ms) {
  std::string s;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (i) s += ',';
    s += method_name(ms[i]);
  }
  return s;
}

thermo::ThermoOptions serial(thermo::ThermoOptions o) {
  o.parallel.threads = 1;
  return o;
}

double single_beta(const RunConfig& cfg, std::string_view command) {
  if (cfg.betas.size() != 1) {
    throw DomainError(std::string(command) + " takes a single --beta value");
  }
  return cfg.betas.front();
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  if (spec.empty()) throw DomainError("empty grid spec");
  bool log_spacing = false;
  if (spec.substr(0, 4) == "log:") {
    log_spacing = true;
    spec.remove_prefix(4);
  }
  std::vector<double> grid;
  if (spec.find(':') != std::string_view::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw DomainError("grid spec must be start:stop:count");
    const double a = parse_number(parts[0]);
    const double b = parse_number(parts[1]);
    const double n_real = parse_number(parts[2]);
    if (!(n_real >= 1.0 && n_real == std::floor(n_real) && n_real <= 1e7)) {
      throw DomainError("grid count must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(n_real);
    if (n == 1 && a != b) throw DomainError("a one-point grid needs start == stop");
    if (log_spacing && !(a > 0.0 && b > 0.0)) throw DomainError("log grid needs positive ends");
    grid.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      grid[i] = log_spacing ? std::exp(std::log(a) + t * (std::log(b) - std::log(a)))
                            : a + t * (b - a);
    }
    grid.front() = a;
    grid.back() = b;
  } else {
    if (log_spacing) throw DomainError("log: prefix needs start:stop:count");
    for (auto part : split(spec, ',')) grid.push_back(parse_number(part));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("grid values must be strictly increasing");
  }
  return grid;
}

std::vector<Method> parse_methods(std::string_view spec) {
  std::vector<Method> ms;
  for (auto part : split(spec, ',')) {
    if (!part.empty()) ms.push_back(parse_method(part));
  }
  if (ms.empty()) throw DomainError("at least one method is required");
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

void RunConfig::validate() const {
  params.validate();
  if (methods.empty()) throw DomainError("at least one method is required");
  if (betas.empty()) throw DomainError("at least one beta is required");
  for (double b : betas) {
    if (!(b > 0.0)) throw DomainError("beta values must be positive");
  }
  if (!(thermo.optimizer.tol_root > 0.0)) throw DomainError("--tol-root must be positive");
  if (!(thermo.tol_quad > 0.0)) throw DomainError("--tol-quad must be positive");
  if (thermo.basis.basis_size < 16) throw DomainError("--basis-size must be at least 16");
  if (!(thermo.basis.basis_omega >= 0.0)) throw DomainError("--basis-omega must be >= 0");
  if (omega && !(*omega > 0.0)) throw DomainError("--omega must be positive");
  if (!std::isfinite(x_a) || !std::isfinite(x_b)) throw DomainError("--xa/--xb must be finite");
  if (!(time > 0.0 && std::isfinite(time))) throw DomainError("--time must be positive");
}

std::string RunConfig::header(std::string_view command) const {
  std::ostringstream h;
  h << "# oeprop " << OEPROP_VERSION << ' ' << command << '\n';
  h << "# m2=" << fmt(params.m2, 17) << " lambda=" << fmt(params.lambda, 17) << '\n';
  h << "# beta=" << beta_spec << " methods=" << join_methods(methods) << '\n';
  h << "# x_grid=" << (x_grid_spec.empty() ? "default" : x_grid_spec) << '\n';
  h << "# tol_root=" << fmt(thermo.optimizer.tol_root, 17)
    << " tol_quad=" << fmt(thermo.tol_quad, 17)
    << " basis_size=" << thermo.basis.basis_size
    << " basis_omega=" << fmt(thermo.basis.basis_omega, 17) << '\n';
  return h.str();
}

std::string cmd_free_energy(const RunConfig& cfg) {
  cfg.validate();
  struct Task {
    double beta;
    Method method;
  };
  std::vector<Task> tasks;
  for (double b : cfg.betas) {
    for (Method m : cfg.methods) tasks.push_back({b, m});
  }
  const auto opts = serial(cfg.thermo);
  const auto rows = parallel_map<std::string>(tasks.size(), {cfg.threads}, [&](std::size_t i) {
    const Task& t = tasks[i];
    std::string row = fmt(t.beta) + ',' + std::string(method_name(t.method)) + ',';
    try {
      const auto r = thermo::free_energy(t.method, cfg.params, t.beta, opts);
      row += fmt(r.f) + ',' + fmt(r.omega_diag) + ',' + fmt(r.err_est) + ',';
    } catch (const std::exception& e) {
      row += ",,," + error_text(e);
    }
    return row;
  });
  std::string out = cfg.header("free-energy");
  out += "beta,method,F,omega_diag,err_est,error\n";
  for (const auto& r : rows) out += r + '\n';
  return out;
}

std::string cmd_density(const RunConfig& cfg) {
  cfg.validate();
  const double beta = single_beta(cfg, "density");
  auto opts = cfg.thermo;
  opts.parallel.threads = cfg.threads;

  std::vector<double> grid = cfg.x_grid;
  std::string out = cfg.header("density");
  std::string body = "x,method,rho\n";
  if (grid.empty()) {
    try {
      grid = thermo::default_density_grid(cfg.params, beta, opts);
    } catch (const std::exception& e) {
      return out + "# error grid: " + error_text(e) + ": " + e.what() + '\n' + body;
    }
  }
  for (Method m : cfg.methods) {
    if (m == Method::FK || m == Method::OEF) {
      out += "# skipped " + std::string(method_name(m)) + ": no density for this method\n";
      continue;
    }
    try {
      const auto d = thermo::density(m, cfg.params, beta, grid, opts);
      out += "# normalization_error " + std::string(method_name(m)) + " " +
             fmt(d.normalization_error) + '\n';
      for (std::size_t i = 0; i < d.grid.size(); ++i) {
        body += fmt(d.grid[i]) + ',' + std::string(method_name(m)) + ',' + fmt(d.rho[i]) + '\n';
      }
    } catch (const std::exception& e) {
      out += "# error " + std::string(method_name(m)) + ": " + error_text(e) + ": " + e.what() +
             '\n';
    }
  }
  return out + body;
}

std::string cmd_density_matrix(const RunConfig& cfg) {
  cfg.validate();
  const double beta = single_beta(cfg, "density-matrix");
  auto opts = cfg.thermo;
  opts.parallel.threads = cfg.threads;

  std::string out = cfg.header("density-matrix");
  std::string body = "x_a,x_b,method,rho\n";
  std::vector<double> grid = cfg.x_grid;
  if (grid.empty()) {
    constexpr int kPoints = 41;
    try {
      const double x = thermo::partition_function_oep(cfg.params, beta, opts).half_width;
      for (int i = 0; i < kPoints; ++i) grid.push_back(x * (2.0 * i / (kPoints - 1) - 1.0));
    } catch (const std::exception& e) {
      return out + "# error grid: " + error_text(e) + ": " + e.what() + '\n' + body;
    }
  }
  const std::size_t g = grid.size();
  for (Method m : cfg.methods) {
    try {
      std::vector<double> values;
      if (m == Method::OEP) {
        const auto z = thermo::partition_function_oep(cfg.params, beta, opts);
        values = parallel_map<double>(g * g, opts.parallel, [&](std::size_t k) {
          return thermo::density_matrix_oep(cfg.params, beta, grid[k / g], grid[k % g], z,
                                            serial(opts))
              .value;
        });
      } else if (m == Method::EXACT) {
        const auto s = oracle::solve_spectrum_for(cfg.params, beta, opts.basis);
        values = oracle::exact_density_matrix(s, beta, grid);
      } else {
        out += "# skipped " + std::string(method_name(m)) + ": no density matrix for this method\n";
        continue;
      }
      for (std::size_t k = 0; k < g * g; ++k) {
        body += fmt(grid[k / g]) + ',' + fmt(grid[k % g]) + ',' + std::string(method_name(m)) +
                ',' + fmt(values[k]) + '\n';
      }
    } catch (const std::exception& e) {
      out += "# error " + std::string(method_name(m)) + ": " + error_text(e) + ": " + e.what() +
             '\n';
    }
  }
  return out + body;
}

std::string cmd_propagator(const RunConfig& cfg) {
  cfg.validate();
  std::ostringstream o;
  auto line = [&](std::string_view key, double v) { o << key << '=' << fmt(v, 17) << '\n'; };
  const auto& opt = cfg.thermo.optimizer;
  oep::GapSolution gap;

  if (cfg.real_mode) {
    const RealTimePoint p{cfg.x_a, cfg.x_b, cfg.time};
    if (cfg.omega) {
      gap.omega_star = *cfg.omega;
      gap.residual = std::abs(oep::gap_residual_real(cfg.params, p, *cfg.omega));
    } else {
      gap = oep::optimize_omega_real(cfg.params, p, opt);
    }
    const kernels::cplx w = oep::w1_real(cfg.params, p, gap.omega_star);
    const kernels::cplx amp = std::exp(kernels::cplx(0.0, 1.0) * w);
    o << "mode=real\n";
    line("x_a", p.x_a);
    line("x_b", p.x_b);
    line("time", p.time);
    line("W_re", w.real());
    line("W_im", w.imag());
    line("amplitude_re", amp.real());
    line("amplitude_im", amp.imag());
  } else {
    const EuclideanPoint p{cfg.x_a, cfg.x_b, cfg.time};
    if (cfg.omega) {
      gap.omega_star = *cfg.omega;
      gap.residual = std::abs(oep::gap_residual_imag(cfg.params, p, *cfg.omega));
    } else {
      gap = oep::optimize_omega_imag(cfg.params, p, opt);
    }
    const double w = oep::w1_imag(cfg.params, p, gap.omega_star);
    o << "mode=imag\n";
    line("x_a", p.x_a);
    line("x_b", p.x_b);
    line("beta", p.beta);
    line("W", w);
    line("amplitude", std::exp(w));
  }
  line("omega_star", gap.omega_star);
  line("residual", gap.residual);
  o << "n_roots=" << gap.n_roots << '\n';
  o << "fallback_used=" << (gap.fallback_used ? 1 : 0) << '\n';
  o << "omega_forced=" << (cfg.omega ? 1 : 0) << '\n';
  return o.str();
}

std::string cmd_exact_spectrum(const RunConfig& cfg) {
  cfg.validate();
  const double omega = cfg.thermo.basis.basis_omega > 0.0
                           ? cfg.thermo.basis.basis_omega
                           : oracle::default_basis_frequency(cfg.params);
  const auto s = oracle::solve_spectrum(cfg.params, cfg.thermo.basis.basis_size, omega);
  std::string out = cfg.header("exact-spectrum");
  out += "# basis_size=" + std::to_string(s.basis_size) + " basis_frequency=" + fmt(omega, 17) +
         " reliable_levels=" + std::to_string(s.reliable_levels) + '\n';
  out += "n,energy\n";
  for (std::size_t n = 0; n < s.reliable_levels; ++n) {
    out += std::to_string(n) + ',' + fmt(s.energies[n]) + '\n';
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"First-order optimized expansion of the anharmonic oscillator propagator"};
  app.set_version_flag("--version", std::string(OEPROP_VERSION));
  app.set_config("--config", "", "key=value config file; flags override it");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string methods = "EXACT,FK,OEF,OEP";
  std::string out_path;
  std::string mode = "imag";
  double omega = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--m2", cfg.params.m2, "mass squared (negative: double well)")
        ->capture_default_str();
    sub->add_option("--lambda", cfg.params.lambda, "quartic coupling")->capture_default_str();
    sub->add_option("--beta", cfg.beta_spec, "inverse temperature(s): v, v1,v2, a:b:n, log:a:b:n")
        ->capture_default_str();
    sub->add_option("--x-grid", cfg.x_grid_spec, "position grid spec");
    sub->add_option("--methods", methods, "comma list of OEP,OEF,FK,EXACT")->capture_default_str();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--tol-root", cfg.thermo.optimizer.tol_root)->capture_default_str();
    sub->add_option("--tol-quad", cfg.thermo.tol_quad)->capture_default_str();
    sub->add_option("--basis-size", cfg.thermo.basis.basis_size)->capture_default_str();
    sub->add_option("--basis-omega", cfg.thermo.basis.basis_omega, "0: automatic")
        ->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
  };
  // Shared options live on the top level so a flat key=value config file maps
  // onto them; subcommands fall through to accept them after their name.
  common(&app);

  std::function<std::string(const RunConfig&)> command;
  auto add = [&](const char* name, const char* help,
                 std::string (*fn)(const RunConfig&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&command, fn] { command = fn; });
    return sub;
  };
  add("free-energy", "free energy vs beta for the selected methods", cmd_free_energy);
  add("density", "particle density on a position grid (OEP, EXACT)", cmd_density);
  add("density-matrix", "density matrix on grid x grid (OEP, EXACT)", cmd_density_matrix);
  add("exact-spectrum", "oracle energy levels", cmd_exact_spectrum);
  CLI::App* prop = add("propagator", "single first-order amplitude", cmd_propagator);
  prop->add_option("--xa", cfg.x_a)->capture_default_str();
  prop->add_option("--xb", cfg.x_b)->capture_default_str();
  prop->add_option("--time", cfg.time, "beta (imag) or T (real); defaults to --beta")
      ->capture_default_str();
  prop->add_option("--mode", mode)->check(CLI::IsMember({"real", "imag"}))->capture_default_str();
  prop->add_option("--omega", omega, "force the trial frequency instead of optimizing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    cfg.betas = parse_grid(cfg.beta_spec);
    cfg.methods = parse_methods(methods);
    if (!cfg.x_grid_spec.empty()) cfg.x_grid = parse_grid(cfg.x_grid_spec);
    cfg.real_mode = mode == "real";
    if (prop->parsed()) {
      if (prop->count("--omega") > 0) cfg.omega = omega;
      if (prop->count("--time") == 0) cfg.time = cfg.betas.front();
    }
    cfg.validate();
  } catch (const Error& e) {
    err << "error=" << e.name() << ": " << e.what() << '\n';
    return kExitConfig;
  }

  std::string text;
  try {
    text = command(cfg);
  } catch (const DomainError& e) {
    err << "error=" << e.name() << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error=" << e.name() << ": " << e.what() << '\n';
    return kExitNumerical;
  }

  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    if (!f) {
      err << "error=IOError: cannot write " << out_path << '\n';
      return kExitConfig;
    }
  }
  return kExitOk;
}

}  // namespace oeprop::cli
