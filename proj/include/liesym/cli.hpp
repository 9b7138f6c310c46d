#pragma once

// Command-line front end: analyze, reduce3, integrate, residual-sweep.
// Exit codes: 0 ok, 2 input error, 3 internal invariant violation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liesym/analysis.hpp"
#include "liesym/numeric.hpp"
#include "liesym/reference_check.hpp"
#include "liesym/report.hpp"

namespace liesym::cli {

enum ExitCode : int { ok = 0, input_error = 2, invariant_violation = 3 };

struct RunConfig {
  std::string command;
  std::string ode_path;
  int deg_x = 4;
  int deg_t = 6;
  std::vector<std::string> bind;
  std::string format = "text";
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  std::string out;
  std::string reference;
  std::string new_dep = "z";
  std::string init = "0.1,0,0";
  double step = 1e-3;
  double t_end = 1;
  std::string xi, eta;
  int basis = 0;
  std::string box;
};

/// Exact value of "3", "-7/2", "0.25" or "1.5e-3".
inline Rational parse_rational(const std::string& text) {
  const std::string s = detail::trim(text);
  auto digits = [](const std::string& d) {
    return !d.empty() && d.find_first_not_of("0123456789") == std::string::npos;
  };
  auto fail = [&]() -> Rational { throw InputError("not a number: '" + text + "'"); };
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
  std::string body = s.substr(i);
  Rational r;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    const std::string p = body.substr(0, slash), q = body.substr(slash + 1);
    if (!digits(p) || !digits(q)) return fail();
    const Integer den(q);
    if (den == 0) throw InputError("zero denominator in '" + text + "'");
    r = Rational(Integer(p), den);
  } else {
    int exp10 = 0;
    if (auto e = body.find_first_of("eE"); e != std::string::npos) {
      try {
        std::size_t used = 0;
        exp10 = std::stoi(body.substr(e + 1), &used);
        if (used != body.size() - e - 1) return fail();
      } catch (const std::exception&) {
        return fail();
      }
      body = body.substr(0, e);
    }
    std::string ip = body, fp;
    if (auto dot = body.find('.'); dot != std::string::npos) {
      ip = body.substr(0, dot);
      fp = body.substr(dot + 1);
    }
    if (ip.empty() && fp.empty()) return fail();
    if ((!ip.empty() && !digits(ip)) || (!fp.empty() && !digits(fp))) return fail();
    if (std::abs(exp10) > 400) return fail();
    Integer num(ip.empty() ? "0" : ip);
    for (char c : fp) num = num * 10 + (c - '0');
    exp10 -= static_cast<int>(fp.size());
    Integer scale = 1;
    for (int k = 0; k < std::abs(exp10); ++k) scale *= 10;
    r = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
  }
  return neg ? Rational(-r) : r;
}

inline std::map<std::string, Rational> parse_bindings(const std::vector<std::string>& items) {
  std::map<std::string, Rational> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--bind expects name=value, got '" + item + "'");
    const std::string name = detail::trim(item.substr(0, eq));
    if (name.empty()) throw InputError("--bind expects name=value, got '" + item + "'");
    if (out.count(name)) throw InputError("parameter '" + name + "' bound twice");
    out[name] = parse_rational(item.substr(eq + 1));
  }
  return out;
}

inline std::map<std::string, double> numeric_bindings(const std::map<std::string, Rational>& b) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : b) out[k] = static_cast<double>(v);
  return out;
}

inline std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(text)) out.push_back(static_cast<double>(parse_rational(item)));
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline OdeSpec load_ode(const std::string& path) { return read_ode_spec(read_file(path), path); }

inline AnalysisOptions analysis_options(const RunConfig& cfg, std::map<std::string, Rational> bindings) {
  if (cfg.deg_x < 0 || cfg.deg_t < 0) throw InputError("ansatz degrees must be nonnegative");
  AnalysisOptions opts;
  opts.deg_x = static_cast<unsigned>(cfg.deg_x);
  opts.deg_t = static_cast<unsigned>(cfg.deg_t);
  opts.bindings = std::move(bindings);
  return opts;
}

inline std::string run_analyze(const RunConfig& cfg) {
  const OdeSpec ode = load_ode(cfg.ode_path);
  const Analysis an = analyze(ode, analysis_options(cfg, parse_bindings(cfg.bind)));
  std::optional<std::vector<ReferenceResult>> ref;
  if (!cfg.reference.empty()) ref = check_reference(read_reference(read_file(cfg.reference), cfg.reference), an);
  const auto* r = ref ? &*ref : nullptr;
  if (cfg.format == "latex") return render_latex(an, r);
  if (cfg.format == "json") return render_json(an, r).dump(2) + "\n";
  return render_text(an, r);
}

inline std::string run_reduce3(const RunConfig& cfg) {
  OdeSpec ode = load_ode(cfg.ode_path);
  if (!cfg.bind.empty()) ode = specialize_params(ode, parse_bindings(cfg.bind));
  const AutonomousReduction red = reduce_autonomous(AutonomousOde3::from_spec(ode), cfg.new_dep);
  const std::string z = red.spec.notation.dep, y = red.spec.notation.indep;
  std::vector<std::string> header{z + "(" + y + ") = " + y + "' after eliminating " + ode.notation.indep + " from an autonomous third-order equation"};
  if (red.stripped_power > 0)
    header.push_back("valid on the branch " + z + " != 0 (divided by " + z +
                     (red.stripped_power > 1 ? "^" + std::to_string(red.stripped_power) : "") + ")");
  else
    for (const auto& c : detail::side_conditions(red.spec)) header.push_back("valid on the branch " + c);
  return write_ode_spec(red.spec, header);
}

inline std::string run_integrate(const RunConfig& cfg) {
  const auto b = numeric_bindings(parse_bindings(cfg.bind));
  NumericParams p;
  for (const char* name : {"a", "b"}) {
    if (!b.count(name)) throw InputError(std::string("parameter '") + name + "' is unbound (use --bind " + name + "=...)");
  }
  for (const auto& [k, v] : b)
    if (k != "a" && k != "b") throw InputError("unknown parameter '" + k + "'");
  p.a = b.at("a");
  p.b = b.at("b");
  p.step = cfg.step;
  p.t_end = cfg.t_end;
  const auto init = parse_numbers(cfg.init, "--init");
  if (init.size() != 3) throw InputError("--init expects x,y,z");
  const Trajectory tr = integrate(p, {0, init[0], init[1], init[2]});
  if (tr.truncated) std::cerr << "warning: trajectory truncated: " << tr.reason << "\n";
  return trajectory_csv(tr);
}

inline SampleBox parse_box(const std::string& text) {
  SampleBox box;
  if (text.empty()) return box;
  const auto v = parse_numbers(text, "--box");
  if (v.size() == 2) {
    box.t_lo = box.x_lo = box.xdot_lo = v[0];
    box.t_hi = box.x_hi = box.xdot_hi = v[1];
  } else if (v.size() == 6) {
    box.t_lo = v[0], box.t_hi = v[1], box.x_lo = v[2], box.x_hi = v[3], box.xdot_lo = v[4], box.xdot_hi = v[5];
  } else {
    throw InputError("--box expects lo,hi or t_lo,t_hi,x_lo,x_hi,xdot_lo,xdot_hi");
  }
  return box;
}

inline std::string run_residual_sweep(const RunConfig& cfg) {
  const OdeSpec ode = load_ode(cfg.ode_path);
  const auto bindings = parse_bindings(cfg.bind);
  const auto params = numeric_bindings(bindings);
  Generator g;
  if (cfg.basis > 0) {
    if (!cfg.xi.empty() || !cfg.eta.empty()) throw InputError("give either --basis or --xi/--eta");
    const Analysis an = analyze(ode, analysis_options(cfg, bindings));
    if (static_cast<std::size_t>(cfg.basis) > an.dim())
      throw InputError("--basis " + std::to_string(cfg.basis) + " out of range (dimension " +
                       std::to_string(an.dim()) + ")");
    g = an.solution.basis.generators[static_cast<std::size_t>(cfg.basis - 1)];
  } else {
    const ParseContext ctx = ode.parse_context();
    auto parse = [&](const std::string& s, const char* what) {
      try {
        return s.empty() ? Expr() : parse_expr(s, ctx);
      } catch (const InputError& e) {
        throw InputError(std::string(what) + ": " + e.what());
      }
    };
    g = Generator::concrete(parse(cfg.xi, "--xi"), parse(cfg.eta, "--eta"));
  }
  const SweepReport r = sample_sweep(ode, g, cfg.samples, cfg.seed, parse_box(cfg.box), params);
  return sweep_json(r).dump(2) + "\n";
}

inline std::string dispatch(const RunConfig& cfg) {
  if (cfg.command == "analyze") return run_analyze(cfg);
  if (cfg.command == "reduce3") return run_reduce3(cfg);
  if (cfg.command == "integrate") return run_integrate(cfg);
  return run_residual_sweep(cfg);
}

/// Parses arguments and runs one command; output goes to `out` unless --out is given.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lie point-symmetry analysis of scalar ODEs", "liesym"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_bind = [&](CLI::App* sub) {
    sub->add_option("--bind", cfg.bind, "parameter value name=value (repeatable; exact for fractions and decimals)");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "write output to this file instead of stdout"); };
  auto add_degrees = [&](CLI::App* sub) {
    sub->add_option("--deg-x", cfg.deg_x, "ansatz degree in x")->capture_default_str();
    sub->add_option("--deg-t", cfg.deg_t, "ansatz degree in t")->capture_default_str();
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "symmetry analysis report");
  analyze_cmd->add_option("ode", cfg.ode_path, "ODE spec file")->required();
  add_degrees(analyze_cmd);
  add_bind(analyze_cmd);
  analyze_cmd->add_option("--format", cfg.format, "text, latex or json")
      ->check(CLI::IsMember({"text", "latex", "json"}))
      ->capture_default_str();
  analyze_cmd->add_option("--reference", cfg.reference, "transcribed formulas to compare term by term");
  add_out(analyze_cmd);

  auto* reduce_cmd = app.add_subcommand("reduce3", "order reduction of an autonomous third-order ODE");
  reduce_cmd->add_option("ode", cfg.ode_path, "ODE spec file")->required();
  reduce_cmd->add_option("--dep", cfg.new_dep, "name of the new dependent variable")->capture_default_str();
  add_bind(reduce_cmd);
  add_out(reduce_cmd);

  auto* integrate_cmd = app.add_subcommand("integrate", "RK4 trajectory of x'=y, y'=z, z'=x^3-a^2x-y-bz as CSV");
  add_bind(integrate_cmd);
  integrate_cmd->add_option("--init", cfg.init, "initial state x,y,z")->capture_default_str();
  integrate_cmd->add_option("--step", cfg.step, "step size")->capture_default_str();
  integrate_cmd->add_option("--t-end", cfg.t_end, "final time")->capture_default_str();
  add_out(integrate_cmd);

  auto* sweep_cmd = app.add_subcommand("residual-sweep", "sampled symmetry residual of a generator as JSON");
  sweep_cmd->add_option("ode", cfg.ode_path, "ODE spec file")->required();
  sweep_cmd->add_option("--xi", cfg.xi, "xi(t,x)");
  sweep_cmd->add_option("--eta", cfg.eta, "eta(t,x)");
  sweep_cmd->add_option("--basis", cfg.basis, "use generator k (1-based) of the computed basis");
  add_degrees(sweep_cmd);
  add_bind(sweep_cmd);
  sweep_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  sweep_cmd->add_option("--samples", cfg.samples, "number of samples")->capture_default_str();
  sweep_cmd->add_option("--box", cfg.box, "lo,hi or t_lo,t_hi,x_lo,x_hi,xdot_lo,xdot_hi (default -2,2)");
  add_out(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return input_error;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    const std::string text = dispatch(cfg);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw InputError("cannot write '" + cfg.out + "'");
      f << text;
    }
    return ok;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return invariant_violation;
  }
}

}  // namespace liesym::cli
