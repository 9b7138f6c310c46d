#pragma once

// Text, LaTeX and JSON renderings of an Analysis. All three list the same
// sections in the same order.

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "liesym/analysis.hpp"
#include "liesym/printer.hpp"
#include "liesym/reference_check.hpp"

namespace liesym {

inline constexpr const char* report_schema = "lie-sym-report/1";
inline constexpr std::size_t family_print_limit = 8;

namespace detail {

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

inline std::string rational_text(const Rational& r) { return r.str(); }

/// "x != 0" for monomial denominators, "D != 0" otherwise.
inline std::vector<std::string> side_conditions(const OdeSpec& ode) {
  std::vector<std::string> out;
  const Expr& d = ode.rhs_den;
  if (d.is_constant()) return out;
  if (d.size() == 1) {
    for (const auto& [a, p] : d.terms().begin()->first.factors())
      out.push_back(atom_text(a, ode.notation) + " != 0");
    const ParamField& c = d.terms().begin()->second;
    if (!c.is_rational()) out.push_back(c.to_string() + " != 0");
    return out;
  }
  out.push_back(to_text(d, ode.notation) + " != 0");
  return out;
}

inline std::string power_label(const std::string& base, unsigned p) {
  return p == 1 ? base : base + "^" + std::to_string(p);
}

inline std::string relation_text(const Expr& rel, const Notation& nt) {
  return to_text(rel, nt) + " = 0";
}

inline std::string rhs_text(const OdeSpec& ode) {
  const Notation& nt = ode.notation;
  const std::string lhs = nt.dep + primes(ode.order);
  if (ode.rhs_den.is_constant() && ode.rhs_den.constant_value().is_one()) return lhs + " = " + to_text(ode.rhs_num, nt);
  return lhs + " = (" + to_text(ode.rhs_num, nt) + ")/(" + to_text(ode.rhs_den, nt) + ")";
}

inline std::string latex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '&' || c == '%' || c == '#') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string render_text(const Analysis& an, const std::vector<ReferenceResult>* reference = nullptr) {
  const Notation& nt = an.ode.notation;
  const std::string xd = nt.dep + "'";
  std::ostringstream os;

  os << "== ODE\n" << detail::rhs_text(an.input) << "\n";
  os << "parameters: " << (an.input.params.empty() ? "(none)" : detail::join(an.input.params, ", ")) << "\n";
  if (!an.options.bindings.empty()) {
    std::vector<std::string> b;
    for (const auto& [k, v] : an.options.bindings) b.push_back(k + " = " + detail::rational_text(v));
    os << "bindings: " << detail::join(b, ", ") << "\n";
    os << "analyzed: " << detail::rhs_text(an.ode) << "\n";
  }

  os << "\n== Prolongation\n";
  os << "eta1 = " << to_text(an.prolonged.prolongations.at(0), nt) << "\n";
  os << "eta2 = " << to_text(an.prolonged.prolongations.at(1), nt) << "\n";

  os << "\n== Symmetry condition\n";
  os << "multiplied by " << to_text(an.condition.clearing.factor, nt) << " (denominator to the power "
     << an.condition.clearing.den_power;
  if (!an.condition.clearing.removed.empty())
    os << ", common factor " << to_text(Expr(an.condition.clearing.removed, ParamField(1)), nt) << " removed";
  os << ")\n";
  os << to_text(an.condition.numerator, nt) << " = 0\n";

  os << "\n== Determining system\n";
  for (const auto& d : an.determining.equations)
    os << "[" << detail::power_label(xd, d.xdot_power) << "] " << to_text(d.eq, nt) << " = 0\n";
  if (an.determining.equations.empty()) os << "(empty)\n";

  os << "\n== Ansatz\n";
  os << "xi = " << to_text(an.ansatz.xi(), nt) << "\n";
  os << "eta = " << to_text(an.ansatz.eta(), nt) << "\n";
  os << "each coefficient function is a polynomial of degree " << an.options.deg_t << " in " << nt.indep << " ("
     << an.linear.constants.size() << " constants k1..k" << an.linear.constants.size() << ")\n";

  os << "\n== Reduced systems\n";
  os << "collected in " << nt.dep << ": " << an.t_system.equations.size() << " equations\n";
  for (const auto& e : an.t_system.equations)
    os << "[" << detail::power_label(xd, e.xdot_power) << ", " << detail::power_label(nt.dep, e.x_power) << "] "
       << to_text(e.eq, nt) << " = 0\n";
  os << "collected in " << nt.indep << ": " << an.linear.rows.size() << " linear equations in "
     << an.linear.constants.size() << " constants, rank " << an.solution.rank << "\n";

  os << "\n== Elimination trace\n";
  for (const auto& s : an.solution.stages) {
    os << "stage " << detail::power_label(xd, s.xdot_power) << ": " << s.rows << " equations, dimension "
       << s.dim_before << " -> " << s.dim_after << "\n";
    if (!s.parametrized) continue;
    if (s.family_params.empty()) {
      os << "  family: trivial\n";
      continue;
    }
    if (s.family_params.size() > family_print_limit) {
      os << "  family of dimension " << s.family_params.size() << "\n";
    } else {
      os << "  family in " << detail::join(s.family_params, ", ") << ":\n";
      os << "    xi = " << to_text(s.family_xi, nt) << "\n";
      os << "    eta = " << to_text(s.family_eta, nt) << "\n";
      for (const auto& r : s.relations) os << "  constraint: " << detail::relation_text(r, nt) << "\n";
    }
    if (!s.forced_zero.empty()) os << "  forced to zero: " << detail::join(s.forced_zero, ", ") << "\n";
  }

  os << "\n== Basis\n";
  os << "dimension " << an.dim() << "\n";
  for (std::size_t i = 0; i < an.solution.basis.generators.size(); ++i) {
    const auto& g = an.solution.basis.generators[i];
    os << "V" << i + 1 << ": xi = " << to_text(g.xi, nt) << ", eta = " << to_text(g.eta, nt) << "\n";
  }
  os << "verified: " << an.verification.checks.size() << " generators, "
     << (an.verification.passed() ? "all residuals 0" : "FAILURES") << "\n";

  os << "\n== Genericity\n";
  if (an.solution.basis.genericity.empty()) os << "(none)\n";
  for (const auto& g : an.solution.basis.genericity) os << genericity_text(g) << "\n";

  os << "\n== Side conditions\n";
  const auto side = detail::side_conditions(an.ode);
  if (side.empty()) os << "(none)\n";
  for (const auto& s : side) os << s << "\n";

  os << "\n== Verdict\n" << an.verdict() << "\n";

  if (reference) os << "\n== Reference check\n" << format_reference_results(*reference, nt);
  return os.str();
}

inline std::string render_latex(const Analysis& an, const std::vector<ReferenceResult>* reference = nullptr) {
  const Notation& nt = an.ode.notation;
  auto dot = [&](unsigned p) {
    const std::string d = atom_latex(jet(1), nt);
    return p == 1 ? d : (d.back() == '}' || d.back() == '\'' ? "{" + d + "}" : d) + "^{" + std::to_string(p) + "}";
  };
  std::ostringstream os;
  os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n";

  os << "\\section*{ODE}\n\\[ " << atom_latex(jet(an.input.order), nt) << " = ";
  if (an.input.rhs_den.is_constant() && an.input.rhs_den.constant_value().is_one())
    os << to_latex(an.input.rhs_num, nt);
  else
    os << "\\frac{" << to_latex(an.input.rhs_num, nt) << "}{" << to_latex(an.input.rhs_den, nt) << "}";
  os << " \\]\n";
  if (!an.options.bindings.empty()) {
    std::vector<std::string> b;
    for (const auto& [k, v] : an.options.bindings) b.push_back(k + " = " + detail::rational_text(v));
    os << "Bindings: $" << detail::join(b, ",\\ ") << "$.\n";
  }

  os << "\\section*{Prolongation}\n\\begin{align*}\n";
  os << "\\eta^{(1)} &= " << to_latex(an.prolonged.prolongations.at(0), nt) << " \\\\\n";
  os << "\\eta^{(2)} &= " << to_latex(an.prolonged.prolongations.at(1), nt) << "\n\\end{align*}\n";

  os << "\\section*{Symmetry condition}\nMultiplied by $" << to_latex(an.condition.clearing.factor, nt) << "$.\n";
  os << "\\[ " << to_latex(an.condition.numerator, nt) << " = 0 \\]\n";

  os << "\\section*{Determining system}\n% begin determining\n\\begin{align*}\n";
  for (std::size_t i = 0; i < an.determining.equations.size(); ++i) {
    const auto& d = an.determining.equations[i];
    os << (d.xdot_power == 0 ? std::string("1") : dot(d.xdot_power)) << "\\colon\\quad & " << to_latex(d.eq, nt)
       << " = 0" << (i + 1 < an.determining.equations.size() ? " \\\\" : "") << "\n";
  }
  os << "\\end{align*}\n% end determining\n";

  os << "\\section*{Ansatz}\n\\begin{align*}\n\\xi &= " << to_latex(an.ansatz.xi(), nt) << " \\\\\n\\eta &= "
     << to_latex(an.ansatz.eta(), nt) << "\n\\end{align*}\n";
  os << "Coefficient functions are polynomials of degree " << an.options.deg_t << " in $" << nt.indep << "$ ("
     << an.linear.constants.size() << " constants).\n";

  os << "\\section*{Reduced systems}\n" << an.t_system.equations.size() << " equations after collecting in $"
     << nt.dep << "$; " << an.linear.rows.size() << " linear equations after collecting in $" << nt.indep
     << "$, rank " << an.solution.rank << ".\n";

  os << "\\section*{Elimination trace}\n\\begin{itemize}\n";
  for (const auto& s : an.solution.stages) {
    os << "\\item $" << (s.xdot_power == 0 ? std::string("1") : dot(s.xdot_power)) << "$: " << s.rows
       << " equations, dimension " << s.dim_before << " $\\to$ " << s.dim_after << ".";
    if (s.parametrized && !s.family_params.empty() && s.family_params.size() <= family_print_limit) {
      os << " Family $\\xi = " << to_latex(s.family_xi, nt) << "$, $\\eta = " << to_latex(s.family_eta, nt)
         << "$.";
      if (!s.forced_zero.empty()) os << " Forced: $" << detail::join(s.forced_zero, " = ") << " = 0$.";
    }
    os << "\n";
  }
  os << "\\end{itemize}\n";

  os << "\\section*{Basis}\nDimension " << an.dim() << ".\n";
  if (!an.solution.basis.generators.empty()) {
    os << "\\begin{align*}\n";
    const auto& gens = an.solution.basis.generators;
    for (std::size_t i = 0; i < gens.size(); ++i)
      os << "V_{" << i + 1 << "} &= \\left(" << to_latex(gens[i].xi, nt) << "\\right)\\partial_{" << nt.indep
         << "} + \\left(" << to_latex(gens[i].eta, nt) << "\\right)\\partial_{" << nt.dep << "}"
         << (i + 1 < gens.size() ? " \\\\" : "") << "\n";
    os << "\\end{align*}\n";
  }

  os << "\\section*{Genericity}\n";
  if (an.solution.basis.genericity.empty()) os << "None.\n";
  for (const auto& g : an.solution.basis.genericity) os << "$" << g.to_latex() << " \\neq 0$\\par\n";

  os << "\\section*{Side conditions}\n";
  const auto side = detail::side_conditions(an.ode);
  if (side.empty()) os << "None.\n";
  for (const auto& s : side) os << "\\verb|" << s << "|\\par\n";

  os << "\\section*{Verdict}\n" << detail::latex_escape(an.verdict()) << ".\n";

  if (reference) {
    os << "\\section*{Reference check}\n\\begin{verbatim}\n" << format_reference_results(*reference, nt)
       << "\\end{verbatim}\n";
  }
  os << "\\end{document}\n";
  return os.str();
}

inline nlohmann::ordered_json render_json(const Analysis& an, const std::vector<ReferenceResult>* reference = nullptr) {
  using nlohmann::ordered_json;
  const Notation& nt = an.ode.notation;
  auto txt = [&](const Expr& e) { return to_text(e, nt); };
  ordered_json j;
  j["schema"] = report_schema;

  ordered_json ode;
  ode["order"] = an.input.order;
  ode["indep"] = nt.indep;
  ode["dep"] = nt.dep;
  ode["params"] = an.input.params;
  ode["rhs_num"] = txt(an.input.rhs_num);
  ode["rhs_den"] = txt(an.input.rhs_den);
  ordered_json bindings = ordered_json::object();
  for (const auto& [k, v] : an.options.bindings) bindings[k] = detail::rational_text(v);
  ode["bindings"] = bindings;
  j["ode"] = ode;

  j["prolongation"] = {{"eta1", txt(an.prolonged.prolongations.at(0))},
                       {"eta2", txt(an.prolonged.prolongations.at(1))}};
  j["condition"] = {{"factor", txt(an.condition.clearing.factor)},
                    {"den_power", an.condition.clearing.den_power},
                    {"removed", txt(Expr(an.condition.clearing.removed, ParamField(1)))},
                    {"numerator", txt(an.condition.numerator)}};

  ordered_json det = ordered_json::array();
  for (const auto& d : an.determining.equations) det.push_back({{"xdot_power", d.xdot_power}, {"equation", txt(d.eq)}});
  j["determining"] = det;

  j["ansatz"] = {{"deg_x", an.options.deg_x},
                 {"deg_t", an.options.deg_t},
                 {"xi", txt(an.ansatz.xi())},
                 {"eta", txt(an.ansatz.eta())},
                 {"functions", an.linear.functions},
                 {"constants", an.linear.constants.size()}};

  ordered_json xeqs = ordered_json::array();
  for (const auto& e : an.t_system.equations)
    xeqs.push_back({{"xdot_power", e.xdot_power}, {"x_power", e.x_power}, {"equation", txt(e.eq)}});
  j["reduced"] = {{"x_equations", xeqs},
                  {"linear_equations", an.linear.rows.size()},
                  {"constants", an.linear.constants.size()},
                  {"rank", an.solution.rank}};

  ordered_json stages = ordered_json::array();
  for (const auto& s : an.solution.stages) {
    ordered_json st;
    st["xdot_power"] = s.xdot_power;
    st["equations"] = s.rows;
    st["dim_before"] = s.dim_before;
    st["dim_after"] = s.dim_after;
    if (s.parametrized && s.family_params.size() <= family_print_limit) {
      st["family_params"] = s.family_params;
      st["family_xi"] = txt(s.family_xi);
      st["family_eta"] = txt(s.family_eta);
      ordered_json rel = ordered_json::array();
      for (const auto& r : s.relations) rel.push_back(txt(r));
      st["constraints"] = rel;
      st["forced_zero"] = s.forced_zero;
    } else if (s.parametrized) {
      st["family_dim"] = s.family_params.size();
      st["forced_zero"] = s.forced_zero;
    }
    stages.push_back(st);
  }
  j["elimination"] = stages;

  ordered_json gens = ordered_json::array();
  for (const auto& g : an.solution.basis.generators) gens.push_back({{"xi", txt(g.xi)}, {"eta", txt(g.eta)}});
  j["basis"] = {{"dim", an.dim()}, {"generators", gens}};
  j["verification"] = {{"checked", an.verification.checks.size()}, {"passed", an.verification.passed()}};

  ordered_json gen = ordered_json::array();
  for (const auto& g : an.solution.basis.genericity) gen.push_back(genericity_text(g));
  j["genericity"] = gen;
  j["side_conditions"] = detail::side_conditions(an.ode);
  j["verdict"] = an.verdict();

  if (reference) {
    ordered_json refs = ordered_json::array();
    for (const auto& r : *reference) {
      ordered_json diffs = ordered_json::array();
      for (const auto& d : r.diffs)
        diffs.push_back({{"term", txt(d.monomial)}, {"computed", d.computed.to_string()}, {"printed", d.printed.to_string()}});
      ordered_json e{{"name", r.name}, {"match", r.match}, {"diffs", diffs}};
      if (!r.note.empty()) e["note"] = r.note;
      refs.push_back(e);
    }
    j["reference"] = refs;
  }
  return j;
}

}  // namespace liesym
