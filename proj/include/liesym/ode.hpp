#pragma once

// Scalar ODE x^(n) = rhs_num / rhs_den and its plain-text key/value file format:
//
//   # comment
//   order=2
//   params=a,b
//   indep=t            (optional, default t)
//   dep=x              (optional, default x)
//   rhs_num=t^3 - a^2*t - x - x'^2*x - b*x'*x
//   rhs_den=x^2
//
// Instead of rhs_num/rhs_den a file may give `equation=LHS = RHS`, which must be
// linear in the highest derivative.

#include <sstream>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/parser.hpp"
#include "liesym/printer.hpp"

namespace liesym {

struct OdeSpec {
  unsigned order = 2;
  Expr rhs_num;
  Expr rhs_den = Expr(1);
  std::vector<std::string> params;
  Notation notation;

  ParseContext parse_context() const {
    ParseContext ctx;
    ctx.notation = notation;
    ctx.params.insert(params.begin(), params.end());
    return ctx;
  }

  /// rhs_den != 0, right-hand side free of x^(order) and higher, point variables only.
  void validate() const {
    if (order < 1) throw InputError("ODE order must be at least 1");
    if (rhs_den.is_zero()) throw InputError("rhs_den must be nonzero");
    for (const Expr* e : {&rhs_num, &rhs_den}) {
      if (auto k = e->max_jet_order(); k && *k >= order)
        throw InputError("right-hand side contains a derivative of order >= " + std::to_string(order));
      if (e->any_atom([](const Atom& a) { return !is_jet_or_indep(a); }))
        throw InputError("right-hand side may only contain t, x and its derivatives");
      for (const auto& p : e->parameters())
        if (std::find(params.begin(), params.end(), p) == params.end())
          throw InputError("undeclared parameter '" + p + "'");
    }
  }

  /// den * x^(order) - num.
  Expr cleared_lhs() const { return rhs_den * Expr(jet(order)) - rhs_num; }
};

/// Solves `e = 0` for the highest derivative x^(order). Requires linearity in it.
inline OdeSpec ode_from_equation(const Expr& e, unsigned order, std::vector<std::string> params,
                                 Notation notation) {
  const Atom top = jet(order);
  if (e.degree_in(top) != 1) throw InputError("equation must be linear in the highest derivative");
  if (auto k = e.max_jet_order(); k && *k > order) throw InputError("equation has derivatives above the declared order");
  Expr coeff, rest;
  for (const auto& [p, c] : collect(e, top)) (p == 1 ? coeff : rest) = c;
  OdeSpec spec;
  spec.order = order;
  spec.rhs_num = -rest;
  spec.rhs_den = coeff;
  if (coeff.terms().begin()->second.leading_negative()) {
    spec.rhs_num = -spec.rhs_num;
    spec.rhs_den = -spec.rhs_den;
  }
  spec.params = std::move(params);
  spec.notation = std::move(notation);
  spec.validate();
  return spec;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

}  // namespace detail

/// Parses the key/value ODE format. Errors name `source` and the line.
inline OdeSpec read_ode_spec(const std::string& text, const std::string& source = "<input>") {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> kv;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(source + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    static const std::set<std::string> known{"order", "params", "indep", "dep", "rhs_num", "rhs_den", "equation"};
    if (!known.count(key))
      throw InputError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (kv.count(key)) throw InputError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv[key] = {detail::trim(line.substr(eq + 1)), line_no};
  }
  auto where = [&](const std::string& key) {
    return source + ":" + (kv.count(key) ? std::to_string(kv[key].line) : std::string("?")) + ": ";
  };

  unsigned order = 2;
  if (kv.count("order")) {
    try {
      order = static_cast<unsigned>(std::stoul(kv["order"].value));
    } catch (const std::exception&) {
      throw InputError(where("order") + "order must be a positive integer");
    }
  }
  std::vector<std::string> params;
  if (kv.count("params")) params = detail::split_list(kv["params"].value);
  Notation nt;
  if (kv.count("indep")) nt.indep = kv["indep"].value;
  if (kv.count("dep")) nt.dep = kv["dep"].value;
  if (nt.indep.empty() || nt.dep.empty() || nt.indep == nt.dep)
    throw InputError(source + ": independent and dependent variable names must be distinct and nonempty");

  ParseContext ctx;
  ctx.notation = nt;
  ctx.params.insert(params.begin(), params.end());
  auto parse_at = [&](const std::string& key, const std::string& text_value) {
    try {
      return parse_expr(text_value, ctx);
    } catch (const InputError& e) {
      throw InputError(where(key) + e.what());
    }
  };

  try {
    if (kv.count("equation")) {
      if (kv.count("rhs_num") || kv.count("rhs_den"))
        throw InputError(where("equation") + "give either equation or rhs_num/rhs_den, not both");
      const std::string& v = kv["equation"].value;
      const auto eq = v.find('=');
      Expr e = eq == std::string::npos ? parse_at("equation", v)
                                       : parse_at("equation", v.substr(0, eq)) - parse_at("equation", v.substr(eq + 1));
      return ode_from_equation(e, order, params, nt);
    }
    if (!kv.count("rhs_num")) throw InputError(source + ": missing rhs_num (or equation)");
    OdeSpec spec;
    spec.order = order;
    spec.params = params;
    spec.notation = nt;
    spec.rhs_num = parse_at("rhs_num", kv["rhs_num"].value);
    if (kv.count("rhs_den")) spec.rhs_den = parse_at("rhs_den", kv["rhs_den"].value);
    spec.validate();
    return spec;
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(source, 0) == 0) throw;
    throw InputError(source + ": " + msg);
  }
}

inline std::string write_ode_spec(const OdeSpec& spec, const std::vector<std::string>& comments = {}) {
  std::ostringstream os;
  for (const auto& c : comments) os << "# " << c << "\n";
  os << "order=" << spec.order << "\n";
  os << "params=";
  for (std::size_t i = 0; i < spec.params.size(); ++i) os << (i ? "," : "") << spec.params[i];
  os << "\n";
  os << "indep=" << spec.notation.indep << "\n";
  os << "dep=" << spec.notation.dep << "\n";
  os << "rhs_num=" << to_text(spec.rhs_num, spec.notation) << "\n";
  os << "rhs_den=" << to_text(spec.rhs_den, spec.notation) << "\n";
  return os.str();
}

/// Substitutes rational parameter values; bound parameters leave the declaration list.
inline OdeSpec specialize_params(const OdeSpec& spec, const std::map<std::string, Rational>& values) {
  for (const auto& [name, v] : values)
    if (std::find(spec.params.begin(), spec.params.end(), name) == spec.params.end())
      throw InputError("cannot bind undeclared parameter '" + name + "'");
  OdeSpec out = spec;
  out.rhs_num = specialize(spec.rhs_num, values);
  out.rhs_den = specialize(spec.rhs_den, values);
  if (out.rhs_den.is_zero()) throw GenericityViolation("assignment makes the right-hand side denominator vanish");
  out.params.clear();
  for (const auto& p : spec.params)
    if (!values.count(p)) out.params.push_back(p);
  return out;
}

}  // namespace liesym
