#pragma once

// End-to-end symmetry analysis of a second-order ODE within the polynomial
// ansatz class.

#include <map>
#include <string>

#include "liesym/det_solver.hpp"
#include "liesym/lie.hpp"
#include "liesym/ode.hpp"

namespace liesym {

struct AnalysisOptions {
  unsigned deg_x = 4;
  unsigned deg_t = 6;
  std::map<std::string, Rational> bindings;  ///< applied to the ODE before deriving anything
};

struct Analysis {
  OdeSpec input;
  OdeSpec ode;  ///< input with bindings applied
  AnalysisOptions options;
  Generator prolonged;
  ClearedCondition condition;
  DeterminingSystem determining;
  XAnsatz ansatz;
  TOdeSystem t_system;
  LinearSystem linear;
  Elimination solution;
  BasisVerification verification;

  std::size_t dim() const { return solution.basis.dim; }

  std::string verdict() const {
    const std::string cls =
        "(deg_x=" + std::to_string(options.deg_x) + ", deg_t=" + std::to_string(options.deg_t) + ")";
    if (solution.inconsistency) return "no symmetry in ansatz class " + cls + ": inconsistent constant row";
    std::string v = "symmetry space dimension " + std::to_string(dim()) + " within ansatz (" +
                    std::to_string(options.deg_x) + "," + std::to_string(options.deg_t) + ")";
    if (dim() == 0) v += "; no symmetry within polynomial ansatz class " + cls;
    return v;
  }
};

inline std::set<std::string> reserved_names(const OdeSpec& ode) {
  std::set<std::string> out(ode.params.begin(), ode.params.end());
  out.insert(ode.notation.indep);
  out.insert(ode.notation.dep);
  out.insert("xi");
  out.insert("eta");
  return out;
}

inline Analysis analyze(const OdeSpec& spec, const AnalysisOptions& opts = {}) {
  Analysis a;
  a.input = spec;
  a.options = opts;
  a.ode = opts.bindings.empty() ? spec : specialize_params(spec, opts.bindings);
  a.ode.validate();
  a.prolonged = prolong(Generator::symbolic(), 2);
  a.condition = symmetry_condition(a.ode, a.prolonged);
  a.determining = split_determining(a.condition, a.ode);
  a.ansatz = XAnsatz::make(opts.deg_x, opts.deg_x, reserved_names(a.ode));
  a.t_system = x_reduce(a.determining, a.ansatz);
  a.linear = t_reduce(a.t_system, opts.deg_t);
  a.solution = eliminate(a.linear);
  a.verification = verify_basis(a.solution.basis, a.ode);
  if (!a.verification.passed()) throw InvariantViolation("solver returned a generator that fails the symmetry condition");
  return a;
}

}  // namespace liesym
