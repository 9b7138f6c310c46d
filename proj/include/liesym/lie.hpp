#pragma once

// Prolonged point generators, the linearized symmetry condition for
// second-order equations, its splitting into determining equations, and the
// order reduction z(y) = y' of autonomous third-order equations.

#include <sstream>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/jet.hpp"
#include "liesym/ode.hpp"
#include "liesym/printer.hpp"

namespace liesym {

/// V = xi(t, x) d/dt + eta(t, x) d/dx together with eta^(1), eta^(2), ...
struct Generator {
  Expr xi;
  Expr eta;
  std::vector<Expr> prolongations;  ///< prolongations[k-1] = eta^(k)

  static Generator symbolic() {
    return {Expr(Atom(unknown_fn("xi", {BaseVar::T, BaseVar::X}))),
            Expr(Atom(unknown_fn("eta", {BaseVar::T, BaseVar::X}))),
            {}};
  }

  /// Concrete generator; throws unless xi, eta depend on t, x and constants only.
  static Generator concrete(Expr xi, Expr eta) {
    Generator g{std::move(xi), std::move(eta), {}};
    g.check_point();
    if (g.has_unknowns()) throw InputError("concrete generator must not contain unknown functions");
    return g;
  }

  bool has_unknowns() const {
    auto unknown = [](const Atom& a) { return std::holds_alternative<FnDeriv>(a); };
    return xi.any_atom(unknown) || eta.any_atom(unknown);
  }

  void check_point() const {
    for (const Expr* e : {&xi, &eta})
      if (auto k = e->max_jet_order(); k && *k >= 1)
        throw InputError("point generator may not depend on derivatives of x");
  }
};

/// eta^(k) = D_t eta^(k-1) - x^(k) D_t xi, populated up to order k.
inline Generator prolong(Generator g, unsigned k, const JetContext& ctx = {}) {
  g.check_point();
  if (k == 0) throw std::invalid_argument("prolong: order must be at least 1");
  JetContext local = ctx;
  local.max_order = std::max(ctx.max_order, k);
  const Expr dxi = total_derivative(g.xi, local);
  g.prolongations.clear();
  Expr prev = g.eta;
  for (unsigned j = 1; j <= k; ++j) {
    Expr next = total_derivative(prev, local) - Expr(jet(j)) * dxi;
    g.prolongations.push_back(next);
    prev = std::move(next);
  }
  return g;
}

/// Multiplier turning V^(2)(x'' - N/D) into a polynomial: D^den_power divided by
/// the monomial every cleared symbolic condition shares with D^den_power.
struct ClearingPlan {
  unsigned den_power = 2;
  Monomial removed;
  Expr factor = Expr(1);
};

struct ClearedCondition {
  Expr numerator;  ///< factor * V^(2)(x'' - f) on x'' = f
  ClearingPlan clearing;
};

namespace detail {

inline void require_second_order(const OdeSpec& ode) {
  if (ode.order != 2) throw InputError("symmetry analysis supports second-order equations only");
}

/// D^2 * V^(2)(x'' - N/D) restricted to x'' = N/D.
inline Expr raw_condition(const OdeSpec& ode, const Generator& prolonged) {
  const Expr& num = ode.rhs_num;
  const Expr& den = ode.rhs_den;
  const Expr& eta1 = prolonged.prolongations.at(0);
  const Expr& eta2 = prolonged.prolongations.at(1);
  auto apply = [&](const Expr& e) {  // xi d_t + eta d_x + eta^(1) d_x'
    return prolonged.xi * partial(e, indep()) + prolonged.eta * partial(e, jet(0)) + eta1 * partial(e, jet(1));
  };
  Expr a, b;
  for (const auto& [p, c] : collect(eta2, jet(2))) (p == 1 ? b : a) = c;
  if (eta2.degree_in(jet(2)) > 1) throw InvariantViolation("second prolongation not linear in x''");
  return den * (den * a + b * num) - den * apply(num) + num * apply(den);
}

}  // namespace detail

inline ClearingPlan clearing_plan(const OdeSpec& ode) {
  detail::require_second_order(ode);
  const Expr symbolic = detail::raw_condition(ode, prolong(Generator::symbolic(), 2));
  ClearingPlan plan;
  plan.den_power = 2;
  const Expr den_power = ode.rhs_den.pow(plan.den_power);
  plan.removed = Monomial::gcd(monomial_content(symbolic, is_jet_or_indep), monomial_content(den_power, is_jet_or_indep));
  plan.factor = divide_by_monomial(den_power, plan.removed);
  return plan;
}

inline ClearedCondition symmetry_condition(const OdeSpec& ode, const Generator& g, const ClearingPlan& plan) {
  detail::require_second_order(ode);
  const Generator prolonged = g.prolongations.size() >= 2 ? g : prolong(g, 2);
  return {divide_by_monomial(detail::raw_condition(ode, prolonged), plan.removed), plan};
}

inline ClearedCondition symmetry_condition(const OdeSpec& ode, const Generator& g) {
  return symmetry_condition(ode, g, clearing_plan(ode));
}

struct DetEquation {
  unsigned xdot_power = 0;
  Expr eq;
};

/// Coefficients of the cleared condition by powers of x'.
struct DeterminingSystem {
  std::vector<DetEquation> equations;  ///< ascending x' power, zero coefficients omitted
  ClearingPlan clearing;
  Expr denominator = Expr(1);  ///< D; clearing assumes D != 0
};

namespace detail {

inline unsigned unknown_degree(const Monomial& m) {
  unsigned d = 0;
  for (const auto& [a, p] : m.factors())
    if (std::holds_alternative<FnDeriv>(a)) d += p;
  return d;
}

inline void check_linear_in_unknowns(const Expr& e, const char* where) {
  for (const auto& [m, c] : e.terms())
    if (unknown_degree(m) > 1) throw InvariantViolation(std::string(where) + ": equation not linear in unknowns");
}

}  // namespace detail

inline DeterminingSystem split_determining(const ClearedCondition& cond, const OdeSpec& ode) {
  if (cond.numerator.contains(jet(2))) throw InvariantViolation("split_determining: condition still contains x''");
  DeterminingSystem sys;
  sys.clearing = cond.clearing;
  sys.denominator = ode.rhs_den;
  for (auto& [p, coeff] : collect(cond.numerator, jet(1))) {
    detail::check_linear_in_unknowns(coeff, "split_determining");
    if (coeff.max_jet_order().value_or(0) > 0) throw InvariantViolation("determining equation contains derivatives");
    sys.equations.push_back({p, std::move(coeff)});
  }
  return sys;
}

/// Sum of eq * x'^p; equals the cleared condition.
inline Expr reassemble(const DeterminingSystem& sys) {
  Expr out;
  for (const auto& d : sys.equations) out += d.eq * Expr(jet(1), d.xdot_power);
  return out;
}

inline DeterminingSystem specialize_params(const DeterminingSystem& sys, const std::map<std::string, Rational>& values) {
  DeterminingSystem out = sys;
  out.equations.clear();
  for (const auto& d : sys.equations) {
    Expr e = specialize(d.eq, values);
    if (!e.is_zero()) out.equations.push_back({d.xdot_power, std::move(e)});
  }
  out.clearing.factor = specialize(sys.clearing.factor, values);
  out.denominator = specialize(sys.denominator, values);
  if (out.denominator.is_zero()) throw GenericityViolation("assignment makes the equation denominator vanish");
  return out;
}

/// Third-order equation lhs(y, y', y'', y''') = 0 without explicit t, normalized
/// so that the coefficient of y''' is 1. Stored in jet atoms: y -> x, y' -> x', ...
struct AutonomousOde3 {
  Expr lhs;
  std::vector<std::string> params;
  Notation notation;

  static AutonomousOde3 from_lhs(const Expr& lhs, std::vector<std::string> params, Notation nt) {
    std::vector<std::string> offending;
    for (const auto& [m, c] : lhs.terms())
      if (m.exponent_of(indep()) > 0) offending.push_back(to_text(Expr(m, c), nt));
    if (!offending.empty()) {
      std::string msg = "equation is not autonomous: explicit " + nt.indep + " in term";
      msg += offending.size() > 1 ? "s" : "";
      for (std::size_t i = 0; i < offending.size(); ++i) msg += (i ? ", '" : " '") + offending[i] + "'";
      throw NonAutonomous(msg);
    }
    if (auto k = lhs.max_jet_order(); !k || *k != 3)
      throw InputError("autonomous reduction expects a third-order equation");
    if (lhs.any_atom([](const Atom& a) { return !is_jet_or_indep(a); }))
      throw InputError("equation may only contain the dependent variable and its derivatives");
    if (lhs.degree_in(jet(3)) != 1) throw InputError("equation must be linear in the third derivative");
    Expr lead;
    for (const auto& [p, c] : collect(lhs, jet(3)))
      if (p == 1) lead = c;
    if (!lead.is_constant()) throw InputError("coefficient of the third derivative must be a nonzero constant");
    return {lhs.scaled(lead.constant_value().inverse()), std::move(params), std::move(nt)};
  }

  static AutonomousOde3 from_spec(const OdeSpec& spec) {
    if (spec.order != 3) throw InputError("autonomous reduction expects order=3");
    return from_lhs(spec.cleared_lhs(), spec.params, spec.notation);
  }
};

struct AutonomousReduction {
  Expr lhs;                 ///< chain-rule image in (y, z, z', z'') before stripping powers of z
  unsigned stripped_power;  ///< z^k divided out of every term (valid on z != 0)
  OdeSpec spec;             ///< second-order equation for z(y)
};

/// y' = z, y'' = z z', y''' = z (z'^2 + z z''), with y the new independent variable.
inline AutonomousReduction reduce_autonomous(const AutonomousOde3& ode3, std::string new_dep = "z") {
  if (new_dep == ode3.notation.dep ||
      std::find(ode3.params.begin(), ode3.params.end(), new_dep) != ode3.params.end())
    throw InputError("name '" + new_dep + "' is already in use");
  const Expr z(jet(0)), dz(jet(1)), ddz(jet(2));
  const std::map<Atom, Expr> chain{
      {jet(0), Expr(indep())},
      {jet(1), z},
      {jet(2), z * dz},
      {jet(3), z * dz.pow(2) + z.pow(2) * ddz},
  };
  AutonomousReduction out;
  out.lhs = substitute_all(ode3.lhs, chain);
  const Monomial zpow = monomial_content(out.lhs, [](const Atom& a) { return a == jet(0); });
  out.stripped_power = zpow.degree();
  const Expr reduced = divide_by_monomial(out.lhs, zpow);
  Notation nt{ode3.notation.dep, std::move(new_dep)};
  out.spec = ode_from_equation(reduced, 2, ode3.params, nt);
  return out;
}

}  // namespace liesym
