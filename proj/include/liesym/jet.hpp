#pragma once

// Differentiation on the jet space: partial derivatives (unknown-function
// atoms bump their derivative multi-index) and the total derivative D_t.

#include <string>

#include "liesym/expr.hpp"

namespace liesym {

struct JetContext {
  unsigned max_order = 2;  ///< highest x^(k) allowed in results
};

namespace detail {

/// The argument slot a differentiation variable feeds, if any.
inline std::optional<BaseVar> base_var_of(const Atom& v) {
  if (std::holds_alternative<IndependentVar>(v)) return BaseVar::T;
  if (const auto* j = std::get_if<JetVar>(&v); j && j->order == 0) return BaseVar::X;
  return std::nullopt;
}

/// d(atom)/d(v) as an expression: 1, 0, or a bumped unknown-function atom.
inline Expr atom_partial(const Atom& a, const Atom& v, std::optional<BaseVar> slot) {
  if (a == v) return Expr(1);
  if (const auto* f = std::get_if<FnDeriv>(&a); f && slot) {
    FnDeriv bumped = *f;
    bool found = false;
    for (std::size_t i = 0; i < bumped.args.size(); ++i)
      if (bumped.args[i] == *slot) {
        ++bumped.orders[i];
        found = true;
        break;
      }
    if (found) return Expr(Atom(std::move(bumped)));
  }
  return Expr();
}

}  // namespace detail

/// Partial derivative by t or a jet variable x^(k). Unknown functions of (t, x)
/// depend on t and x only; parameters and ansatz constants are constants.
inline Expr partial(const Expr& e, const Atom& v) {
  if (!is_jet_or_indep(v))
    throw std::invalid_argument("partial: differentiation variable must be t or a jet variable");
  const auto slot = detail::base_var_of(v);
  Expr out;
  for (const auto& [m, c] : e.terms()) {
    const auto& fs = m.factors();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& [a, p] = fs[i];
      Expr da = detail::atom_partial(a, v, slot);
      if (da.is_zero()) continue;
      Monomial rest;
      for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != i) rest = rest * Monomial(fs[j].first, fs[j].second);
      if (p > 1) rest = rest * Monomial(a, p - 1);
      const ParamField k = c * ParamField(static_cast<int>(p));
      for (const auto& [dm, dc] : da.terms()) out.add_term(dm * rest, dc * k);
    }
  }
  return out;
}

/// Partial derivative by a named variable; parameters are rejected as a likely
/// user error.
inline Expr partial(const Expr& e, const std::string& name, const std::string& indep_name = "t",
                    const std::string& dep_name = "x") {
  if (name == indep_name) return partial(e, indep());
  if (name.rfind(dep_name, 0) == 0 && name.find_first_not_of('\'', dep_name.size()) == std::string::npos)
    return partial(e, jet(static_cast<unsigned>(name.size() - dep_name.size())));
  if (e.parameters().count(name))
    throw std::invalid_argument("partial: '" + name + "' is a parameter, not a variable");
  throw std::invalid_argument("partial: unknown differentiation variable '" + name + "'");
}

/// D_t e = d_t e + sum_k x^(k+1) d e / d x^(k).
inline Expr total_derivative(const Expr& e, const JetContext& ctx) {
  const auto top = e.max_jet_order();
  const unsigned highest = top.value_or(0);
  if (top && highest + 1 > ctx.max_order)
    throw OrderOverflow("total derivative would introduce x^(" + std::to_string(highest + 1) +
                        ") beyond max order " + std::to_string(ctx.max_order));
  Expr out = partial(e, indep());
  if (!top && !e.any_atom([](const Atom& a) { return std::holds_alternative<FnDeriv>(a); })) return out;
  // Unknown functions depend on x, so d/dx is needed even without explicit jet atoms.
  for (unsigned k = 0; k <= highest; ++k) {
    Expr dk = partial(e, jet(k));
    if (dk.is_zero()) continue;
    if (k + 1 > ctx.max_order)
      throw OrderOverflow("total derivative would exceed max order " + std::to_string(ctx.max_order));
    out += dk * Expr(jet(k + 1));
  }
  return out;
}

}  // namespace liesym
