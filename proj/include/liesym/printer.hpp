#pragma once

// Plain-text and LaTeX rendering of Exprs. The plain-text form is accepted
// back by the parser (print-then-parse is the identity on canonical forms).

#include <cctype>
#include <sstream>
#include <string>

#include "liesym/expr.hpp"

namespace liesym {

/// Display names for the base variables of the jet space.
struct Notation {
  std::string indep = "t";
  std::string dep = "x";

  const std::string& name_of(BaseVar v) const { return v == BaseVar::T ? indep : dep; }
  /// Dots for t-derivatives in LaTeX (\dot{x}); primes otherwise.
  bool dot_derivatives() const { return indep == "t"; }
};

namespace detail {

inline std::string latex_symbol(const std::string& name) {
  static const char* greek[] = {"alpha", "beta",  "gamma", "delta", "epsilon", "zeta", "eta", "theta",
                                "iota",  "kappa", "lambda", "mu",   "nu",      "xi",   "pi",  "rho",
                                "sigma", "tau",   "phi",   "chi",   "psi",     "omega"};
  std::string base = name, index;
  while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) {
    index.insert(index.begin(), base.back());
    base.pop_back();
  }
  for (const char* g : greek)
    if (base == g) base = std::string("\\") + g;
  if (!index.empty()) return base + "_{" + index + "}";
  return base;
}

inline std::string primes(unsigned n) { return std::string(n, '\''); }

}  // namespace detail

inline std::string atom_text(const Atom& a, const Notation& nt) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndependentVar>) {
          return nt.indep;
        } else if constexpr (std::is_same_v<T, JetVar>) {
          return nt.dep + detail::primes(v.order);
        } else if constexpr (std::is_same_v<T, FnDeriv>) {
          if (v.args.size() == 1) return v.name + detail::primes(v.orders[0]);
          std::string sub;
          for (std::size_t i = 0; i < v.args.size(); ++i)
            for (unsigned k = 0; k < v.orders[i]; ++k) sub += nt.name_of(v.args[i]);
          return sub.empty() ? v.name : v.name + "_" + sub;
        } else {
          return v.name;
        }
      },
      a);
}

inline std::string atom_latex(const Atom& a, const Notation& nt) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndependentVar>) {
          return nt.indep;
        } else if constexpr (std::is_same_v<T, JetVar>) {
          if (v.order == 0) return nt.dep;
          if (nt.dot_derivatives() && v.order <= 2)
            return std::string(v.order == 1 ? "\\dot{" : "\\ddot{") + nt.dep + "}";
          if (v.order <= 3) return nt.dep + detail::primes(v.order);
          return nt.dep + "^{(" + std::to_string(v.order) + ")}";
        } else if constexpr (std::is_same_v<T, FnDeriv>) {
          const std::string base = detail::latex_symbol(v.name);
          if (v.args.size() == 1) return base + detail::primes(v.orders[0]);
          std::string sub;
          for (std::size_t i = 0; i < v.args.size(); ++i)
            for (unsigned k = 0; k < v.orders[i]; ++k) sub += nt.name_of(v.args[i]);
          return sub.empty() ? base : base + "_{" + sub + "}";
        } else {
          return detail::latex_symbol(v.name);
        }
      },
      a);
}

namespace detail {

/// Atom text that survives a following '^': primed atoms need no parens since
/// the parser binds ticks before powers.
inline std::string monomial_text(const Monomial& m, const Notation& nt) {
  std::string out;
  for (const auto& [a, e] : m.factors()) {
    if (!out.empty()) out += "*";
    out += atom_text(a, nt);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out;
}

inline std::string monomial_latex(const Monomial& m, const Notation& nt) {
  std::string out;
  for (const auto& [a, e] : m.factors()) {
    if (!out.empty()) out += " ";
    std::string s = atom_latex(a, nt);
    if (e > 1) {
      if (s.back() == '\'' || s.back() == '}') s = "{" + s + "}";
      s += "^{" + std::to_string(e) + "}";
    }
    out += s;
  }
  return out;
}

/// Splits a coefficient into sign and magnitude text suitable as a product prefix.
inline std::pair<bool, std::string> coefficient_text(const ParamField& c, bool has_monomial) {
  const bool negative = c.leading_negative();
  const ParamField mag = negative ? -c : c;
  if (has_monomial && mag.is_one()) return {negative, ""};
  std::string s = mag.to_string();
  if (mag.den().is_one() && mag.num().terms().size() > 1) s = "(" + s + ")";
  return {negative, has_monomial ? s + "*" : s};
}

inline std::pair<bool, std::string> coefficient_latex(const ParamField& c, bool has_monomial) {
  const bool negative = c.leading_negative();
  const ParamField mag = negative ? -c : c;
  if (has_monomial && mag.is_one()) return {negative, ""};
  std::string s;
  if (mag.den().is_one()) {
    s = mag.num().to_latex();
    if (mag.num().terms().size() > 1) s = "\\left(" + s + "\\right)";
  } else {
    s = mag.to_latex();
  }
  return {negative, has_monomial ? s + " " : s};
}

}  // namespace detail

inline std::string to_text(const Expr& e, const Notation& nt = {}) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    auto [negative, coeff] = detail::coefficient_text(c, !m.empty());
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    os << coeff << detail::monomial_text(m, nt);
  }
  return os.str();
}

inline std::string to_latex(const Expr& e, const Notation& nt = {}) {
  if (e.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    auto [negative, coeff] = detail::coefficient_latex(c, !m.empty());
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    os << coeff << detail::monomial_latex(m, nt);
  }
  return os.str();
}

/// Signed LaTeX strings of the individual terms, in canonical order.
inline std::vector<std::string> latex_terms(const Expr& e, const Notation& nt = {}) {
  std::vector<std::string> out;
  for (const auto& [m, c] : e.terms()) {
    auto [negative, coeff] = detail::coefficient_latex(c, !m.empty());
    out.push_back((negative ? "-" : "+") + coeff + detail::monomial_latex(m, nt));
  }
  return out;
}

}  // namespace liesym
