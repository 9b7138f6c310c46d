#pragma once

// Two-stage ansatz solution of the determining system:
//   xi = sum_i f_i(t) x^i, eta = sum_j g_j(t) x^j   (x_reduce, collect in x)
//   f_i(t) = sum_m k_. t^m, ...                      (t_reduce, collect in t)
// followed by exact elimination over the parameter field.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/jet.hpp"
#include "liesym/lie.hpp"
#include "liesym/linear.hpp"

namespace liesym {

/// Replaces every xi/eta derivative atom in `e` by the matching partial
/// derivative of the given expressions.
inline Expr substitute_generator(const Expr& e, const Expr& xi, const Expr& eta) {
  std::map<Atom, Expr> repl;
  for (const Atom& a : e.atoms()) {
    const auto* f = std::get_if<FnDeriv>(&a);
    if (!f || (f->name != "xi" && f->name != "eta")) continue;
    if (f->args != std::vector<BaseVar>{BaseVar::T, BaseVar::X})
      throw InvariantViolation("generator unknown '" + f->name + "' has an unexpected signature");
    Expr d = f->name == "xi" ? xi : eta;
    for (unsigned i = 0; i < f->orders[0]; ++i) d = partial(d, indep());
    for (unsigned i = 0; i < f->orders[1]; ++i) d = partial(d, jet(0));
    repl.emplace(a, std::move(d));
  }
  return substitute_all(e, repl);
}

struct XAnsatz {
  unsigned deg_xi_x = 4;
  unsigned deg_eta_x = 4;
  std::string xi_prefix = "f";
  std::string eta_prefix = "g";

  /// Picks coefficient-function prefixes that clash with none of `taken`.
  static XAnsatz make(unsigned deg_xi_x, unsigned deg_eta_x, const std::set<std::string>& taken = {}) {
    for (unsigned n = 0;; ++n) {
      const std::string suffix = n ? std::to_string(n) + "_" : "";
      XAnsatz a{deg_xi_x, deg_eta_x, "f" + suffix, "g" + suffix};
      bool clash = false;
      for (const auto& name : a.functions()) clash = clash || taken.count(name);
      if (!clash) return a;
    }
  }

  std::string xi_name(unsigned i) const { return xi_prefix + std::to_string(i); }
  std::string eta_name(unsigned j) const { return eta_prefix + std::to_string(j); }

  /// f_0..f_d then g_0..g_e.
  std::vector<std::string> functions() const {
    std::vector<std::string> out;
    for (unsigned i = 0; i <= deg_xi_x; ++i) out.push_back(xi_name(i));
    for (unsigned j = 0; j <= deg_eta_x; ++j) out.push_back(eta_name(j));
    return out;
  }

  static Expr fn(const std::string& name, unsigned t_order = 0) {
    FnDeriv d = unknown_fn(name, {BaseVar::T});
    d.orders[0] = t_order;
    return Expr(Atom(std::move(d)));
  }

  Expr xi() const {
    Expr out;
    for (unsigned i = 0; i <= deg_xi_x; ++i) out += fn(xi_name(i)) * Expr(jet(0), i);
    return out;
  }
  Expr eta() const {
    Expr out;
    for (unsigned j = 0; j <= deg_eta_x; ++j) out += fn(eta_name(j)) * Expr(jet(0), j);
    return out;
  }
};

struct TEquation {
  std::size_t source = 0;  ///< index into DeterminingSystem::equations
  unsigned xdot_power = 0;
  unsigned x_power = 0;
  Expr eq;
};

/// Linear equations in unknown functions of t.
struct TOdeSystem {
  std::vector<std::string> functions;  ///< numbering order for t_reduce
  std::vector<TEquation> equations;
  std::optional<XAnsatz> ansatz;
};

namespace detail {

inline bool is_t_function(const Atom& a) {
  const auto* f = std::get_if<FnDeriv>(&a);
  return f && f->args == std::vector<BaseVar>{BaseVar::T};
}

}  // namespace detail

inline TOdeSystem x_reduce(const DeterminingSystem& det, const XAnsatz& ansatz) {
  TOdeSystem out;
  out.functions = ansatz.functions();
  out.ansatz = ansatz;
  const Expr xi = ansatz.xi(), eta = ansatz.eta();
  for (std::size_t k = 0; k < det.equations.size(); ++k) {
    const auto& d = det.equations[k];
    const Expr e = substitute_generator(d.eq, xi, eta);
    if (e.any_atom([](const Atom& a) { return std::holds_alternative<FnDeriv>(a) && !detail::is_t_function(a); }))
      throw InvariantViolation("x_reduce: unknown function left after substitution");
    if (e.max_jet_order().value_or(0) > 0) throw InvariantViolation("x_reduce: equation depends on derivatives of x");
    for (auto& [p, c] : collect(e, jet(0))) {
      detail::check_linear_in_unknowns(c, "x_reduce");
      out.equations.push_back({k, d.xdot_power, p, std::move(c)});
    }
  }
  return out;
}

/// Sum of eq * x^p over the equations that came from `source`.
inline Expr reassemble_source(const TOdeSystem& sys, std::size_t source) {
  Expr out;
  for (const auto& e : sys.equations)
    if (e.source == source) out += e.eq * Expr(jet(0), e.x_power);
  return out;
}

struct ConstantInfo {
  AnsatzConst constant;
  std::string function;
  unsigned t_power = 0;
};

struct RowOrigin {
  std::size_t equation = 0;  ///< index into TOdeSystem::equations
  unsigned xdot_power = 0;
  unsigned x_power = 0;
  unsigned t_power = 0;
};

/// entries . k = rhs
struct LinearRow {
  SparseRow entries;
  ParamField rhs;
  RowOrigin origin;
};

struct LinearSystem {
  unsigned deg_t = 0;
  std::vector<std::string> functions;
  std::vector<ConstantInfo> constants;  ///< constants[i].constant.index == i + 1
  std::vector<LinearRow> rows;
  std::optional<XAnsatz> ansatz;

  Expr constant_expr(unsigned column) const { return Expr(Atom(constants.at(column).constant)); }

  /// entries . k - rhs as an expression in the constants.
  Expr row_expr(const LinearRow& r) const {
    Expr out(-r.rhs);
    for (const auto& [c, v] : r.entries) out += constant_expr(c).scaled(v);
    return out;
  }

  /// f(t) -> sum_m k_{f,m} t^m, differentiated `order` times.
  Expr t_polynomial(const std::string& function, unsigned order) const {
    const auto it = std::find(functions.begin(), functions.end(), function);
    if (it == functions.end()) throw InvariantViolation("unknown coefficient function '" + function + "'");
    const unsigned base = static_cast<unsigned>(it - functions.begin()) * (deg_t + 1);
    Expr out;
    for (unsigned m = order; m <= deg_t; ++m) {
      Integer falling = 1;
      for (unsigned i = 0; i < order; ++i) falling *= m - i;
      out += constant_expr(base + m).scaled(ParamField(falling)) * Expr(indep(), m - order);
    }
    return out;
  }

  Expr substitute_functions(const Expr& e) const {
    std::map<Atom, Expr> repl;
    for (const Atom& a : e.atoms())
      if (detail::is_t_function(a)) {
        const auto& f = std::get<FnDeriv>(a);
        repl.emplace(a, t_polynomial(f.name, f.orders[0]));
      }
    return substitute_all(e, repl);
  }
};

inline LinearSystem t_reduce(const TOdeSystem& tsys, unsigned deg_t) {
  LinearSystem out;
  out.deg_t = deg_t;
  out.ansatz = tsys.ansatz;
  out.functions = tsys.functions;
  std::set<std::string> extra;
  for (const auto& e : tsys.equations)
    for (const Atom& a : e.eq.atoms()) {
      if (std::holds_alternative<FnDeriv>(a) && !detail::is_t_function(a))
        throw InvariantViolation("t_reduce: unknown function of more than t");
      if (detail::is_t_function(a)) {
        const auto& name = std::get<FnDeriv>(a).name;
        if (std::find(out.functions.begin(), out.functions.end(), name) == out.functions.end()) extra.insert(name);
      }
    }
  out.functions.insert(out.functions.end(), extra.begin(), extra.end());
  for (const auto& f : out.functions)
    for (unsigned m = 0; m <= deg_t; ++m) {
      const auto index = static_cast<unsigned>(out.constants.size() + 1);
      out.constants.push_back({AnsatzConst{index, "k" + std::to_string(index)}, f, m});
    }

  for (std::size_t i = 0; i < tsys.equations.size(); ++i) {
    const auto& te = tsys.equations[i];
    if (te.eq.any_atom([](const Atom& a) { return std::holds_alternative<JetVar>(a); }))
      throw InvariantViolation("t_reduce: equation still depends on x");
    const Expr e = out.substitute_functions(te.eq);
    for (const auto& [p, c] : collect(e, indep())) {
      LinearRow row{{}, {}, {i, te.xdot_power, te.x_power, p}};
      for (const auto& [m, v] : c.terms()) {
        if (m.empty()) {
          row.rhs = -v;
          continue;
        }
        const auto& fs = m.factors();
        if (fs.size() != 1 || fs[0].second != 1 || !std::holds_alternative<AnsatzConst>(fs[0].first))
          throw InvariantViolation("t_reduce: equation not linear in the ansatz constants");
        row.entries.emplace(std::get<AnsatzConst>(fs[0].first).index - 1, v);
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

/// Sum of row_expr * t^p over the rows that came from TOdeSystem equation `equation`.
inline Expr reassemble_equation(const LinearSystem& sys, std::size_t equation) {
  Expr out;
  for (const auto& r : sys.rows)
    if (r.origin.equation == equation) out += sys.row_expr(r) * Expr(indep(), r.origin.t_power);
  return out;
}

struct SymmetryBasis {
  std::size_t dim = 0;
  std::vector<Generator> generators;           ///< empty when the system carries no x-ansatz
  std::vector<std::vector<ParamField>> vectors;  ///< null-space vectors over the constants
  std::vector<ParamPoly> genericity;            ///< each assumed nonzero
};

/// One group of rows sharing an x' power, processed against the family left by
/// the earlier groups.
struct StageRecord {
  unsigned xdot_power = 0;
  std::size_t rows = 0;
  std::size_t dim_before = 0;
  std::size_t dim_after = 0;
  bool parametrized = false;  ///< family written with c1..cK (false for the first stage)
  std::vector<std::string> family_params;
  Expr family_xi, family_eta;
  std::vector<Expr> relations;  ///< reduced stage constraints in c1..cK
  std::vector<std::string> forced_zero;
};

struct Elimination {
  SymmetryBasis basis;
  std::size_t rank = 0;
  std::vector<StageRecord> stages;
  std::optional<LinearRow> inconsistency;  ///< witness of a nonzero constant row
};

namespace detail {

/// (xi, eta) for coefficient values, one per constant.
template <class Coeff>
std::pair<Expr, Expr> ansatz_generator(const LinearSystem& sys, const std::vector<Coeff>& values) {
  if (!sys.ansatz) return {};
  const XAnsatz& an = *sys.ansatz;
  Expr xi, eta;
  for (std::size_t c = 0; c < sys.constants.size(); ++c) {
    const Expr v(values[c]);
    if (v.is_zero()) continue;
    const auto& info = sys.constants[c];
    const Expr mono(indep(), info.t_power);
    for (unsigned i = 0; i <= an.deg_xi_x; ++i)
      if (info.function == an.xi_name(i)) xi += v * mono * Expr(jet(0), i);
    for (unsigned j = 0; j <= an.deg_eta_x; ++j)
      if (info.function == an.eta_name(j)) eta += v * mono * Expr(jet(0), j);
  }
  return {xi, eta};
}

inline AnsatzConst family_param(std::size_t j) {
  return AnsatzConst{static_cast<unsigned>(j + 1), "c" + std::to_string(j + 1)};
}

}  // namespace detail

/// Constant values representing a concrete (xi, eta); nullopt if the pair lies
/// outside the ansatz class of `sys`.
inline std::optional<std::vector<ParamField>> ansatz_coordinates(const LinearSystem& sys, const Expr& xi,
                                                                 const Expr& eta) {
  if (!sys.ansatz) return std::nullopt;
  const XAnsatz& an = *sys.ansatz;
  std::vector<ParamField> out(sys.constants.size());
  auto place = [&](const Expr& e, bool of_xi) {
    for (const auto& [m, c] : e.terms()) {
      for (const auto& [a, p] : m.factors())
        if (!is_jet_or_indep(a) || (std::holds_alternative<JetVar>(a) && jet_order(a) != 0u)) return false;
      const unsigned i = m.exponent_of(jet(0)), k = m.exponent_of(indep());
      if (i > (of_xi ? an.deg_xi_x : an.deg_eta_x) || k > sys.deg_t) return false;
      const std::string fn = of_xi ? an.xi_name(i) : an.eta_name(i);
      const auto pos = std::find(sys.functions.begin(), sys.functions.end(), fn) - sys.functions.begin();
      out[pos * (sys.deg_t + 1) + k] = c;
    }
    return true;
  };
  if (!place(xi, true) || !place(eta, false)) return std::nullopt;
  return out;
}

/// Exact elimination, staged by descending x' power.
inline Elimination eliminate(const LinearSystem& sys) {
  Elimination out;
  Eliminator elim(sys.constants.size());
  std::vector<unsigned> powers;
  for (const auto& r : sys.rows)
    if (std::find(powers.begin(), powers.end(), r.origin.xdot_power) == powers.end())
      powers.push_back(r.origin.xdot_power);
  std::sort(powers.rbegin(), powers.rend());

  for (std::size_t s = 0; s < powers.size(); ++s) {
    StageRecord st;
    st.xdot_power = powers[s];
    st.dim_before = elim.nullity();
    std::vector<const LinearRow*> rows;
    for (const auto& r : sys.rows)
      if (r.origin.xdot_power == powers[s]) rows.push_back(&r);
    st.rows = rows.size();

    if (s > 0) {
      st.parametrized = true;
      const auto family = elim.nullspace();
      std::vector<Expr> combo(sys.constants.size());
      for (std::size_t j = 0; j < family.size(); ++j) {
        st.family_params.push_back(detail::family_param(j).name);
        const Expr cj(Atom(detail::family_param(j)));
        for (std::size_t c = 0; c < combo.size(); ++c)
          if (!family[j][c].is_zero()) combo[c] += cj.scaled(family[j][c]);
      }
      std::tie(st.family_xi, st.family_eta) = detail::ansatz_generator(sys, combo);

      Eliminator restricted(family.size());
      for (const LinearRow* r : rows) {
        SparseRow rr;
        for (std::size_t j = 0; j < family.size(); ++j) {
          ParamField acc;
          for (const auto& [c, v] : r->entries)
            if (!family[j][c].is_zero()) acc += v * family[j][c];
          if (!acc.is_zero()) rr.emplace(static_cast<unsigned>(j), acc);
        }
        restricted.add(std::move(rr));
      }
      for (const auto& [p, prow] : restricted.pivots()) {
        Expr rel;
        for (const auto& [j, v] : prow.entries) rel += Expr(Atom(detail::family_param(j))).scaled(v);
        st.relations.push_back(std::move(rel));
      }
      const auto kept = restricted.nullspace();
      for (std::size_t j = 0; j < family.size(); ++j) {
        bool zero = true;
        for (const auto& v : kept) zero = zero && v[j].is_zero();
        if (zero) st.forced_zero.push_back(detail::family_param(j).name);
      }
    }

    for (const LinearRow* r : rows) {
      if (elim.add(r->entries, r->rhs) == Eliminator::Outcome::Inconsistent && !out.inconsistency)
        out.inconsistency = *r;
    }
    st.dim_after = elim.nullity();
    out.stages.push_back(std::move(st));
  }

  out.rank = elim.rank();
  out.basis.genericity = elim.genericity();
  if (out.inconsistency) return out;
  out.basis.vectors = elim.nullspace();
  out.basis.dim = out.basis.vectors.size();
  if (sys.ansatz)
    for (const auto& v : out.basis.vectors) {
      auto [xi, eta] = detail::ansatz_generator(sys, v);
      out.basis.generators.push_back(Generator{std::move(xi), std::move(eta), {}});
    }
  return out;
}

struct BasisCheck {
  std::size_t index = 0;
  Expr residual;
};

struct BasisVerification {
  std::vector<BasisCheck> checks;
  std::vector<std::size_t> failures;  ///< indices with nonzero residual
  bool passed() const { return failures.empty(); }
};

inline BasisVerification verify_basis(const std::vector<Generator>& generators, const OdeSpec& ode) {
  BasisVerification out;
  if (generators.empty()) return out;
  const ClearingPlan plan = clearing_plan(ode);
  for (std::size_t i = 0; i < generators.size(); ++i) {
    BasisCheck c{i, symmetry_condition(ode, Generator::concrete(generators[i].xi, generators[i].eta), plan).numerator};
    if (!c.residual.is_zero()) out.failures.push_back(i);
    out.checks.push_back(std::move(c));
  }
  return out;
}

inline BasisVerification verify_basis(const SymmetryBasis& basis, const OdeSpec& ode) {
  return verify_basis(basis.generators, ode);
}

inline std::string genericity_text(const ParamPoly& p) { return p.to_string() + " != 0"; }

/// Substitutes into a solved basis. Fails if a genericity divisor vanishes.
inline SymmetryBasis specialize_params(const SymmetryBasis& basis, const std::map<std::string, Rational>& values) {
  SymmetryBasis out;
  for (const auto& g : basis.genericity) {
    const ParamField v = ParamField(g).specialize(values);
    if (v.is_zero())
      throw GenericityViolation("assignment annihilates genericity condition " + genericity_text(g) +
                                " used during elimination; re-run the pipeline from the determining system "
                                "with the parameters bound (--bind)");
    if (!v.num().is_constant()) out.genericity.push_back(v.num());
  }
  out.dim = basis.dim;
  for (const auto& g : basis.generators)
    out.generators.push_back(Generator{specialize(g.xi, values), specialize(g.eta, values), {}});
  for (const auto& vec : basis.vectors) {
    std::vector<ParamField> sv;
    for (const auto& x : vec) sv.push_back(x.specialize(values));
    out.vectors.push_back(std::move(sv));
  }
  return out;
}

inline TOdeSystem specialize_params(const TOdeSystem& sys, const std::map<std::string, Rational>& values) {
  TOdeSystem out = sys;
  out.equations.clear();
  for (const auto& e : sys.equations) {
    TEquation s = e;
    s.eq = specialize(e.eq, values);
    if (!s.eq.is_zero()) out.equations.push_back(std::move(s));
  }
  return out;
}

inline LinearSystem specialize_params(const LinearSystem& sys, const std::map<std::string, Rational>& values) {
  LinearSystem out = sys;
  out.rows.clear();
  for (const auto& r : sys.rows) {
    LinearRow s{{}, r.rhs.specialize(values), r.origin};
    for (const auto& [c, v] : r.entries)
      if (ParamField sv = v.specialize(values); !sv.is_zero()) s.entries.emplace(c, std::move(sv));
    if (!s.entries.empty() || !s.rhs.is_zero()) out.rows.push_back(std::move(s));
  }
  return out;
}

}  // namespace liesym
