#pragma once

// Seeded generators shared by the property tests.

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/ode.hpp"
#include "liesym/parser.hpp"

namespace liesym::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return static_cast<int>(lo + rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return rng_() & 1u; }

  ParamPoly param_poly(int max_terms = 3, int max_deg = 2) {
    ParamPoly p;
    const int n = integer(1, max_terms);
    for (int i = 0; i < n; ++i) {
      ParamMonomial m;
      if (int ea = integer(0, max_deg)) m.emplace_back("a", ea);
      if (int eb = integer(0, max_deg)) m.emplace_back("b", eb);
      p.add_term(m, Integer(integer(-5, 5)));
    }
    return p;
  }

  ParamField param_field() {
    ParamPoly den = param_poly(2, 1);
    if (den.is_zero()) den = ParamPoly(1);
    return ParamField(param_poly(), den);
  }

  ParamField small_coefficient() {
    switch (integer(0, 3)) {
      case 0:
        return ParamField(Rational(integer(-6, 6), integer(1, 4)));
      case 1:
        return ParamField(integer(-3, 3)) * ParamField::variable("a");
      case 2:
        return ParamField(ParamPoly::variable("b") + ParamPoly(integer(-2, 2)), ParamPoly(integer(1, 3)));
      default:
        return ParamField(integer(-4, 4));
    }
  }

  Atom atom() {
    switch (integer(0, 6)) {
      case 0:
        return indep();
      case 1:
      case 2:
        return jet(0);
      case 3:
        return jet(1);
      case 4:
        return jet(2);
      case 5: {
        FnDeriv f = unknown_fn("xi", {BaseVar::T, BaseVar::X});
        f.orders = {static_cast<unsigned>(integer(0, 2)), static_cast<unsigned>(integer(0, 1))};
        return f;
      }
      default: {
        FnDeriv f = unknown_fn("eta", {BaseVar::T, BaseVar::X});
        f.orders = {static_cast<unsigned>(integer(0, 1)), static_cast<unsigned>(integer(0, 2))};
        return f;
      }
    }
  }

  /// Polynomial in t, x, x' (and optionally x'', xi/eta derivatives).
  Expr expr(int max_terms = 5, int max_deg = 3, bool with_unknowns = true) {
    Expr e;
    const int n = integer(0, max_terms);
    for (int i = 0; i < n; ++i) {
      Monomial m;
      const int factors = integer(0, max_deg);
      for (int k = 0; k < factors; ++k) {
        Atom a = atom();
        if (!with_unknowns && std::holds_alternative<FnDeriv>(a)) a = jet(0);
        m = m * Monomial(a, 1);
      }
      e.add_term(m, small_coefficient());
    }
    return e;
  }

 private:
  std::mt19937_64 rng_;
};

inline ParseContext kernel_context() {
  ParseContext ctx;
  ctx.params = {"a", "b"};
  ctx.with_generator_unknowns();
  return ctx;
}

#ifdef LIESYM_DATA_DIR
inline std::string data_path(const std::string& name) { return std::string(LIESYM_DATA_DIR) + "/" + name; }

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("missing data file " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline OdeSpec load_ode(const std::string& name) { return read_ode_spec(read_data(name), name); }
#endif

}  // namespace liesym::testing
