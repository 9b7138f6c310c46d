// Acceptance run: one [PASS]/[FAIL] line per criterion, with timings.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "liesym/analysis.hpp"
#include "liesym/cli.hpp"
#include "liesym/numeric.hpp"
#include "liesym/reference_check.hpp"
#include "support.hpp"

using namespace liesym;
using testing::load_ode;

namespace {

class Checker {
 public:
  void check(bool ok, const std::string& what) {
    ++count_;
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& line) { notes_.push_back(line); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }
  int count() const { return count_; }

 private:
  int count_ = 0;
  std::vector<std::string> failures_, notes_;
};

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;
  std::function<void(Checker&)> body;
};

const ParseContext& kernel() {
  static const ParseContext c = testing::kernel_context();
  return c;
}
Expr E(const std::string& s) { return parse_expr(s, kernel()); }

void ac1(Checker& c) {
  const Generator g = prolong(Generator::symbolic(), 2);
  c.check(g.prolongations.size() == 2, "two prolongations");
  if (g.prolongations.size() != 2) return;
  c.check(g.prolongations[0] == E("eta_t + (eta_x - xi_t)*x' - xi_x*x'^2"), "eta1 closed form");
  c.check(g.prolongations[1] == E("eta_tt + (2*eta_tx - xi_tt)*x' + (eta_xx - 2*xi_tx)*x'^2 - xi_xx*x'^3"
                                  " + (eta_x - 2*xi_t)*x'' - 3*xi_x*x'*x''"),
          "eta2 closed form");
}

void ac2(Checker& c) {
  const Analysis an = analyze(load_ode("silnikov.ode"), {4, 6, {}});
  c.check(an.determining.equations.size() == 4, "four determining equations");
  c.check(an.condition.clearing.factor == E("x^3"), "recorded clearing factor x^3");
  const auto results = check_reference(read_reference(testing::read_data("silnikov.ref"), "silnikov.ref"), an);
  int det_lines = 0;
  bool xi_tt_flag = false;
  for (const auto& r : results) {
    if (r.name.rfind("determining equation", 0) == 0) {
      ++det_lines;
      c.check(r.match, r.name + " matches term by term");
    }
    if (!r.match) {
      c.note("flagged: " + r.name);
      for (const auto& d : r.diffs) {
        c.note("  term " + to_text(d.monomial) + ": computed " + d.computed.to_string() + ", printed " +
               d.printed.to_string());
        if (r.name == "x'^2 equation after simplifying" && to_text(d.monomial) == "x^2*xi_tt") xi_tt_flag = true;
      }
    }
  }
  c.check(det_lines == 4, "four transcribed determining lines compared");
  c.check(xi_tt_flag, "xi_tt / xi_tx difference emitted as a flagged diff");
}

void ac3(Checker& c) {
  const OdeSpec ode = load_ode("silnikov.ode");
  const Analysis an = analyze(ode, {4, 6, {}});
  c.check(an.dim() == 0, "dimension 0 at (4,6)");
  c.check(an.verdict().rfind("symmetry space dimension 0 within ansatz (4,6)", 0) == 0, "verdict wording");
  const auto& last = an.solution.stages.back();
  c.check(last.family_params == std::vector<std::string>{"c1", "c2", "c3"}, "three free constants before the last stage");
  c.check(last.forced_zero == std::vector<std::string>{"c1", "c2", "c3"}, "c1, c2, c3 forced to 0");
  c.note("last stage: dimension " + std::to_string(last.dim_before) + " -> " + std::to_string(last.dim_after));
  int cells = 0;
  for (unsigned dx = 2; dx <= 6; ++dx)
    for (unsigned dt = 2; dt <= 8; ++dt) {
      ++cells;
      c.check(analyze(ode, {dx, dt, {}}).dim() == 0,
              "dimension 0 at (" + std::to_string(dx) + "," + std::to_string(dt) + ")");
    }
  c.note("monotonicity grid: " + std::to_string(cells) + " cells");
}

void ac4(Checker& c) {
  const Analysis an = analyze(load_ode("silnikov.ode"), {4, 6, {{"b", 0}}});
  c.check(an.ode.params == std::vector<std::string>{"a"}, "b bound before derivation");
  bool b_free = true;
  for (const auto& d : an.determining.equations)
    for (const auto& [m, coeff] : d.eq.terms())
      if (coeff.to_string().find('b') != std::string::npos) b_free = false;
  c.check(b_free, "determining system re-derived without b");
  c.check(an.dim() == 0, "dimension 0");
}

void ac5(Checker& c) {
  const OdeSpec ode = load_ode("free_particle.ode");
  const Analysis an = analyze(ode, {2, 2, {}});
  c.check(an.dim() == 8, "dimension exactly 8");
  c.check(an.verification.checks.size() == 8 && an.verification.passed(), "verify_basis residuals identically 0");
  double worst = 0;
  for (const auto& g : an.solution.basis.generators)
    worst = std::max(worst, sample_sweep(ode, g, 1000, 11, {}, {}).max_abs);
  c.check(worst < 1e-10, "numeric residual below 1e-10");
  std::ostringstream os;
  os << "max sampled residual " << worst;
  c.note(os.str());
}

void ac6(Checker& c) {
  const OdeSpec spec3 = load_ode("silnikov3.ode");
  const AutonomousReduction red = reduce_autonomous(AutonomousOde3::from_spec(spec3));
  ParseContext zy;
  zy.notation = {"y", "z"};
  zy.params = {"a", "b"};
  const Expr target = parse_expr("z^2*z'' + z*z'^2 + z + a^2*y - y^3 + b*z'*z", zy);
  c.check(red.lhs == target, "z^2 z'' + z z'^2 + z + a^2 y - y^3 + b z' z");
  cli::RunConfig cfg;
  cfg.ode_path = testing::data_path("silnikov3.ode");
  const OdeSpec written = read_ode_spec(cli::run_reduce3(cfg));
  c.check(written.cleared_lhs() == target, "written spec file has the same equation");
}

void ac7(Checker& c) {
  double drift = 0;
  for (double a : {1.0, 2.0})
    for (double x0 : {0.0, a, -a}) {
      const Trajectory tr = integrate({a, 0.5, 1e-2, 100}, {0, x0, 0, 0});
      c.check(!tr.truncated && std::abs(tr.states.back().t - 100) < 1e-9, "equilibrium run reaches t = 100");
      for (const auto& s : tr.states)
        drift = std::max({drift, std::abs(s.x - x0), std::abs(s.y), std::abs(s.z)});
    }
  c.check(drift <= 1e-10, "equilibria drift within 1e-10");

  const std::array<double, 3> pinned{0.087604886065158758571, -0.03313416580159621761, -0.050260239866112201495};
  auto err = [&](double h) {
    const State3& s = integrate({1, 1, h, 1}, {0, 0.1, 0, 0}).states.back();
    return std::max({std::abs(s.x - pinned[0]), std::abs(s.y - pinned[1]), std::abs(s.z - pinned[2])});
  };
  const double ratio = err(0.05) / err(0.025);
  c.check(ratio >= 12 && ratio <= 20, "step-halving ratio in [12, 20]");

  const OdeSpec ode = load_ode("silnikov.ode");
  const std::map<std::string, double> p{{"a", 1.0}, {"b", 1.0}};
  const double corrupted = sample_sweep(ode, Generator::concrete(E("1"), E("0")), 1000, 1, {}, p).max_abs;
  const double zero = sample_sweep(ode, Generator::concrete(E("0"), E("0")), 1000, 1, {}, p).max_abs;
  c.check(corrupted >= 1, "corrupted generator residual >= 1");
  c.check(zero == 0, "zero generator residual = 0");
  std::ostringstream os;
  os << "drift " << drift << ", ratio " << ratio << ", corrupted max " << corrupted;
  c.note(os.str());
}

void ac8(Checker& c) {
  {
    testing::Gen gen(1000);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const Expr a = gen.expr(), b = gen.expr(), d = gen.expr();
      ok = a * (b + d) == a * b + a * d && a * b == b * a && a + b == b + a && (a * b) * d == a * (b * d) &&
           (a + b) + d == a + (b + d) && (a - a).is_zero();
    }
    c.check(ok, "ring axioms");
  }
  {
    testing::Gen gen(31);
    const std::vector<Atom> by{indep(), jet(0), jet(1), jet(2)};
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const Expr e = gen.expr();
      const Atom& atom = by[static_cast<std::size_t>(i) % by.size()];
      ok = reassemble(collect(e, atom), atom) == e;
    }
    c.check(ok, "collect / reassemble round-trip");
  }
  {
    testing::Gen gen(9);
    const JetContext jc{3};
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const Expr e1 = gen.expr(4, 2), e2 = gen.expr(4, 2);
      ok = total_derivative(e1 * e2, jc) == total_derivative(e1, jc) * e2 + e1 * total_derivative(e2, jc) &&
           partial(partial(e1, indep()), jet(0)) == partial(partial(e1, jet(0)), indep());
    }
    c.check(ok, "Leibniz rule and commuting partials");
  }
  {
    testing::Gen gen(20240611);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      DeterminingSystem det;
      for (unsigned p = 0; p < 2; ++p) {
        const Expr e = gen.expr(5, 3, true);
        Expr kept;
        for (const auto& [m, coeff] : e.terms())
          if (detail::unknown_degree(m) <= 1 && !m.exponent_of(jet(1)) && !m.exponent_of(jet(2)))
            kept.add_term(m, coeff);
        if (!kept.is_zero()) det.equations.push_back({p, kept});
      }
      const XAnsatz an = XAnsatz::make(gen.integer(0, 3), gen.integer(0, 3), {"a", "b"});
      const TOdeSystem ts = x_reduce(det, an);
      for (std::size_t k = 0; k < det.equations.size(); ++k)
        ok = ok && reassemble_source(ts, k) == substitute_generator(det.equations[k].eq, an.xi(), an.eta());
      const LinearSystem lin = t_reduce(ts, gen.integer(0, 3));
      for (std::size_t k = 0; k < ts.equations.size(); ++k)
        ok = ok && reassemble_equation(lin, k) == lin.substitute_functions(ts.equations[k].eq);
    }
    c.check(ok, "determining-system reassembly");
  }
  {
    testing::Gen gen(77);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const std::size_t cols = gen.integer(1, 6);
      std::vector<SparseRow> rows(gen.integer(0, 6));
      for (auto& r : rows)
        for (unsigned col = 0; col < cols; ++col)
          if (gen.integer(0, 2) == 0) {
            ParamField v = gen.small_coefficient();
            if (!v.is_zero()) r.emplace(col, v);
          }
      Eliminator first(cols), again(cols), reversed(cols);
      for (const auto& r : rows) first.add(r), again.add(r);
      for (auto it = rows.rbegin(); it != rows.rend(); ++it) reversed.add(*it);
      ok = first.nullspace() == again.nullspace() && first.genericity() == again.genericity() &&
           first.nullspace() == reversed.nullspace();
    }
    c.check(ok, "elimination determinism");
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "prolongation golden", 1, ac1},
      {"AC2", "determining-system golden", 5, ac2},
      {"AC3", "main result and monotonicity grid", 60, ac3},
      {"AC4", "b = 0 re-derived", 30, ac4},
      {"AC5", "free-particle oracle", 0, ac5},
      {"AC6", "reduction fidelity", 0, ac6},
      {"AC7", "numeric lab", 0, ac7},
      {"AC8", "property suites (1000 cases each)", 0, ac8},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0 && secs >= cr.budget_s) c.check(false, "runtime over budget");
    const bool pass = c.failures().empty();
    failed += !pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f s", secs);
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << cr.id << " " << cr.title << " (" << c.count() << " checks, "
              << timing << (cr.budget_s > 0 ? ", budget " + std::to_string(static_cast<int>(cr.budget_s)) + " s" : "")
              << ")\n";
    for (const auto& f : c.failures()) std::cout << "       failed: " << f << "\n";
    for (const auto& n : c.notes()) std::cout << "       " << n << "\n";
    std::cout.flush();
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
  return failed ? 1 : 0;
}
