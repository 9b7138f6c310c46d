#include <catch2/catch_amalgamated.hpp>

#include "liesym/jet.hpp"
#include "liesym/parser.hpp"
#include "support.hpp"

using namespace liesym;

namespace {

const ParseContext& ctx() {
  static const ParseContext c = testing::kernel_context();
  return c;
}
Expr E(const std::string& s) { return parse_expr(s, ctx()); }

}  // namespace

TEST_CASE("partial derivatives", "[jet]") {
  CHECK(partial(E("x^2*x''"), jet(0)) == E("2*x*x''"));
  CHECK(partial(E("xi"), jet(0)) == E("xi_x"));
  CHECK(partial(E("t^3 - a^2*t"), indep()) == E("3*t^2 - a^2"));
  CHECK(partial(E("xi_t*eta^2"), indep()) == E("xi_tt*eta^2 + 2*xi_t*eta*eta_t"));
  // Unknown functions of (t, x) do not depend on x'.
  CHECK(partial(E("xi*x'^2"), jet(1)) == E("2*xi*x'"));
  CHECK(partial(E("x'*x''"), jet(2)) == E("x'"));
  CHECK(partial(E("a*b"), indep()).is_zero());
}

TEST_CASE("partial by a parameter is rejected", "[jet]") {
  CHECK_THROWS_AS(partial(E("a*t"), std::string("a")), std::invalid_argument);
  CHECK(partial(E("a*t*x'"), std::string("x'")) == E("a*t"));
  CHECK(partial(E("a*t*x'"), std::string("t")) == E("a*x'"));
}

TEST_CASE("total derivative", "[jet]") {
  const JetContext jc{3};
  CHECK(total_derivative(E("x^2"), jc) == E("2*x*x'"));
  CHECK(total_derivative(E("eta"), jc) == E("eta_t + eta_x*x'"));
  CHECK(total_derivative(E("t*x'"), jc) == E("x' + t*x''"));
  CHECK(total_derivative(E("a^2"), jc).is_zero());
  CHECK_THROWS_AS(total_derivative(E("x''"), JetContext{2}), OrderOverflow);
}

TEST_CASE("second prolongation by the recursion matches the closed form", "[jet]") {
  const JetContext jc{2};
  const Expr eta1 = E("eta_t + (eta_x - xi_t)*x' - xi_x*x'^2");
  CHECK(total_derivative(E("eta"), jc) - E("x'") * total_derivative(E("xi"), jc) == eta1);
  const Expr eta2 = total_derivative(eta1, jc) - E("x''") * total_derivative(E("xi"), jc);
  CHECK(eta2 == E("eta_tt + (2*eta_tx - xi_tt)*x' + (eta_xx - 2*xi_tx)*x'^2 - xi_xx*x'^3"
                  " + (eta_x - 2*xi_t)*x'' - 3*xi_x*x'*x''"));
}

TEST_CASE("mixed partials commute", "[jet][property]") {
  testing::Gen gen(5);
  for (int i = 0; i < 1000; ++i) {
    const Expr e = gen.expr();
    REQUIRE(partial(partial(e, indep()), jet(0)) == partial(partial(e, jet(0)), indep()));
  }
}

TEST_CASE("total derivative is linear over the parameter field", "[jet][property]") {
  testing::Gen gen(6);
  const JetContext jc{3};
  for (int i = 0; i < 1000; ++i) {
    const Expr e1 = gen.expr(), e2 = gen.expr();
    const ParamField alpha = gen.param_field();
    REQUIRE(total_derivative(e1.scaled(alpha) + e2, jc) ==
            total_derivative(e1, jc).scaled(alpha) + total_derivative(e2, jc));
  }
}

TEST_CASE("total derivative obeys the Leibniz rule", "[jet][property]") {
  testing::Gen gen(9);
  const JetContext jc{3};
  for (int i = 0; i < 1000; ++i) {
    const Expr e1 = gen.expr(4, 2), e2 = gen.expr(4, 2);
    REQUIRE(total_derivative(e1 * e2, jc) == total_derivative(e1, jc) * e2 + e1 * total_derivative(e2, jc));
  }
}
