#pragma once

#include "liesym/analysis.hpp"
#include "liesym/det_solver.hpp"
#include "liesym/expr.hpp"
#include "liesym/jet.hpp"
#include "liesym/lie.hpp"
#include "liesym/linear.hpp"
#include "liesym/numeric.hpp"
#include "liesym/ode.hpp"
#include "liesym/parser.hpp"
#include "liesym/printer.hpp"
#include "liesym/reference_check.hpp"
#include "liesym/report.hpp"
