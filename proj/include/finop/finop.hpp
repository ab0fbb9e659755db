#pragma once

#include "finop/digit_unitary.hpp"
#include "finop/dsl/ast.hpp"
#include "finop/dsl/lower.hpp"
#include "finop/dsl/parser.hpp"
#include "finop/dsl/printer.hpp"
#include "finop/error.hpp"
#include "finop/grid.hpp"
#include "finop/io.hpp"
#include "finop/isomorphism.hpp"
#include "finop/matrix_rep.hpp"
#include "finop/operator.hpp"
#include "finop/pde.hpp"
#include "finop/rational.hpp"
#include "finop/refinement.hpp"
#include "finop/step_function.hpp"
#include "finop/supernatural.hpp"
#include "finop/verify.hpp"
