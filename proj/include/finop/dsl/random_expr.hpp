#pragma once

#include <string>
#include <vector>

#include "finop/dsl/ast.hpp"
#include "finop/random.hpp"

namespace finop::dsl {

struct RandomExprOptions {
  int max_depth = 5;
  int N = 2;
  std::vector<std::string> names;               // coefficient names usable in M(...)
  std::vector<int> denominators{1, 2, 3, 4, 6};  // for derivative steps
  int max_children = 3;
};

/// Random AST of depth at most opt.max_depth, in the shape the parser
/// produces (Sum and Product with two or more children).
inline Expr random_expr(RandomInstances& rnd, const RandomExprOptions& opt, int depth = 0) {
  const bool leaf = depth + 1 >= opt.max_depth || rnd.coin(0.3);
  if (leaf) {
    const int kind = rnd.uniform_int(0, opt.names.empty() ? 1 : 2);
    if (kind == 0) return Expr::identity();
    if (kind == 1) {
      const int den = rnd.pick(opt.denominators);
      int num = 0;
      while (num == 0) num = rnd.uniform_int(-2 * den, 2 * den);
      return Expr::deriv(rnd.uniform_int(1, opt.N), Rational(num, den));
    }
    return Expr::mult(rnd.pick(opt.names));
  }
  switch (rnd.uniform_int(0, 3)) {
    case 0:
    case 1: {
      std::vector<Expr> kids;
      const int n = rnd.uniform_int(2, opt.max_children);
      for (int i = 0; i < n; ++i) kids.push_back(random_expr(rnd, opt, depth + 1));
      return rnd.coin() ? Expr::sum(std::move(kids)) : Expr::product(std::move(kids));
    }
    case 2: {
      Complex c = rnd.complex();
      if (rnd.coin(0.3)) c = Complex(static_cast<double>(rnd.uniform_int(-4, 4)), 0.0);
      return Expr::scale(c, random_expr(rnd, opt, depth + 1));
    }
    default:
      return Expr::adjoint(random_expr(rnd, opt, depth + 1));
  }
}

/// Random coefficient definition with 1..3 boxes whose corners have
/// denominators drawn from `denominators`.
inline CoeffDef random_coeff(RandomInstances& rnd, const std::string& name, int N, int M,
                             const std::vector<int>& denominators, bool additive = false) {
  CoeffDef def;
  def.name = name;
  def.additive = additive;
  const int count = rnd.uniform_int(1, 3);
  for (int b = 0; b < count; ++b) {
    Box box;
    for (int a = 0; a < N; ++a) {
      const int den = rnd.pick(denominators);
      Rational lo(rnd.uniform_int(0, den), den), hi(rnd.uniform_int(0, den), den);
      if (lo == hi) {
        lo = Rational(0);
        hi = Rational(1);
      }
      box.axes.push_back({lo, hi});
    }
    box.scalar = M == 1 || rnd.coin();
    box.value = box.scalar ? rnd.matrix(1) : rnd.matrix(M);
    def.boxes.push_back(std::move(box));
  }
  return def;
}

}  // namespace finop::dsl
