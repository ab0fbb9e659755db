#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "finop/finop.hpp"

#ifndef FINOP_VERSION
#define FINOP_VERSION "unknown"
#endif

namespace {

using finop::io::json;

struct Options {
  std::string format = "table";
  std::string file;
  int N = 0;
  int M = 0;
  int level = 0;
  std::string order = "lexicographic";
  bool grid_info = false;
  std::string times = "0.1,1.0";
  std::string u0 = "random";
  std::uint64_t seed = 42;
  int rounds = 20;
  std::string base;
  std::string x;
  int depth = 3;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw finop::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and lowers a .fop file; --N/--M override the file's dims header.
finop::FiniteOperator load_operator(const Options& o) {
  const finop::dsl::Program prog = finop::dsl::parse(read_file(o.file));
  const int N = o.N > 0 ? o.N : prog.N.value_or(1);
  const int M = o.M > 0 ? o.M : prog.M.value_or(1);
  const finop::GridSpec g(N, M, finop::dsl::grid_for(prog.expr, prog.env));
  finop::check_dimension(g.dimension());
  return finop::dsl::lower_on(prog.expr, prog.env, g);
}

finop::CellMap cell_order(const std::string& name) {
  if (name == "lexicographic") return finop::lexicographic_order();
  if (name == "serpentine") return finop::serpentine_order();
  throw finop::Error("unknown cell order '" + name + "'");
}

json with_version(json j) {
  j["version"] = FINOP_VERSION;
  return j;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string shortest(double v) { return finop::dsl::detail::format_double(v + 0.0); }

std::string fmt(finop::Complex z) {
  std::ostringstream os;
  os << std::showpos << std::setprecision(6) << z.real() + 0.0 << z.imag() + 0.0 << 'i';
  return os.str();
}

int cmd_repr(const Options& o) {
  const finop::FiniteOperator a = load_operator(o);
  const finop::GridSpec& g = a.grid();
  if (o.grid_info) {
    if (o.format == "json")
      print_json(with_version({{"grid", finop::io::grid_to_json(g)}, {"K", g.dimension()}}));
    else
      std::cout << "N=" << g.N << " M=" << g.M << " p=" << g.p << " K=" << g.dimension() << '\n';
    return 0;
  }
  const Eigen::MatrixXcd B = finop::to_matrix(a).entries;
  if (o.format == "json") {
    print_json(with_version({{"grid", finop::io::grid_to_json(g)},
                             {"K", g.dimension()},
                             {"matrix", finop::io::matrix_to_json(B)}}));
  } else if (o.format == "csv") {
    std::cout << finop::io::matrix_to_csv(B);
  } else {
    std::cout << "# N=" << g.N << " M=" << g.M << " p=" << g.p << " K=" << g.dimension() << '\n';
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
      for (Eigen::Index c = 0; c < B.cols(); ++c) std::cout << std::setw(24) << fmt(B(r, c));
      std::cout << '\n';
    }
  }
  return 0;
}

int cmd_conjugate(const Options& o) {
  const finop::FiniteOperator a = load_operator(o);
  const int level = o.level > 0 ? o.level : finop::minimal_level(a.grid().p);
  const finop::ConjugationResult r = finop::pde_to_ode(a, level, cell_order(o.order));
  if (o.format == "json") {
    json j = finop::io::to_json(r);
    j["order"] = o.order;
    print_json(with_version(std::move(j)));
  } else {
    const auto& s = r.spectral_report;
    std::cout << "level          " << r.level << '\n'
              << "pde grid       " << r.permutation.pde_grid() << '\n'
              << "ode grid       " << r.ode.grid() << '\n'
              << "K              " << r.permutation.size() << '\n'
              << "ode terms      " << r.ode.terms().size() << '\n'
              << "max deviation  " << fmt(s.max_deviation, 3) << '\n'
              << "tolerance      " << fmt(s.tolerance, 3) << '\n'
              << "spectrum       " << (s.pass ? "PASS" : "FAIL") << '\n';
  }
  return r.spectral_report.pass ? 0 : 1;
}

int cmd_spectrum(const Options& o) {
  const finop::FiniteOperator a = load_operator(o);
  finop::Spectrum s;
  if (o.level > 0)
    s = finop::pde_to_ode(a, o.level, cell_order(o.order)).spectral_report.ode;
  else
    s = finop::spectrum(finop::to_matrix(a));
  if (o.format == "json") {
    print_json(with_version({{"grid", finop::io::grid_to_json(a.grid())}, {"eigenvalues", finop::io::to_json(s)}}));
  } else if (o.format == "csv") {
    std::cout << "re,im\n";
    for (const auto& z : s.eigenvalues) std::cout << shortest(z.real()) << ',' << shortest(z.imag()) << '\n';
  } else {
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      std::cout << std::setw(5) << i << std::setw(16) << fmt(s.eigenvalues[i].real(), 10) << std::setw(16)
                << fmt(s.eigenvalues[i].imag(), 10) << '\n';
  }
  return 0;
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw finop::Error("malformed time '" + item + "'");
    out.push_back(t);
  }
  if (out.empty()) throw finop::Error("--times is empty");
  return out;
}

int cmd_evolve(const Options& o) {
  const finop::FiniteOperator a = load_operator(o);
  const int level = o.level > 0 ? o.level : finop::minimal_level(a.grid().p);
  const finop::GridSpec g = a.grid().with_p(static_cast<int>(finop::detail::factorial(level)));
  finop::GridVector u0 = finop::GridVector::zero(g);
  if (o.u0 == "random") {
    finop::RandomInstances rnd(o.seed);
    u0 = rnd.vector(g);
  } else if (o.u0 == "const") {
    u0.values.setConstant(finop::Complex(1.0 / std::sqrt(static_cast<double>(g.dimension()))));
  } else {
    throw finop::Error("unknown --u0 '" + o.u0 + "' (random|const)");
  }
  const auto pts = finop::evolve_compare(a, u0, parse_times(o.times), level, cell_order(o.order));
  bool ok = true;
  for (const auto& pt : pts) ok = ok && pt.pass;
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& pt : pts)
      rows.push_back({{"t", pt.t}, {"discrepancy", pt.discrepancy}, {"bound", pt.bound}, {"verdict", pt.pass ? "PASS" : "FAIL"}});
    print_json(with_version({{"level", level}, {"seed", o.seed}, {"u0", o.u0}, {"points", rows}}));
  } else if (o.format == "csv") {
    std::cout << "t,discrepancy,bound,verdict\n";
    for (const auto& pt : pts)
      std::cout << shortest(pt.t) << ',' << shortest(pt.discrepancy) << ',' << shortest(pt.bound) << ','
                << (pt.pass ? "PASS" : "FAIL") << '\n';
  } else {
    std::cout << "# level=" << level << " seed=" << o.seed << " u0=" << o.u0 << '\n';
    std::cout << std::setw(10) << "t" << std::setw(14) << "discrepancy" << std::setw(14) << "bound" << "  verdict\n";
    for (const auto& pt : pts)
      std::cout << std::setw(10) << fmt(pt.t) << std::setw(14) << fmt(pt.discrepancy, 3) << std::setw(14)
                << fmt(pt.bound, 3) << "  " << (pt.pass ? "PASS" : "FAIL") << '\n';
  }
  return ok ? 0 : 1;
}

int cmd_classify(const Options& o) {
  const finop::SupernaturalNumber base = finop::SupernaturalNumber::parse(o.base);
  const finop::SupernaturalNumber s = finop::classify(o.N, o.M, base);
  const bool car = finop::is_car(o.N, o.M, base);
  if (o.format == "json")
    print_json(with_version({{"N", o.N}, {"M", o.M}, {"base", base.str()}, {"supernatural", s.str()}, {"car", car}}));
  else
    std::cout << s.str() << ", CAR: " << (car ? "true" : "false") << '\n';
  return 0;
}

int cmd_digits(const Options& o) {
  const finop::Rational x = finop::Rational::parse(o.x);
  const finop::DigitExpansion e = finop::digits(x, o.N, o.M, o.depth);
  if (o.format == "json") {
    print_json(with_version({{"x", x.str()},
                             {"x1", e.x1},
                             {"digits", e.digits},
                             {"partial", e.partial.str()},
                             {"residual", e.residual.str()}}));
  } else {
    std::cout << "x1=" << e.x1;
    for (int i = 2; i <= o.depth; ++i) std::cout << ", x" << i << '=' << e.digit(i);
    std::cout << '\n';
  }
  return 0;
}

int cmd_verify(const Options& o) {
  const auto results = finop::run_verify(o.seed, o.rounds);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.pass;
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : results)
      rows.push_back({{"check", r.name},
                      {"instances", r.instances},
                      {"worst", r.worst},
                      {"tolerance", r.tolerance},
                      {"verdict", r.pass ? "PASS" : "FAIL"}});
    print_json(with_version({{"seed", o.seed}, {"rounds", o.rounds}, {"checks", rows}, {"verdict", ok ? "PASS" : "FAIL"}}));
  } else {
    std::cout << "seed: " << o.seed << "  rounds: " << o.rounds << '\n';
    std::cout << std::left << std::setw(52) << "check" << std::right << std::setw(6) << "n" << std::setw(12) << "worst"
              << std::setw(10) << "tol" << "  verdict\n";
    for (const auto& r : results)
      std::cout << std::left << std::setw(52) << r.name << std::right << std::setw(6) << r.instances << std::setw(12)
                << fmt(r.worst, 3) << std::setw(10) << fmt(r.tolerance, 3) << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
    std::cout << "summary: " << (ok ? "PASS" : "FAIL") << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finop: finite difference operators, matrix representations and the digit unitary"};
  app.set_version_flag("--version", FINOP_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();

  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", o.file, ".fop operator file")->required()->check(CLI::ExistingFile);
    sub->add_option("--N", o.N, "Override the file's spatial dimension")->check(CLI::PositiveNumber);
    sub->add_option("--M", o.M, "Override the file's component count")->check(CLI::PositiveNumber);
  };
  auto add_order = [&](CLI::App* sub) {
    sub->add_option("--order", o.order, "Cell order for the digit unitary")
        ->check(CLI::IsMember({"lexicographic", "serpentine"}))
        ->capture_default_str();
  };

  CLI::App* repr = app.add_subcommand("repr", "Matrix representation of an operator file");
  add_file(repr);
  repr->add_flag("--grid-info", o.grid_info, "Print N, M, p and K only");

  CLI::App* conj = app.add_subcommand("conjugate", "Conjugate to a scalar operator on the circle");
  add_file(conj);
  conj->add_option("--level", o.level, "Level n (grid n!); default is the smallest admissible")
      ->check(CLI::PositiveNumber);
  add_order(conj);

  CLI::App* spec = app.add_subcommand("spectrum", "Sorted eigenvalues of the representation matrix");
  add_file(spec);
  spec->add_option("--level", o.level, "Report the conjugated operator's spectrum at this level")
      ->check(CLI::PositiveNumber);
  add_order(spec);

  CLI::App* evo = app.add_subcommand("evolve", "Compare u' = Au with its conjugated ODE");
  add_file(evo);
  evo->add_option("--level", o.level, "Level n")->check(CLI::PositiveNumber);
  evo->add_option("--times", o.times, "Comma-separated times")->capture_default_str();
  evo->add_option("--u0", o.u0, "Initial state: random|const")->capture_default_str();
  evo->add_option("--seed", o.seed, "Seed for a random initial state")->capture_default_str();
  add_order(evo);

  CLI::App* cls = app.add_subcommand("classify", "Supernatural number of the UHF algebra M * base^N");
  cls->add_option("--N", o.N, "Spatial dimension")->required()->check(CLI::PositiveNumber);
  cls->add_option("--M", o.M, "Component count")->required()->check(CLI::PositiveNumber);
  cls->add_option("--base", o.base, "Base supernatural number, e.g. 2^inf, 6, universal")->required();

  CLI::App* dig = app.add_subcommand("digits", "Mixed-radix digits x1, x2, ... of a rational point");
  dig->add_option("--x", o.x, "Rational in [0,1), e.g. 3/4")->required();
  dig->add_option("--N", o.N, "Spatial dimension")->required()->check(CLI::PositiveNumber);
  dig->add_option("--M", o.M, "Component count")->required()->check(CLI::PositiveNumber);
  dig->add_option("--depth", o.depth, "Number of digits")->capture_default_str()->check(CLI::PositiveNumber);

  CLI::App* ver = app.add_subcommand("verify", "Randomized invariant suite");
  ver->add_option("--seed", o.seed, "Seed")->capture_default_str();
  ver->add_option("--rounds", o.rounds, "Instances per check")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*repr) return cmd_repr(o);
    if (*conj) return cmd_conjugate(o);
    if (*spec) return cmd_spectrum(o);
    if (*evo) return cmd_evolve(o);
    if (*cls) return cmd_classify(o);
    if (*dig) return cmd_digits(o);
    if (*ver) return cmd_verify(o);
  } catch (const finop::dsl::ParseError& e) {
    std::cerr << "finop: " << o.file << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "finop: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
