#include <sstream>

#include "doctest.h"
#include "solarzoning/errors.hpp"
#include "solarzoning/lp.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::lp;

TEST_CASE("min x subject to x >= 3") {
  LinearProgram p;
  const int x = p.add_variable("x", -kInf, kInf, 1.0);
  p.add_ge("low", {{x, 1.0}}, 3.0);
  const auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[x] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.max_primal_residual <= 1e-6);
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram p;
  const int x = p.add_variable("x", -kInf, kInf, 0.0);
  p.add_le("hi", {{x, 1.0}}, 1.0);
  p.add_ge("lo", {{x, 1.0}}, 2.0);
  CHECK(solve(p).status == Status::Infeasible);

  LinearProgram q;
  const int y = q.add_variable("y", -kInf, kInf, -1.0);
  q.add_ge("lo", {{y, 1.0}}, 0.0);
  CHECK(solve(q).status == Status::Unbounded);
}

TEST_CASE("two-region transport toy matches the best basic solution") {
  // Cheap supply at A (cost 1, cap 10), dear supply at B (cost 3, cap 10),
  // demand 12 at B, link capacity 8. Basic solutions: ship 8 and make 4 at
  // B (20), or make 12 at B (infeasible, cap 10), or ship 2 and make 10 (32).
  LinearProgram p;
  const int ga = p.add_variable("gen_a", 0.0, 10.0, 1.0);
  const int gb = p.add_variable("gen_b", 0.0, 10.0, 3.0);
  const int f = p.add_variable("flow", -8.0, 8.0, 0.0);
  p.add_eq("bal_a", {{ga, 1.0}, {f, -1.0}}, 0.0);
  p.add_eq("bal_b", {{gb, 1.0}, {f, 1.0}}, 12.0);
  const auto s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(20.0));
  CHECK(s.x[f] == doctest::Approx(8.0));
  CHECK(s.x[gb] == doctest::Approx(4.0));
}

TEST_CASE("duplicate terms merge and offsets count") {
  LinearProgram p;
  const int x = p.add_variable("x", 0.0, kInf, 2.0);
  p.add_ge("twice", {{x, 1.0}, {x, 1.0}, {x, 0.0}}, 4.0);
  p.objective_offset = 10.0;
  CHECK(p.num_nonzeros() == 1);
  const auto s = solve(p);
  CHECK(s.x[x] == doctest::Approx(2.0));
  CHECK(s.objective == doctest::Approx(14.0));
  CHECK(p.objective_value(s.x) == doctest::Approx(14.0));
}

TEST_CASE("property: MPS round trip preserves the program and its optimum") {
  Rng rng(6);
  for (int trial = 0; trial < 25; ++trial) {
    LinearProgram p;
    const int n = 3 + static_cast<int>(uniform_index(rng, 6));
    for (int j = 0; j < n; ++j) {
      const double lo = unit_uniform(rng) < 0.2 ? -kInf : -sztest::uniform(rng, 0, 5);
      p.add_variable("x" + std::to_string(j), lo, sztest::uniform(rng, 1, 10), sztest::uniform(rng, -3, 3));
    }
    for (int i = 0; i < n; ++i) {
      std::vector<Term> t;
      for (int j = 0; j < n; ++j) {
        if (unit_uniform(rng) < 0.6) t.push_back({j, sztest::uniform(rng, -2, 2)});
      }
      const double mid = sztest::uniform(rng, -2, 2);
      switch (uniform_index(rng, 4)) {
        case 0: p.add_le("r" + std::to_string(i), t, mid + 5); break;
        case 1: p.add_ge("r" + std::to_string(i), t, mid - 5); break;
        case 2: p.add_constraint("r" + std::to_string(i), t, mid - 3, mid + 3); break;
        default: p.add_eq("r" + std::to_string(i), t, 0.0); break;
      }
    }
    p.objective_offset = sztest::uniform(rng, -5, 5);

    std::ostringstream out;
    write_mps(out, p, "T");
    std::istringstream in(out.str());
    const LinearProgram q = read_mps(in);
    const auto a = solve(p), b = solve(q);
    REQUIRE(a.status == b.status);
    if (a.status == Status::Optimal) {
      CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-9));
      CHECK(a.max_primal_residual <= 1e-6);
    }
  }
}

TEST_CASE("malformed MPS is rejected") {
  std::istringstream in("NAME X\nROWS\n N obj\nCOLUMNS\n x nope 1\nENDATA\n");
  CHECK_THROWS_AS(read_mps(in), ParseError);
}

TEST_CASE("solver version names the backend") {
  CHECK(solver_version().rfind("HiGHS ", 0) == 0);
}
