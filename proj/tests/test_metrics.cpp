#include <doctest.h>

#include <random>
#include <sstream>

#include "proxctl/experiment.hpp"
#include "proxctl/metrics.hpp"
#include "tempdir.hpp"

using namespace proxctl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Rows with step norms and support signatures given per iteration.
IterationTrace synthetic(std::size_t len, std::size_t conv_at, std::size_t stable_from) {
  IterationTrace t;
  for (std::size_t k = 0; k < len; ++k) {
    TraceRow r;
    r.k = k;
    r.step_norm = k == 0 ? 0.0 : (k >= conv_at ? 1e-11 : 1.0);
    r.l0 = k >= stable_from ? 10 : 10 + (k % 3) + 1;
    r.support_error = k >= stable_from ? 0 : 3;
    t.push_back(r);
  }
  return t;
}

TraceRow random_row(std::mt19937_64& gen, std::size_t k) {
  std::uniform_real_distribution<double> u(-30, 30);
  auto real = [&] { return std::ldexp(std::abs(u(gen)) / 30.0, static_cast<int>(u(gen))); };
  TraceRow r;
  r.k = k;
  r.residual = real();
  if (k % 7 != 3) r.rel_error = real();
  r.l1 = real();
  r.l0 = gen() % 201;
  if (k % 5 != 1) r.support_error = gen() % 201;
  r.lambda_l1 = real();
  r.step_norm = real();
  return r;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("support") {
    CHECK(support(vec({1, 0, -2}), 0.0) == std::vector<Index>{0, 2});
    CHECK(support(vec({1e-9, 1}), 1e-6) == std::vector<Index>{1});
    CHECK_THROWS_AS(support(vec({1}), -1.0), std::invalid_argument);
  }

  TEST_CASE("support error and false positives") {
    const Vector xt = vec({1, 0, 0});
    CHECK(support_error(xt, xt, 0.0) == 0);
    CHECK(support_error(Vector::Zero(3), xt, 0.0) == 1);
    CHECK(support_error(vec({1, 1, 0}), xt, 0.0) == 1);
    CHECK(false_positives(vec({1, 1, 1e-9}), xt, 1e-6) == 1);
    CHECK(false_positives(vec({0, 0, 0}), xt, 0.0) == 0);

    Vector big = Vector::Zero(200);
    for (int i = 0; i < 10; ++i) big(i * 7) = 1.5;
    CHECK(support_error(Vector::Zero(200), big, 0.0) == 10);

    std::mt19937_64 gen(41);
    std::bernoulli_distribution coin(0.3);
    for (int t = 0; t < 200; ++t) {
      Vector a = Vector::Zero(40), b = Vector::Zero(40);
      for (Index i = 0; i < 40; ++i) {
        if (coin(gen)) a(i) = 1.0;
        if (coin(gen)) b(i) = -2.0;
      }
      REQUIRE(support_error(a, b, 0.0) == support_error(b, a, 0.0));
      REQUIRE(support_error(a, a, 0.5) == 0);
    }
    CHECK_THROWS_AS(support_error(vec({1}), xt, 0.0), DimensionError);
  }

  TEST_CASE("ISTA iterates have exact zeros") {
    const ProblemInstance p = generate_instance(ExperimentSpec{}, 0);
    const Vector x0 = Vector::Zero(p.cols());
    SolverRecipe r;
    r.algorithm = Algorithm::Ista;
    SolverConfig c = default_solver_config(r, p, x0);
    bool all_match = true;
    c.max_iters = 300;
    run(p, c, x0, [&](const IterateState& s) {
      all_match = all_match && support(s.x, 0.0).size() == norms(s.x).l0;
    });
    CHECK(all_match);
    c.max_iters = 50'000;
    CHECK(run(p, c, x0).trace.back().l0 == 10);
  }

  TEST_CASE("summaries") {
    IterationTrace fixed = synthetic(20, 15, 0);
    RunSummary s = summarize(fixed, 1e-10, 200);
    CHECK(s.support_stab_iter == 0u);
    CHECK(s.convergence_iter == 15u);
    CHECK(s.converged);
    CHECK(s.final_row->k == 19);

    s = summarize(synthetic(487, 486, 382), 1e-10, 200);
    CHECK(s.convergence_iter == 486u);
    CHECK(s.support_stab_iter == 382u);
    CHECK(*s.support_stab_iter <= *s.convergence_iter);

    // Dense final iterate: no stabilization to report.
    IterationTrace dense = synthetic(30, 1000, 0);
    for (TraceRow& r : dense) r.l0 = 200;
    s = summarize(dense, 1e-10, 200);
    CHECK_FALSE(s.converged);
    CHECK_FALSE(s.convergence_iter);
    CHECK_FALSE(s.support_stab_iter);

    CHECK(summarize({}, 1e-10, 200) == RunSummary{});
    const RunSummary d = diverged_summary(17);
    CHECK(d.diverged);
    CHECK(d.iterations == 17);
  }

  TEST_CASE("GRAD at m = 150 reaches a dense iterate") {
    ExperimentSpec spec;
    spec.m = 150;
    const ProblemInstance p = generate_instance(spec, 0);
    const Vector x0 = Vector::Zero(p.cols());
    SolverRecipe r;
    r.algorithm = Algorithm::Grad;
    r.max_iters = 3000;
    const SolverConfig c = default_solver_config(r, p, x0);
    const RunSummary s = summarize(run(p, c, x0).trace, c.stop_tol, 200);
    CHECK_FALSE(s.support_stab_iter);
  }

  TEST_CASE("aggregation") {
    RunSummary a, b;
    a.convergence_iter = 10;
    a.support_stab_iter = 2;
    b.convergence_iter = 20;
    b.support_stab_iter = 4;
    AggregateStats st = aggregate({a, b}, 100);
    CHECK(*st.conv_mean == 15.0);
    CHECK(*st.supp_stab_mean == 3.0);
    CHECK(st.conv_defined == 2);

    st = aggregate({a}, 100);
    CHECK(*st.conv_mean == 10.0);
    CHECK(*st.supp_stab_mean == 2.0);

    RunSummary capped;  // hit the cap, no stabilization
    st = aggregate({a, capped, diverged_summary(3)}, 100);
    CHECK(st.runs == 3);
    CHECK(st.divergent == 1);
    CHECK(st.non_converged == 1);
    CHECK(*st.conv_mean == 10.0);
    CHECK(*st.conv_mean_capped == 55.0);
    CHECK(st.supp_stab_defined == 1);

    st = aggregate({diverged_summary(1)}, 100);
    CHECK_FALSE(st.conv_mean);
    CHECK_FALSE(st.conv_mean_capped);
  }

  TEST_CASE("trace CSV round trips") {
    std::ostringstream empty;
    write_trace({}, empty);
    CHECK(empty.str() == std::string(kTraceHeader) + "\n");
    std::istringstream back(empty.str());
    CHECK(read_trace(back).empty());

    std::mt19937_64 gen(42);
    IterationTrace one{random_row(gen, 0)};
    std::stringstream ss;
    write_trace(one, ss);
    CHECK(read_trace(ss) == one);

    IterationTrace many;
    for (std::size_t k = 0; k < 50'000; ++k) many.push_back(random_row(gen, k));
    testing::TempDir tmp("trace");
    write_trace(many, tmp / "t.csv");
    const IterationTrace loaded = read_trace(tmp / "t.csv");
    CHECK(loaded == many);
    CHECK(summarize(loaded, 1e-10, 200) == summarize(many, 1e-10, 200));
  }

  TEST_CASE("trace parse errors carry the line number") {
    const std::string header = std::string(kTraceHeader) + "\n";
    auto line_of = [](const std::string& text) -> std::size_t {
      std::istringstream in(text);
      try {
        read_trace(in);
      } catch (const TraceParseError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of("k,residual\n") == 1);
    CHECK(line_of(header + "0,1,1,0,0,0,0,0\n1,abc,1,0,0,0,0,0\n") == 3);
    CHECK(line_of(header + "0,1,1,0,0,0,0\n") == 2);
    CHECK(line_of(header + "0,1,1,0,-1,0,0,0\n") == 2);
    CHECK(line_of(header + "0,1,,0,0,,0,0\n") == 0);
    CHECK_THROWS_AS(read_trace(std::filesystem::path("/nonexistent/trace.csv")), std::runtime_error);
  }
}
