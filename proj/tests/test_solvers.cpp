#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "proxctl/experiment.hpp"
#include "proxctl/metrics.hpp"
#include "proxctl/solvers.hpp"
#include "suites.hpp"

using namespace proxctl;

namespace {

ProblemInstance scalar_problem() {
  return ProblemInstance::make(Matrix::Ones(1, 1), Vector::Ones(1));
}

SolverConfig config(Algorithm a, double tau, double lambda, Index n) {
  SolverConfig c;
  c.algorithm = a;
  c.tau = tau;
  c.lambda0 = Vector::Constant(n, lambda);
  return c;
}

IterateState start(const SolverConfig& c, Index n) {
  return initial_state(c, Vector::Zero(n), c.lambda0);
}

const ProblemInstance& protocol_instance() {
  static const ProblemInstance p = generate_instance(ExperimentSpec{}, 0);
  return p;
}

class CoshSum final : public SmoothObjective {
 public:
  Index dim() const override { return 3; }
  double value(const Vector& x) const override { return x.array().cosh().sum(); }
  Vector gradient(const Vector& x) const override { return x.array().sinh().matrix(); }
};

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("algorithm names") {
    for (Algorithm a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
    CHECK(parse_algorithm("i_ista") == Algorithm::IIsta);
    CHECK(parse_algorithm("ad-fista") == Algorithm::AdFista);
    CHECK_FALSE(parse_algorithm("D-ISTA"));
    CHECK(algorithm_names() == "GRAD, ISTA, FISTA, AD-ISTA, AD-FISTA, I-ISTA");
    CHECK(parse_lambda_mode("clamp_nonnegative") == LambdaMode::ClampNonnegative);
    CHECK(parse_lambda_mode("ABS_GRADIENT") == LambdaMode::AbsGradient);
    CHECK_FALSE(parse_lambda_mode("abs"));
  }

  TEST_CASE("config validation") {
    SolverConfig c = config(Algorithm::IIsta, 0.5, 1e-3, 2);
    CHECK(validate(c, 2).empty());
    c.ki = 0.1;
    c.alpha = 0.05;
    CHECK(validate(c, 2).size() == 1);
    c.ki = -0.1;
    CHECK(validate(c, 2).size() == 1);
    c.alpha = 1.0;
    CHECK_THROWS_AS(validate(c, 2), std::invalid_argument);
    c = config(Algorithm::Ista, 0.0, 1e-3, 2);
    CHECK_THROWS_AS(validate(c, 2), std::invalid_argument);
    c = config(Algorithm::Ista, 1.0, -1e-3, 2);
    CHECK_THROWS_AS(validate(c, 2), std::invalid_argument);
    c = config(Algorithm::Ista, 1.0, 1e-3, 3);
    CHECK_THROWS_AS(validate(c, 2), DimensionError);
    c = config(Algorithm::AdIsta, 1.0, 1e-3, 2);
    c.epsilon = 0.0;
    CHECK_THROWS_AS(validate(c, 2), std::invalid_argument);
    c = config(Algorithm::Ista, 1.0, 1e-3, 2);
    c.stop_tol = 0.0;
    CHECK_THROWS_AS(validate(c, 2), std::invalid_argument);
  }

  TEST_CASE("GRAD step") {
    const ProblemInstance s = scalar_problem();
    const SolverConfig c = config(Algorithm::Grad, 1.0, 0.0, 1);
    CHECK(step_grad(s, start(c, 1), c).x(0) == 1.0);

    IterateState at_min = start(c, 1);
    at_min.x(0) = 1.0;
    CHECK(step_grad(s, at_min, c).x(0) == 1.0);

    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 2;
    a(1, 1) = 1;
    Vector y(2);
    y << 2, 1;
    const ProblemInstance p = ProblemInstance::make(a, y);
    const SolverConfig c2 = config(Algorithm::Grad, 0.25, 0.0, 2);
    const IterateState next = step_grad(p, start(c2, 2), c2);
    CHECK(next.x(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(next.x(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(next.k == 1);
    CHECK(next.last_step_norm == doctest::Approx(std::sqrt(1.0625)));
  }

  TEST_CASE("ISTA step") {
    const ProblemInstance s = scalar_problem();
    const SolverConfig c = config(Algorithm::Ista, 1.0, 0.1, 1);
    IterateState st = step_ista(s, start(c, 1), c);
    CHECK(st.x(0) == doctest::Approx(0.9).epsilon(1e-15));
    st = step_ista(s, st, c);
    CHECK(st.x(0) == doctest::Approx(0.9).epsilon(1e-15));

    const SolverConfig huge = config(Algorithm::Ista, 1.0, 10.0, 1);
    IterateState z = step_ista(s, start(huge, 1), huge);
    CHECK(z.x(0) == 0.0);
    CHECK(step_ista(s, z, huge).x(0) == 0.0);
  }

  TEST_CASE("ISTA with zero weights equals GRAD") {
    const auto r = suites::ista_zero_lambda_matches_grad();
    INFO(r.detail);
    CHECK(r.passed);
  }

  TEST_CASE("FISTA momentum sequence and first step") {
    const ProblemInstance& p = protocol_instance();
    const SolverConfig cf = config(Algorithm::Fista, 1.0 / p.beta(), 1e-3, p.cols());
    const SolverConfig ci = config(Algorithm::Ista, 1.0 / p.beta(), 1e-3, p.cols());
    IterateState f = start(cf, p.cols());
    CHECK(f.momentum_t == 1.0);
    f = step_fista(p, f, cf);
    CHECK(f.x == step_ista(p, start(ci, p.cols()), ci).x);
    CHECK(f.momentum_t == doctest::Approx(1.6180339887).epsilon(1e-10));
    f = step_fista(p, f, cf);
    CHECK(f.momentum_t == doctest::Approx(2.1935270853).epsilon(1e-10));
  }

  TEST_CASE("FISTA with zero weights matches an independent accelerated gradient") {
    std::mt19937_64 gen(31);
    const Matrix a = oracle::gaussian_matrix(gen, 40, 30, 1.0 / std::sqrt(40.0));
    const ProblemInstance p = ProblemInstance::make(a, oracle::gaussian_vector(gen, 40));
    const double tau = 1.0 / p.beta();
    const SolverConfig c = config(Algorithm::Fista, tau, 0.0, 30);
    const auto ref = oracle::nesterov_trajectory(a, p.y(), tau, Vector::Zero(30), 300);
    IterateState s = start(c, 30);
    double worst = 0.0;
    for (int k = 1; k <= 300; ++k) {
      s = step_fista(p, s, c);
      worst = std::max(worst, (s.x - ref[k]).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("log-penalty reweighting") {
    Vector l0 = Vector::Constant(3, 3e-3);
    Vector x(3);
    x << 0.0, 1e-2, 1e12;
    const Vector w = log_penalty_weights(l0, x, 1e-2);
    CHECK(w(0) == 3e-3);
    CHECK(w(1) == doctest::Approx(1.5e-3).epsilon(1e-14));
    CHECK(w(2) < 1e-16);
  }

  TEST_CASE("AD-ISTA step uses weights from the current iterate") {
    const ProblemInstance s = scalar_problem();
    SolverConfig c = config(Algorithm::AdIsta, 1.0, 0.1, 1);
    c.epsilon = 1.0;
    IterateState st = start(c, 1);
    CHECK(st.lambda(0) == 0.1);
    st = step_ad_ista(s, st, c);
    CHECK(st.x(0) == doctest::Approx(0.9).epsilon(1e-15));  // weights λ₀ at x = 0
    CHECK(st.lambda(0) == doctest::Approx(0.1 / 1.9).epsilon(1e-15));
    st = step_ad_ista(s, st, c);
    CHECK(st.x(0) == doctest::Approx(1.0 - 0.1 / 1.9).epsilon(1e-14));
  }

  TEST_CASE("AD-FISTA") {
    const ProblemInstance& p = protocol_instance();
    const double tau = 1.0 / p.beta();
    SolverConfig ad = config(Algorithm::AdFista, tau, 3e-3, p.cols());
    SolverConfig adi = ad;
    adi.algorithm = Algorithm::AdIsta;
    CHECK(step_ad_fista(p, start(ad, p.cols()), ad).x == step_ad_ista(p, start(adi, p.cols()), adi).x);

    // ε → ∞ removes the reweighting.
    ad.epsilon = 1e30;
    const SolverConfig fista = config(Algorithm::Fista, tau, 3e-3, p.cols());
    IterateState a = start(ad, p.cols()), b = start(fista, p.cols());
    for (int k = 0; k < 100; ++k) {
      a = step_ad_fista(p, a, ad);
      b = step_fista(p, b, fista);
    }
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("AD-FISTA stabilizes the support sooner than AD-ISTA") {
    const ProblemInstance& p = protocol_instance();
    const Vector x0 = Vector::Zero(p.cols());
    auto stab = [&](Algorithm a) {
      SolverRecipe r;
      r.algorithm = a;
      const SolverConfig c = default_solver_config(r, p, x0);
      return summarize(run(p, c, x0).trace, c.stop_tol, p.cols()).support_stab_iter.value();
    };
    CHECK(stab(Algorithm::AdFista) < stab(Algorithm::AdIsta));
  }

  TEST_CASE("I-ISTA weight update") {
    const ProblemInstance s = scalar_problem();
    SolverConfig c = config(Algorithm::IIsta, 0.5, 0.2, 1);
    c.alpha = 0.05;
    IterateState at_min = initial_state(c, Vector::Ones(1), c.lambda0);
    CHECK(step_i_ista(s, at_min, c).lambda(0) == doctest::Approx(0.95 * 0.2).epsilon(1e-15));

    IterateState eq = initial_state(c, Vector::Ones(1), Vector::Zero(1));
    const IterateState next = step_i_ista(s, eq, c);
    CHECK(next.x == eq.x);
    CHECK(next.lambda == eq.lambda);

    // Gradient at 0 is −1: ABS_GRADIENT adds k_i, CLAMP_NONNEGATIVE subtracts and clamps.
    c.ki = 0.5;
    c.alpha = 0.9;
    IterateState z = initial_state(c, Vector::Zero(1), Vector::Constant(1, 0.2));
    CHECK(step_i_ista(s, z, c).lambda(0) == doctest::Approx(0.1 * 0.2 + 0.5));
    c.lambda_mode = LambdaMode::ClampNonnegative;
    CHECK(step_i_ista(s, z, c).lambda(0) == 0.0);
  }

  TEST_CASE("scalar I-ISTA converges to the unbiased minimizer") {
    const ProblemInstance s = scalar_problem();
    for (LambdaMode mode : {LambdaMode::AbsGradient, LambdaMode::ClampNonnegative}) {
      SolverConfig c = config(Algorithm::IIsta, 0.5, 1e-3, 1);
      c.ki = 1e-3;
      c.alpha = 0.05;
      c.stop_tol = 1e-14;
      c.lambda_mode = mode;
      const RunResult r = run(s, c, Vector::Zero(1));
      CHECK(r.converged);
      CHECK(std::abs(r.final_x(0) - 1.0) <= 1e-8);
      CHECK(std::abs(r.final_lambda(0)) <= 1e-10);
    }
  }

  TEST_CASE("I-ISTA weights stay nonnegative") {
    const ProblemInstance& p = protocol_instance();
    const Vector x0 = Vector::Zero(p.cols());
    for (LambdaMode mode : {LambdaMode::AbsGradient, LambdaMode::ClampNonnegative}) {
      SolverRecipe r;
      r.algorithm = Algorithm::IIsta;
      r.lambda_mode = mode;
      SolverConfig c = default_solver_config(r, p, x0);
      c.record_trace = false;
      double lowest = 1.0;
      run(p, c, x0, [&](const IterateState& s) { lowest = std::min(lowest, s.lambda.minCoeff()); });
      CHECK(lowest >= 0.0);
    }
  }

  TEST_CASE("I-ISTA leaves an equilibrium in place") {
    std::mt19937_64 gen(32);
    const Matrix a = oracle::gaussian_matrix(gen, 30, 20, 1.0 / std::sqrt(30.0));
    Vector xt = Vector::Zero(20);
    xt(3) = 1.5;
    xt(11) = -1.2;
    const ProblemInstance p = ProblemInstance::make(a, a * xt, xt);
    SolverConfig c = config(Algorithm::IIsta, 1.0 / p.beta(), 0.0, 20);
    const IterateState eq = initial_state(c, xt, Vector::Zero(20));
    const IterateState next = step_i_ista(p, eq, c);
    CHECK((next.x - xt).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(next.lambda.cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("zero weights and zero gain reduce every proximal method to its smooth counterpart") {
    const ProblemInstance& p = protocol_instance();
    const Vector x0 = Vector::Zero(p.cols());
    auto path = [&](SolverConfig c) {
      std::vector<Vector> xs;
      c.max_iters = 300;
      c.record_trace = false;
      run(p, c, x0, [&](const IterateState& s) { xs.push_back(s.x); });
      return xs;
    };
    const double tau = 1.0 / p.beta();
    const auto grad = path(config(Algorithm::Grad, tau, 0.0, p.cols()));
    SolverConfig ii = config(Algorithm::IIsta, tau, 0.0, p.cols());
    ii.ki = 0.0;
    const auto iista = path(ii);
    REQUIRE(grad.size() == iista.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      worst = std::max(worst, (grad[k] - iista[k]).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-14);

    const auto ref = oracle::nesterov_trajectory(p.a(), p.y(), tau, x0, 300);
    const auto fista = path(config(Algorithm::Fista, tau, 0.0, p.cols()));
    worst = 0.0;
    for (std::size_t k = 0; k < fista.size(); ++k) {
      worst = std::max(worst, (fista[k] - ref[k + 1]).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("ISTA decreases the composite objective") {
    const ProblemInstance& p = protocol_instance();
    const SolverConfig c = config(Algorithm::Ista, 1.0 / p.beta(), 1e-3, p.cols());
    IterateState s = start(c, p.cols());
    double prev = composite_objective(p, s.x, c.lambda0);
    for (int k = 0; k < 500; ++k) {
      s = step_ista(p, s, c);
      const double cur = composite_objective(p, s.x, c.lambda0);
      REQUIRE(cur <= prev + 1e-12);
      prev = cur;
    }
  }

  TEST_CASE("run stopping rules") {
    const ProblemInstance& p = protocol_instance();
    const Vector x0 = Vector::Zero(p.cols());
    SolverConfig c = config(Algorithm::Ista, 1.0 / p.beta(), 1e-3, p.cols());
    c.stop_tol = 1e10;
    RunResult r = run(p, c, x0);
    CHECK(r.iterations == 1);
    CHECK(r.converged);
    CHECK(r.trace.size() == 2);

    c.stop_tol = 1e-10;
    c.max_iters = 0;
    r = run(p, c, x0);
    CHECK(r.iterations == 0);
    CHECK_FALSE(r.converged);
    CHECK(r.final_x == x0);
    CHECK(r.trace.size() == 1);

    c.max_iters = 50'000;
    r = run(p, c, x0);
    CHECK(r.converged);
    CHECK(r.trace.back().step_norm < c.stop_tol);
    CHECK(r.trace.size() == r.iterations + 1);
  }

  TEST_CASE("observer sees every iteration") {
    const ProblemInstance& p = protocol_instance();
    SolverConfig c = config(Algorithm::Grad, 1.0 / p.beta(), 0.0, p.cols());
    c.max_iters = 25;
    std::vector<std::size_t> seen;
    run(p, c, Vector::Zero(p.cols()), [&](const IterateState& s) { seen.push_back(s.k); });
    REQUIRE(seen.size() == 25);
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i + 1);
  }

  TEST_CASE("I-ISTA defaults on a protocol-sized instance") {
    const ProblemInstance& p = protocol_instance();
    const Vector x0 = Vector::Zero(p.cols());
    SolverRecipe r;
    r.algorithm = Algorithm::IIsta;
    const RunResult res = run(p, default_solver_config(r, p, x0), x0);
    CHECK(res.converged);
    CHECK(res.iterations >= 426.33 / 2);
    CHECK(res.iterations <= 426.33 * 2);
  }

  TEST_CASE("divergence is reported") {
    const ProblemInstance& p = protocol_instance();
    SolverConfig c = config(Algorithm::Grad, 3.0 / p.beta(), 0.0, p.cols());
    try {
      run(p, c, Vector::Zero(p.cols()));
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.algorithm() == Algorithm::Grad);
      CHECK(e.iteration() > 0);
    }

    SolverConfig ii = config(Algorithm::IIsta, 2.5 / p.beta(), 0.0, p.cols());
    CHECK_THROWS_AS(run(p, ii, Vector::Zero(p.cols())), DivergenceError);
  }

  TEST_CASE("replay is bitwise deterministic") {
    const ProblemInstance& p = protocol_instance();
    const Vector x0 = Vector::Zero(p.cols());
    for (Algorithm a : kAllAlgorithms) {
      SolverRecipe r;
      r.algorithm = a;
      SolverConfig c = default_solver_config(r, p, x0);
      c.max_iters = 400;
      CHECK(run(p, c, x0).trace == run(p, c, x0).trace);
    }
  }

  TEST_CASE("generic objective") {
    const CoshSum f;
    SolverConfig c = config(Algorithm::Grad, 0.5, 0.0, 3);
    const RunResult r = iterate(f, c, Vector::Ones(3), c.lambda0);
    CHECK(r.converged);
    CHECK(r.final_x.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.trace.empty());
  }
}
