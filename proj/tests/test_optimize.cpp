#include <catch2/catch_amalgamated.hpp>

#include "cran/optimize.hpp"

using namespace cran;

namespace {
QuantizerB blend(const QuantizerB& a, const QuantizerB& b, double t) {
  QuantizerB out = a;
  for (std::size_t l = 0; l < a.B.size(); ++l)
    out.B[l] = (1.0 - t) * a.B[l] + t * b.B[l];
  return out;
}
}  // namespace

TEST_CASE("rate LP matches the closed-form sum rate at uniform weights") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    NetworkInstance inst = random_instance(seed, 2, 2, 1, 2, 10.0);
    QuantizerB b = random_quantizer(inst, seed + 90);
    auto cons = jd_constraints(inst, b);
    RateLpResult lp = solve_rate_lp(cons, {1.0, 1.0});
    REQUIRE(lp.ok);
    REQUIRE(lp.value ==
            Catch::Approx(jd_sum_rate_fixed_b(inst, b)).margin(1e-8));
    // Primal rates must be feasible and attain the value.
    RateFronthaulTuple pt{{lp.x(0), lp.x(1)}, inst.C};
    REQUIRE(membership(pt, cons).worst_slack >= -1e-8);
    REQUIRE(lp.x.sum() == Catch::Approx(lp.value).margin(1e-8));
  }
}

TEST_CASE("rate LP respects non-uniform weights") {
  NetworkInstance inst = random_instance(2, 2, 2, 1, 2, 10.0);
  QuantizerB b = random_quantizer(inst, 17);
  auto cons = jd_constraints(inst, b);
  RateLpResult lp = solve_rate_lp(cons, {2.0, 0.5});
  REQUIRE(lp.ok);
  // Compare against the exhaustive pentagon-vertex evaluation.
  double best = 0.0;
  for (auto& p : two_user_boundary(cons))
    best = std::max(best, 2.0 * p.first + 0.5 * p.second);
  REQUIRE(lp.value == Catch::Approx(best).margin(1e-8));
}

TEST_CASE("box projection is idempotent and restores feasibility") {
  NetworkInstance inst = random_instance(5, 2, 2, 2, 2, 10.0);
  QuantizerB b;
  b.B.assign(inst.L, 3.0 * Matrix::Identity(inst.N, inst.N));
  QuantizerB p = project_box(inst, b);
  REQUIRE(quantizer_feasible(inst, p, 1e-7));
  QuantizerB pp = project_box(inst, p);
  for (int l = 0; l < inst.L; ++l)
    REQUIRE((pp.B[l] - p.B[l]).norm() <= 1e-12 * std::max(1.0, p.B[l].norm()));
}

TEST_CASE("budget projection clips and honors the budget") {
  Eigen::VectorXd z(3);
  z << 2.0, -1.0, 3.0;
  std::vector<double> nu = {1.0, 1.0, 1.0};
  Eigen::VectorXd c = project_budget(z, nu, 4.0);
  REQUIRE(c.minCoeff() >= 0.0);
  REQUIRE(c.sum() <= 4.0 + 1e-9);
  // Inside the budget the projection is just the positive part.
  Eigen::VectorXd inside = project_budget(z, nu, 100.0);
  REQUIRE(inside(0) == 2.0);
  REQUIRE(inside(1) == 0.0);
  REQUIRE(inside(2) == 3.0);
}

TEST_CASE("value functions are concave along feasible segments") {
  NetworkInstance inst = random_instance(8, 2, 2, 1, 2, 10.0);
  QuantizerB a = random_quantizer(inst, 1, 0.1, 0.9);
  QuantizerB c = random_quantizer(inst, 2, 0.1, 0.9);
  for (double t = 0.1; t < 1.0; t += 0.1) {
    double mid = sum_rate_value_grad(inst, blend(a, c, t)).value;
    double lo = sum_rate_value_grad(inst, a).value;
    double hi = sum_rate_value_grad(inst, c).value;
    REQUIRE(mid >= (1.0 - t) * lo + t * hi - 1e-8);
    double mid2 = sd_sumfronthaul_value_grad(inst, blend(a, c, t), 3.0).value;
    double lo2 = sd_sumfronthaul_value_grad(inst, a, 3.0).value;
    double hi2 = sd_sumfronthaul_value_grad(inst, c, 3.0).value;
    REQUIRE(mid2 >= (1.0 - t) * lo2 + t * hi2 - 1e-8);
  }
}

TEST_CASE("supergradients match central finite differences") {
  NetworkInstance inst = random_instance(12, 2, 2, 1, 2, 10.0);
  QuantizerB b = random_quantizer(inst, 33, 0.3, 0.7);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto probe = [&](auto&& value_fn, const std::vector<Matrix>& gB) {
    for (int trial = 0; trial < 3; ++trial) {
      QuantizerB dir = b;
      double inner = 0.0;
      for (int l = 0; l < inst.L; ++l) {
        Matrix g(inst.N, inst.N);
        for (int i = 0; i < inst.N; ++i)
          for (int j = 0; j < inst.N; ++j)
            g(i, j) = Complex(gauss(rng), gauss(rng));
        dir.B[l] = 0.5 * (g + g.adjoint());
        inner += std::real((gB[l].adjoint() * dir.B[l]).trace());
      }
      const double h = 1e-6;
      QuantizerB bp = b, bm = b;
      for (int l = 0; l < inst.L; ++l) {
        bp.B[l] += h * dir.B[l];
        bm.B[l] -= h * dir.B[l];
      }
      double f0 = value_fn(b);
      double fwd = (value_fn(bp) - f0) / h;
      double bwd = (f0 - value_fn(bm)) / h;
      // Piecewise-smooth objective: compare only away from kinks, where the
      // one-sided derivatives agree.
      if (std::abs(fwd - bwd) >
          1e-3 * std::max({1.0, std::abs(fwd), std::abs(bwd)}))
        continue;
      double fd = 0.5 * (fwd + bwd);
      REQUIRE(fd == Catch::Approx(inner).epsilon(1e-4).margin(1e-6));
    }
  };
  probe([&](const QuantizerB& q) { return sum_rate_value_grad(inst, q).value; },
        sum_rate_value_grad(inst, b).gB);
  probe(
      [&](const QuantizerB& q) {
        return sd_sumfronthaul_value_grad(inst, q, 5.0).value;
      },
      sd_sumfronthaul_value_grad(inst, b, 5.0).gB);
  probe(
      [&](const QuantizerB& q) {
        return weighted_value_grad(inst, q, {2.0, 0.5}).value;
      },
      weighted_value_grad(inst, b, {2.0, 0.5}).gB);
}

TEST_CASE("scalar solvers agree with the zooming grid reference") {
  NetworkInstance inst = scalar_unit_instance(2.0);
  SolveOptions opt;

  SolveResult sd = maximize_sum_sd_individual(inst, opt);
  ObjectiveSpec s1{ObjectiveSpec::SdSum, {}, {}, 0.0, 0.0};
  REQUIRE(sd.value == Catch::Approx(grid_oracle(inst, s1)).margin(1e-4));
  REQUIRE(sd.converged);

  SolveResult jd = maximize_weighted_sum_jd(inst, {1.5}, opt);
  ObjectiveSpec s2{ObjectiveSpec::JdWeighted, {1.5}, {}, 0.0, 0.0};
  REQUIRE(jd.value == Catch::Approx(grid_oracle(inst, s2)).margin(1e-4));

  SolveResult sf = maximize_sum_sd_sumfronthaul(inst, 1.7, opt);
  ObjectiveSpec s3{ObjectiveSpec::SdSumFronthaul, {}, {}, 0.0, 1.7};
  REQUIRE(sf.value == Catch::Approx(grid_oracle(inst, s3)).margin(1e-4));

  SolveResult tr =
      weighted_rate_fronthaul_tradeoff(inst, {1.0}, {1.0}, 0.3, 2.0, opt);
  ObjectiveSpec s4{ObjectiveSpec::Tradeoff, {1.0}, {1.0}, 0.3, 2.0};
  REQUIRE(tr.value == Catch::Approx(grid_oracle(inst, s4)).margin(1e-4));
}

TEST_CASE("two-user solver agrees with the grid reference") {
  NetworkInstance inst = random_instance(3, 2, 1, 1, 1, 10.0);
  SolveResult jd = maximize_weighted_sum_jd(inst, {1.0, 2.0});
  ObjectiveSpec spec{ObjectiveSpec::JdWeighted, {1.0, 2.0}, {}, 0.0, 0.0};
  REQUIRE(jd.value == Catch::Approx(grid_oracle(inst, spec)).margin(1e-4));
}

TEST_CASE("degenerate objectives collapse to zero") {
  NetworkInstance inst = random_instance(6, 2, 2, 1, 1, 10.0);
  SolveResult zero_mu = maximize_weighted_sum_jd(inst, {0.0, 0.0});
  REQUIRE(zero_mu.value == Catch::Approx(0.0).margin(1e-9));

  NetworkInstance cut = inst;
  for (double& c : cut.C) c = 0.0;
  SolveResult no_fh = maximize_sum_sd_individual(cut);
  REQUIRE(no_fh.value == Catch::Approx(0.0).margin(1e-9));

  SolveResult no_budget = maximize_sum_sd_sumfronthaul(inst, 0.0);
  REQUIRE(no_budget.value == Catch::Approx(0.0).margin(1e-9));
  REQUIRE_THROWS_AS(maximize_sum_sd_sumfronthaul(inst, -1.0),
                    std::invalid_argument);
}

TEST_CASE("uniform-weight joint solver is identical to the successive solver") {
  NetworkInstance inst = random_instance(9, 2, 2, 1, 1, 10.0);
  SolveResult a = maximize_weighted_sum_jd(inst, {1.0, 1.0});
  SolveResult b = maximize_sum_sd_individual(inst);
  REQUIRE(a.value == b.value);  // same code path, bit-identical
  for (int l = 0; l < inst.L; ++l)
    REQUIRE((a.b_star.B[l] - b.b_star.B[l]).norm() == 0.0);
}

TEST_CASE("reported solutions re-evaluate to the reported value") {
  NetworkInstance inst = random_instance(10, 2, 2, 1, 1, 10.0);
  SolveResult sd = maximize_sum_sd_individual(inst);
  REQUIRE(quantizer_feasible(inst, sd.b_star, 1e-7));
  REQUIRE(jd_sum_rate_fixed_b(inst, sd.b_star) ==
          Catch::Approx(sd.value).margin(1e-8));
  double rsum = 0.0;
  for (double r : sd.point.R) rsum += r;
  REQUIRE(rsum == Catch::Approx(sd.value).margin(1e-7));
  for (double s : sd.slacks) REQUIRE(s >= -1e-8);

  SolveResult sf = maximize_sum_sd_sumfronthaul(inst, 2.5);
  double air = i_x_yhat_cond(inst, sf.b_star, full_mask(inst.K),
                             full_mask(inst.L));
  double budget = 2.5;
  for (int l = 0; l < inst.L; ++l)
    budget -= i_y_yhat_given_x(inst, sf.b_star, l);
  REQUIRE(sf.value ==
          Catch::Approx(std::max(0.0, std::min(air, budget))).margin(1e-8));
}

TEST_CASE("solver input validation") {
  NetworkInstance inst = random_instance(1, 2, 2, 1, 1, 10.0);
  REQUIRE_THROWS_AS(maximize_weighted_sum_jd(inst, {1.0}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(maximize_weighted_sum_jd(inst, {1.0, -1.0}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      weighted_rate_fronthaul_tradeoff(inst, {1.0, 1.0}, {1.0, 1.0}, -0.1, 1.0),
      std::invalid_argument);
}

TEST_CASE("trace is recorded when requested") {
  NetworkInstance inst = scalar_unit_instance(2.0);
  SolveOptions opt;
  opt.record_trace = true;
  opt.max_iters = 200;
  SolveResult res = maximize_sum_sd_individual(inst, opt);
  REQUIRE_FALSE(res.trace.empty());
  std::string csv = trace_to_csv(res.trace);
  REQUIRE(csv.find("iteration,value_bits_per_complex_dim,step") !=
          std::string::npos);
}
