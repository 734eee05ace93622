#include <catch2/catch_amalgamated.hpp>

#include "cran/gaussinfo.hpp"

using namespace cran;

namespace {
const double kLog2_1p5 = std::log2(1.5);

QuantizerB half_b(const NetworkInstance& inst) {
  return half_inverse_noise_quantizer(inst);
}
}  // namespace

TEST_CASE("scalar joint covariance at unit quantization noise") {
  NetworkInstance inst = scalar_unit_instance();
  QuantizerB b = half_b(inst);  // B = 1/2 <=> Q = 1
  JointCovariance jc = joint_covariance(inst, b);
  Matrix expect(2, 2);
  expect << 1.0, 1.0, 1.0, 3.0;
  REQUIRE((jc.cov - expect).norm() < 1e-12);
}

TEST_CASE("zero input power gives block-diagonal joint covariance") {
  NetworkInstance inst = random_instance(1, 2, 2, 1, 2, 10.0);
  for (auto& k : inst.Kx) k.setZero();
  QuantizerB b = half_b(inst);
  JointCovariance jc = joint_covariance(inst, b);
  for (int k = 0; k < inst.K; ++k)
    for (int l = 0; l < inst.L; ++l) {
      Block xb{BlockKind::X, k}, yb{BlockKind::YHat, l};
      Matrix cross = jc.cov.block(jc.offset(xb), jc.offset(yb), inst.M, inst.N);
      REQUIRE(cross.norm() < 1e-12);
    }
  // Each quantized block equals Sigma + Q.
  for (int l = 0; l < inst.L; ++l) {
    Block yb{BlockKind::YHat, l};
    Matrix blk = jc.cov.block(jc.offset(yb), jc.offset(yb), inst.N, inst.N);
    Matrix expect = inst.Sigma[l] + q_from_b(b.B[l], inst.Sigma[l]);
    REQUIRE((blk - expect).norm() < 1e-10);
  }
}

TEST_CASE("joint covariance of a random instance is PSD") {
  NetworkInstance inst = random_instance(4, 2, 2, 2, 2, 10.0);
  QuantizerB b = random_quantizer(inst, 9);
  JointCovariance jc = joint_covariance(inst, b);
  REQUIRE(is_psd(jc.cov, 1e-9));
  JointCovariance ext = joint_covariance_extended(inst, b);
  REQUIRE(is_psd(ext.cov, 1e-9));
}

TEST_CASE("scalar mutual information I(X;Yhat) = log2 1.5") {
  NetworkInstance inst = scalar_unit_instance();
  QuantizerB b = half_b(inst);
  JointCovariance jc = joint_covariance(inst, b);
  double v = cond_mutual_info(jc, x_blocks(1), yhat_blocks(1), {});
  REQUIRE(v == Catch::Approx(kLog2_1p5).margin(1e-12));
}

TEST_CASE("independent blocks have zero mutual information") {
  NetworkInstance inst = random_instance(1, 2, 2, 1, 2, 10.0);
  for (auto& k : inst.Kx) k.setZero();
  JointCovariance jc = joint_covariance(inst, half_b(inst));
  double v = cond_mutual_info(jc, x_blocks(full_mask(inst.K)),
                              yhat_blocks(full_mask(inst.L)), {});
  REQUIRE(std::abs(v) < 1e-9);
}

TEST_CASE("mutual information is monotone in the observation set") {
  NetworkInstance inst = random_instance(6, 2, 2, 1, 2, 10.0);
  JointCovariance jc = joint_covariance(inst, half_b(inst));
  double both = cond_mutual_info(jc, x_blocks(3), yhat_blocks(3), {});
  double one = cond_mutual_info(jc, x_blocks(3), yhat_blocks(1), {});
  REQUIRE(both >= one - 1e-10);
}

TEST_CASE("mutual information is symmetric in its arguments") {
  NetworkInstance inst = random_instance(8, 2, 2, 2, 2, 10.0);
  JointCovariance jc = joint_covariance(inst, random_quantizer(inst, 3));
  double ab = cond_mutual_info(jc, x_blocks(1), yhat_blocks(3), x_blocks(2));
  double ba = cond_mutual_info(jc, yhat_blocks(3), x_blocks(1), x_blocks(2));
  REQUIRE(ab == Catch::Approx(ba).margin(1e-8));
}

TEST_CASE("quantizer fronthaul overhead closed form") {
  NetworkInstance inst = scalar_unit_instance();
  SECTION("unit quantization noise gives 1 bit") {
    REQUIRE(i_y_yhat_given_x(inst, half_b(inst), 0) ==
            Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("zero forwarding gives 0 bits") {
    REQUIRE(i_y_yhat_given_x(inst, zero_quantizer(inst), 0) ==
            Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("upper endpoint reports the infinity sentinel") {
    REQUIRE(i_y_yhat_given_x(inst, uncompressed_quantizer(inst), 0) == kInf);
  }
}

TEST_CASE("two-antenna overhead is additive over dimensions") {
  NetworkInstance inst = random_instance(2, 1, 1, 1, 2, 0.0);
  QuantizerB b = half_b(inst);  // Q = Sigma = I2
  REQUIRE(i_y_yhat_given_x(inst, b, 0) == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("air-interface information closed form on the scalar instance") {
  NetworkInstance inst = scalar_unit_instance();
  QuantizerB b = half_b(inst);
  SECTION("single BS observation") {
    REQUIRE(i_x_yhat_cond(inst, b, 1, 1) ==
            Catch::Approx(kLog2_1p5).margin(1e-12));
  }
  SECTION("no observations") {
    REQUIRE(i_x_yhat_cond(inst, b, 1, 0) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("empty user set is rejected") {
    REQUIRE_THROWS_AS(i_x_yhat_cond(inst, b, 0, 1), std::invalid_argument);
  }
}

TEST_CASE("closed form matches the Schur-complement path") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    NetworkInstance inst = random_instance(seed, 2, 2, 2, 2, 10.0);
    QuantizerB b = random_quantizer(inst, seed + 100);
    JointCovariance jc = joint_covariance(inst, b);
    Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
    for (Mask T = 1; T <= allK; ++T)
      for (Mask Sc = 0; Sc <= allL; ++Sc) {
        double closed = i_x_yhat_cond(inst, b, T, Sc);
        double schur =
            cond_mutual_info(jc, x_blocks(T), yhat_blocks(Sc), x_blocks(allK & ~T));
        REQUIRE(closed == Catch::Approx(schur).margin(1e-8));
      }
  }
}

TEST_CASE("rank-deficient inputs are handled by the symmetrized form") {
  NetworkInstance inst = random_instance(9, 1, 1, 2, 2, 10.0);
  inst.Kx[0](1, 1) = 0.0;  // second transmit dimension silent
  inst.Kx[0](0, 1) = inst.Kx[0](1, 0) = 0.0;
  QuantizerB b = half_b(inst);
  double v = i_x_yhat_cond(inst, b, 1, 1);
  REQUIRE(std::isfinite(v));
  REQUIRE(v >= 0.0);
}

TEST_CASE("fronthaul usage on the scalar instance") {
  NetworkInstance inst = scalar_unit_instance();
  REQUIRE(sd_fronthaul_usage(inst, half_b(inst), 1) ==
          Catch::Approx(std::log2(3.0)).margin(1e-12));
  REQUIRE(sd_fronthaul_usage(inst, zero_quantizer(inst), 1) ==
          Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("fronthaul usage matches the extended-covariance evaluation") {
  NetworkInstance inst = random_instance(12, 2, 2, 1, 2, 10.0);
  QuantizerB b = random_quantizer(inst, 5);
  JointCovariance ext = joint_covariance_extended(inst, b);
  Mask allL = full_mask(inst.L);
  for (Mask S = 1; S <= allL; ++S) {
    double closed = sd_fronthaul_usage(inst, b, S);
    double direct =
        cond_mutual_info(ext, y_blocks(S), yhat_blocks(S), yhat_blocks(allL & ~S));
    REQUIRE(closed == Catch::Approx(direct).margin(1e-8));
  }
}

TEST_CASE("usage decomposition identity holds on random instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    NetworkInstance inst = random_instance(seed, 2, 3, 1, 2, 10.0);
    QuantizerB b = random_quantizer(inst, seed + 50);
    Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
    JointCovariance jc = joint_covariance(inst, b);
    for (Mask S = 1; S <= allL; ++S) {
      double lhs = sd_fronthaul_usage(inst, b, S);
      double rhs = cond_mutual_info(jc, x_blocks(allK), yhat_blocks(allL), {}) -
                   ((allL & ~S)
                        ? cond_mutual_info(jc, x_blocks(allK),
                                           yhat_blocks(allL & ~S), {})
                        : 0.0);
      for (int l : mask_indices(S)) rhs += i_y_yhat_given_x(inst, b, l);
      REQUIRE(lhs == Catch::Approx(rhs).margin(1e-8));
    }
  }
}

TEST_CASE("air-interface information is Loewner-monotone in the quantizer") {
  NetworkInstance inst = random_instance(21, 2, 2, 1, 2, 10.0);
  QuantizerB lo = random_quantizer(inst, 1, 0.05, 0.40);
  QuantizerB hi = lo;
  for (auto& m : hi.B) m += 0.2 * Matrix::Identity(inst.N, inst.N);
  REQUIRE(quantizer_feasible(inst, hi, 1e-6));
  Mask allL = full_mask(inst.L);
  for (Mask T = 1; T <= full_mask(inst.K); ++T)
    for (Mask Sc = 0; Sc <= allL; ++Sc)
      REQUIRE(i_x_yhat_cond(inst, lo, T, Sc) <=
              i_x_yhat_cond(inst, hi, T, Sc) + 1e-9);
}

TEST_CASE("observation-set information is submodular") {
  NetworkInstance inst = random_instance(31, 2, 3, 1, 2, 10.0);
  QuantizerB b = random_quantizer(inst, 2);
  Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
  auto info = [&](Mask S) {
    return S ? i_x_yhat_cond(inst, b, allK, S) : 0.0;
  };
  for (Mask S = 0; S <= allL; ++S)
    for (Mask T = 0; T <= allL; ++T)
      REQUIRE(info(S) + info(T) >= info(S | T) + info(S & T) - 1e-9);
}
