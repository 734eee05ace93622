#include <catch2/catch_amalgamated.hpp>

#include "cran/gap.hpp"

using namespace cran;

namespace {
const double kLog2_1p5 = std::log2(1.5);
}

TEST_CASE("overhead at the background-noise point is exactly N bits") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NetworkInstance inst = random_instance(seed, 2, 2, 2, 2, 17.0);
    QuantizerB half = half_inverse_noise_quantizer(inst);
    for (int l = 0; l < inst.L; ++l)
      REQUIRE(i_y_yhat_given_x(inst, half, l) ==
              Catch::Approx((double)inst.N).margin(1e-9));
  }
}

TEST_CASE("scalar joint-decoding gap certificate") {
  NetworkInstance inst = scalar_unit_instance(2.0);
  GapCertificate cert = jd_gap_certificate(inst);
  REQUIRE(cert.pass);
  REQUIRE(cert.eta == 2.0);
  REQUIRE(cert.entries.size() == 2);
  // Pure air cut: log2(2) - log2(1.5).
  REQUIRE(cert.entries[0].gap ==
          Catch::Approx(1.0 - kLog2_1p5).margin(1e-12));
  REQUIRE(cert.entries[0].per_cut_bound == 1.0);
  // Pure fronthaul cut: the 1-bit quantization overhead.
  REQUIRE(cert.entries[1].gap == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(cert.entries[1].per_cut_bound == 2.0);
  REQUIRE(cert.worst_gap == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("scalar sum-rate gap certificate") {
  NetworkInstance inst = scalar_unit_instance(2.0);
  GapCertificate cert = sd_sum_gap_certificate(inst);
  REQUIRE(cert.pass);
  REQUIRE(cert.eta == 2.0);
  REQUIRE(cert.worst_gap == Catch::Approx(1.0 - kLog2_1p5).margin(1e-12));
}

TEST_CASE("scalar budgeted gap certificate") {
  NetworkInstance inst = scalar_unit_instance(2.0);
  GapCertificate cert = gsd_sumfronthaul_gap_certificate(inst, 2.0);
  REQUIRE(cert.pass);
  REQUIRE(cert.worst_gap == Catch::Approx(1.0 - kLog2_1p5).margin(1e-12));
  REQUIRE_THROWS_AS(gsd_sumfronthaul_gap_certificate(inst, -1.0),
                    std::invalid_argument);
}

TEST_CASE("gap certificates hold across dimensions and SNRs") {
  int idx = 0;
  for (int K : {1, 2})
    for (int L : {1, 2, 3})
      for (int N : {1, 2})
        for (double snr : {0.0, 10.0, 40.0}) {
          NetworkInstance inst =
              random_instance(1000 + idx++, K, L, 1, N, snr);
          REQUIRE(jd_gap_certificate(inst).pass);
          REQUIRE(sd_sum_gap_certificate(inst).pass);
          REQUIRE(gsd_sumfronthaul_gap_certificate(inst, 3.0).pass);
          REQUIRE(gsd_sumfronthaul_gap_certificate(inst, 100.0).pass);
        }
}

TEST_CASE("gap certificate is uniform in SNR on a fixed channel shape") {
  for (double snr : {-10.0, 0.0, 20.0, 40.0}) {
    NetworkInstance inst = random_instance(7, 2, 2, 2, 2, snr);
    GapCertificate cert = jd_gap_certificate(inst);
    REQUIRE(cert.pass);
    REQUIRE(cert.worst_gap <= cert.eta + 1e-9);
  }
}

TEST_CASE("achievable side of the gap lies in the region") {
  // The rates used on the achievable side of the sum gap must actually be
  // attainable at the background-noise quantizer.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NetworkInstance inst = random_instance(seed, 2, 2, 1, 2, 10.0);
    QuantizerB half = half_inverse_noise_quantizer(inst);
    double r = jd_sum_rate_fixed_b(inst, half);
    auto cons = jd_constraints(inst, half);
    RateFronthaulTuple pt{{r / 2, r / 2}, inst.C};
    double worst = kInf;
    for (const auto& c : cons) {
      if (c.T != full_mask(inst.K)) continue;
      worst = std::min(worst, c.rhs - r);
    }
    REQUIRE(worst >= -1e-9);
    (void)pt;
  }
}

TEST_CASE("gap CSV is labeled and complete") {
  NetworkInstance inst = scalar_unit_instance(2.0);
  GapCertificate cert = jd_gap_certificate(inst);
  std::string csv = gap_to_csv(cert);
  REQUIRE(csv.find("T_bitmask,S_bitmask,gap_bits_per_user,per_cut_bound,eta") !=
          std::string::npos);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') ==
          (long)cert.entries.size() + 1);
}
