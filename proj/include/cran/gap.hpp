#pragma once

// Constant-gap certificates: with the quantization noise set to the
// background noise level (B = Sigma^-1 / 2), the achievable regions sit
// within a bounded per-user distance of the cut-set outer bound, uniformly
// in channel and SNR. Certificates carry every per-cut gap so the tighter
// per-cut inequality (|S|/|T|) N + M can be audited alongside the global
// bound.

#include <vector>

#include "cran/gaussinfo.hpp"
#include "cran/model.hpp"
#include "cran/regions.hpp"

namespace cran {

struct GapEntry {
  Mask T = 0;
  Mask S = 0;
  double gap = 0.0;            // per-user (divided by |T|), bits
  double per_cut_bound = 0.0;  // (|S|/|T|) N + M for the per-cut check
};

struct GapCertificate {
  std::vector<GapEntry> entries;
  double worst_gap = 0.0;  // max per-user gap over all cuts
  double eta = 0.0;        // global theoretical bound
  bool pass = false;       // every per-cut bound and the global bound hold
};

/// Joint decoding vs cut-set, per (T, S):
/// gap = [ sum_{l in S} iy_l + air(T, S^c; Sigma^-1) - air(T, S^c; half) ] / |T|
/// with the per-cut bound (|S|/|T|) N + M and global bound eta = N L + M.
inline GapCertificate jd_gap_certificate(const NetworkInstance& inst,
                                         double tol = 1e-9) {
  check_enum_cap(inst);
  QuantizerB half = half_inverse_noise_quantizer(inst);
  QuantizerB fullb = uncompressed_quantizer(inst);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, half, l);
  Mask allL = full_mask(inst.L);
  GapCertificate cert;
  cert.eta = (double)inst.N * inst.L + inst.M;
  cert.pass = true;
  for (Mask T = 1; T <= full_mask(inst.K); ++T) {
    for (Mask S = 0; S <= allL; ++S) {
      Mask Sc = allL & ~S;
      double cut = i_x_yhat_cond(inst, fullb, T, Sc);
      double ach = i_x_yhat_cond(inst, half, T, Sc);
      double num = cut - ach;
      for (int l : mask_indices(S)) num += iy[l];
      GapEntry e;
      e.T = T;
      e.S = S;
      e.gap = num / mask_size(T);
      e.per_cut_bound =
          (double)mask_size(S) / mask_size(T) * inst.N + inst.M;
      cert.pass = cert.pass && e.gap <= e.per_cut_bound + tol;
      cert.worst_gap = std::max(cert.worst_gap, e.gap);
      cert.entries.push_back(e);
    }
  }
  cert.pass = cert.pass && cert.worst_gap <= cert.eta + tol;
  return cert;
}

/// Successive-decoding sum capacity vs the sum-rate cut-set bound:
/// gap = min_S { sum_{l in S} C_l + air(K, S^c; Sigma^-1) } - R_half,
/// bounded by eta = N L + M K. R_half is the joint-decoding sum rate at
/// B = Sigma^-1 / 2, which successive decoding matches by the decoding
/// equivalence.
inline GapCertificate sd_sum_gap_certificate(const NetworkInstance& inst,
                                             double tol = 1e-9) {
  check_enum_cap(inst);
  QuantizerB half = half_inverse_noise_quantizer(inst);
  QuantizerB fullb = uncompressed_quantizer(inst);
  Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
  double achievable = jd_sum_rate_fixed_b(inst, half);
  double bound = kInf;
  for (Mask S = 0; S <= allL; ++S) {
    double v = (allL & ~S) ? i_x_yhat_cond(inst, fullb, allK, allL & ~S) : 0.0;
    for (int l : mask_indices(S)) v += inst.C[l];
    bound = std::min(bound, v);
  }
  GapCertificate cert;
  cert.eta = (double)inst.N * inst.L + (double)inst.M * inst.K;
  GapEntry e;
  e.T = allK;
  e.S = 0;
  e.gap = bound - achievable;
  e.per_cut_bound = cert.eta;
  cert.entries.push_back(e);
  cert.worst_gap = e.gap;
  cert.pass = e.gap <= cert.eta + tol;
  return cert;
}

/// Generalized successive decoding under a total fronthaul budget, per user
/// subset T:
/// gap = [ min{Csum, air(T; Sigma^-1)} - max{0, min{Csum - L N, air(T; half)}} ] / |T|,
/// bounded by eta = N L + M (the budgeted cut-set keeps only the full
/// fronthaul cut and the pure air cut).
inline GapCertificate gsd_sumfronthaul_gap_certificate(
    const NetworkInstance& inst, double Csum, double tol = 1e-9) {
  if (Csum < 0.0)
    throw std::invalid_argument("gsd_sumfronthaul_gap_certificate: Csum < 0");
  check_enum_cap(inst);
  QuantizerB half = half_inverse_noise_quantizer(inst);
  QuantizerB fullb = uncompressed_quantizer(inst);
  Mask allL = full_mask(inst.L);
  double overhead = 0.0;  // total quantization overhead at the half point
  for (int l = 0; l < inst.L; ++l) overhead += i_y_yhat_given_x(inst, half, l);
  GapCertificate cert;
  cert.eta = (double)inst.N * inst.L + inst.M;
  cert.pass = true;
  for (Mask T = 1; T <= full_mask(inst.K); ++T) {
    double bound = std::min(Csum, i_x_yhat_cond(inst, fullb, T, allL));
    double ach =
        std::max(0.0, std::min(Csum - overhead, i_x_yhat_cond(inst, half, T, allL)));
    GapEntry e;
    e.T = T;
    e.S = allL;
    e.gap = (bound - ach) / mask_size(T);
    e.per_cut_bound = cert.eta;
    cert.pass = cert.pass && e.gap <= cert.eta + tol;
    cert.worst_gap = std::max(cert.worst_gap, e.gap);
    cert.entries.push_back(e);
  }
  return cert;
}

/// CSV table of per-cut gaps.
inline std::string gap_to_csv(const GapCertificate& cert) {
  std::ostringstream os;
  os << "T_bitmask,S_bitmask,gap_bits_per_user,per_cut_bound,eta\n";
  os << std::setprecision(17);
  for (const GapEntry& e : cert.entries)
    os << e.T << ',' << e.S << ',' << e.gap << ',' << e.per_cut_bound << ','
       << cert.eta << "\n";
  return os.str();
}

}  // namespace cran
