#pragma once

// Constraint systems of the three decoding strategies (joint, successive,
// generalized successive) and the cut-set outer bound, plus rate-point
// membership tests. Subset enumeration is lexicographic by bitmask: user
// subsets T run over 1..2^K-1 (outer), BS subsets S over 0..2^L-1 (inner).

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "cran/gaussinfo.hpp"
#include "cran/model.hpp"
#include "cran/subsets.hpp"

namespace cran {

/// Raised when an enumeration would exceed the configured subset cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultEnumCap = 6;

inline void check_enum_cap(const NetworkInstance& inst,
                           int cap = kDefaultEnumCap) {
  if (inst.K > cap || inst.L > cap) {
    std::ostringstream os;
    os << "subset enumeration cap exceeded: K=" << inst.K << ", L=" << inst.L
       << ", cap=" << cap;
    throw CapExceeded(os.str());
  }
}

enum class ConstraintKind { JD, SdRate, SdFronthaul, GsdRate, GsdFronthaul, Cutset };

inline const char* constraint_kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::JD: return "JD";
    case ConstraintKind::SdRate: return "SD-rate";
    case ConstraintKind::SdFronthaul: return "SD-fronthaul";
    case ConstraintKind::GsdRate: return "GSD-rate";
    case ConstraintKind::GsdFronthaul: return "GSD-fronthaul";
    case ConstraintKind::Cutset: return "cutset";
  }
  return "?";
}

/// One inequality sum_{k in T} R_k <= rhs, indexed by (T, S).
struct SubsetConstraint {
  Mask T = 0;
  Mask S = 0;
  double rhs = 0.0;
  ConstraintKind kind = ConstraintKind::JD;
  bool clamped = false;  // raw rhs was negative (cut infeasible at this b)
};

/// Joint-decoding constraints at fixed quantizer: for every nonempty T and
/// every S, rhs = sum_{l in S} [C_l - I(Y_l;Yhat_l|X)] + I(X_T;Yhat_{S^c}|X_{T^c}).
/// Negative rhs is clamped to 0 and flagged.
inline std::vector<SubsetConstraint> jd_constraints(const NetworkInstance& inst,
                                                    const QuantizerB& b,
                                                    int cap = kDefaultEnumCap) {
  check_enum_cap(inst, cap);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, b, l);
  Mask allL = full_mask(inst.L);
  std::vector<SubsetConstraint> out;
  out.reserve(((std::size_t)1 << inst.K) << inst.L);
  for (Mask T = 1; T <= full_mask(inst.K); ++T) {
    for (Mask S = 0; S <= allL; ++S) {
      double rhs = i_x_yhat_cond(inst, b, T, allL & ~S);
      for (int l : mask_indices(S)) rhs += inst.C[l] - iy[l];
      SubsetConstraint c{T, S, rhs, ConstraintKind::JD, false};
      if (std::isnan(rhs) || rhs < 0.0) {  // -inf penalty also lands here
        c.rhs = 0.0;
        c.clamped = true;
      }
      out.push_back(c);
    }
  }
  return out;
}

/// Successive-decoding region at fixed quantizer: per-T rate bounds
/// I(X_T;Yhat_L|X_{T^c}) plus per-S fronthaul feasibility
/// I(Y_S;Yhat_S|Yhat_{S^c}) <= sum_{l in S} C_l.
struct SdRegion {
  std::vector<SubsetConstraint> rate;       // kind SdRate, S = 0
  std::vector<SubsetConstraint> fronthaul;  // kind SdFronthaul, T = 0, rhs = usage
  std::vector<bool> fronthaul_ok;           // aligned with `fronthaul`
  bool feasible = true;                     // all fronthaul checks pass
};

inline SdRegion sd_constraints(const NetworkInstance& inst, const QuantizerB& b,
                               int cap = kDefaultEnumCap,
                               double tol = 1e-9) {
  check_enum_cap(inst, cap);
  SdRegion reg;
  Mask allL = full_mask(inst.L);
  for (Mask T = 1; T <= full_mask(inst.K); ++T)
    reg.rate.push_back({T, 0, i_x_yhat_cond(inst, b, T, allL),
                        ConstraintKind::SdRate, false});
  for (Mask S = 1; S <= allL; ++S) {
    double usage = sd_fronthaul_usage(inst, b, S);
    double capsum = 0.0;
    for (int l : mask_indices(S)) capsum += inst.C[l];
    reg.fronthaul.push_back({0, S, usage, ConstraintKind::SdFronthaul, false});
    bool ok = usage <= capsum + tol;
    reg.fronthaul_ok.push_back(ok);
    reg.feasible = reg.feasible && ok;
  }
  return reg;
}

/// A permutation of the L + K quantization (YHat, l) and message (X, k)
/// codewords, in decoding order.
struct DecodingOrder {
  std::vector<Block> items;
};

inline bool order_valid(const NetworkInstance& inst, const DecodingOrder& ord) {
  if ((int)ord.items.size() != inst.K + inst.L) return false;
  Mask users = 0, bss = 0;
  for (const Block& it : ord.items) {
    if (it.kind == BlockKind::X) {
      if (it.index < 0 || it.index >= inst.K || mask_contains(users, it.index))
        return false;
      users |= Mask(1) << it.index;
    } else if (it.kind == BlockKind::YHat) {
      if (it.index < 0 || it.index >= inst.L || mask_contains(bss, it.index))
        return false;
      bss |= Mask(1) << it.index;
    } else {
      return false;
    }
  }
  return users == full_mask(inst.K) && bss == full_mask(inst.L);
}

/// All quantizers in the given BS order (default descending), then all
/// messages in descending user order: the successive-decoding corner.
inline DecodingOrder sd_corner_order(const NetworkInstance& inst) {
  DecodingOrder ord;
  for (int l = inst.L - 1; l >= 0; --l) ord.items.push_back({BlockKind::YHat, l});
  for (int k = inst.K - 1; k >= 0; --k) ord.items.push_back({BlockKind::X, k});
  return ord;
}

/// Generalized successive decoding along `order`: each message is decoded
/// against the quantizations recovered so far (earlier messages cancelled),
/// each quantization's fronthaul requirement is conditioned on everything
/// decoded before it. Fronthaul entries are +inf when B_l sits at the
/// zero-quantization-noise endpoint.
inline RateFronthaulTuple gsd_rates(const NetworkInstance& inst,
                                    const QuantizerB& b,
                                    const DecodingOrder& order) {
  if (!order_valid(inst, order))
    throw std::invalid_argument("gsd_rates: invalid decoding order");
  JointCovariance jc = joint_covariance_extended(inst, b);
  RateFronthaulTuple t;
  t.R.assign(inst.K, 0.0);
  t.C.assign(inst.L, 0.0);
  Mask decoded_users = 0, decoded_bss = 0;
  for (const Block& it : order.items) {
    if (it.kind == BlockKind::X) {
      t.R[it.index] = cond_mutual_info(jc, {it}, yhat_blocks(decoded_bss),
                                       x_blocks(decoded_users));
      decoded_users |= Mask(1) << it.index;
    } else {
      Eigen::VectorXd ev = whitened_eigenvalues(b.B[it.index], inst.Sigma[it.index]);
      if (ev.maxCoeff() >= 1.0 - 1e-12) {
        t.C[it.index] = kInf;
      } else {
        std::vector<Block> cond = yhat_blocks(decoded_bss);
        for (const Block& xb : x_blocks(decoded_users)) cond.push_back(xb);
        t.C[it.index] =
            cond_mutual_info(jc, y_blocks(Mask(1) << it.index), {it}, cond);
      }
      decoded_bss |= Mask(1) << it.index;
    }
  }
  return t;
}

/// Cut-set outer bound at fixed input covariances: per (T != 0, S),
/// rhs = sum_{l in S} C_l + I(X_T; Y_{S^c} | X_{T^c}) (the air interface at
/// zero quantization noise, i.e. B = Sigma^-1).
inline std::vector<SubsetConstraint> cutset_constraints(
    const NetworkInstance& inst, int cap = kDefaultEnumCap) {
  check_enum_cap(inst, cap);
  QuantizerB bmax = uncompressed_quantizer(inst);
  Mask allL = full_mask(inst.L);
  std::vector<SubsetConstraint> out;
  for (Mask T = 1; T <= full_mask(inst.K); ++T) {
    for (Mask S = 0; S <= allL; ++S) {
      double rhs = i_x_yhat_cond(inst, bmax, T, allL & ~S);
      for (int l : mask_indices(S)) rhs += inst.C[l];
      out.push_back({T, S, rhs, ConstraintKind::Cutset, false});
    }
  }
  return out;
}

struct MembershipResult {
  bool member = true;
  double worst_slack = kInf;
  Mask worst_T = 0;
  Mask worst_S = 0;
};

/// Checks sum_{k in T} R_k <= rhs for every rate constraint in the list
/// (fronthaul-usage rows, T = 0, are skipped). Tolerance 1e-9.
inline MembershipResult membership(const RateFronthaulTuple& point,
                                   const std::vector<SubsetConstraint>& cons,
                                   double tol = 1e-9) {
  MembershipResult res;
  for (const SubsetConstraint& c : cons) {
    if (c.T == 0) continue;
    double sum = 0.0;
    for (int k : mask_indices(c.T)) sum += point.R[k];
    double slack = c.rhs - sum;
    if (slack < res.worst_slack) {
      res.worst_slack = slack;
      res.worst_T = c.T;
      res.worst_S = c.S;
    }
  }
  res.member = res.worst_slack >= -tol;
  return res;
}

/// Unclamped min over S of { sum_{l in S} [C_l - I(Y_l;Yhat_l|X)] +
/// I(X; Yhat_{S^c}) }. Negative means the joint-decoding region at this
/// quantizer is empty (some fronthaul cut cannot be paid for).
inline double jd_sum_rate_fixed_b_raw(const NetworkInstance& inst,
                                      const QuantizerB& b,
                                      int cap = kDefaultEnumCap) {
  check_enum_cap(inst, cap);
  Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, b, l);
  double best = kInf;
  for (Mask S = 0; S <= allL; ++S) {
    double v = (allL & ~S) ? i_x_yhat_cond(inst, b, allK, allL & ~S) : 0.0;
    for (int l : mask_indices(S)) v += inst.C[l] - iy[l];
    best = std::min(best, v);
  }
  return best;
}

/// Maximum joint-decoding sum rate at fixed quantizer (0 when the region is
/// empty in the sum-rate direction).
inline double jd_sum_rate_fixed_b(const NetworkInstance& inst,
                                  const QuantizerB& b,
                                  int cap = kDefaultEnumCap) {
  return std::max(jd_sum_rate_fixed_b_raw(inst, b, cap), 0.0);
}

/// CSV table of constraints: kind, T bitmask, S bitmask, rhs (bits per
/// complex dimension).
inline std::string constraints_to_csv(const std::vector<SubsetConstraint>& cons) {
  std::ostringstream os;
  os << "kind,T_bitmask,S_bitmask,rhs_bits_per_complex_dim,clamped\n";
  os << std::setprecision(17);
  for (const SubsetConstraint& c : cons)
    os << constraint_kind_name(c.kind) << ',' << c.T << ',' << c.S << ','
       << c.rhs << ',' << (c.clamped ? 1 : 0) << "\n";
  return os.str();
}

/// Two-user rate-region boundary polyline (R1 monotone increasing) of the
/// pentagon {R1 <= A, R2 <= B, R1 + R2 <= Cs} extracted from per-T rate
/// bounds (minimized over S for JD constraint lists).
inline std::vector<std::pair<double, double>> two_user_boundary(
    const std::vector<SubsetConstraint>& cons) {
  double A = kInf, B = kInf, Cs = kInf;
  for (const SubsetConstraint& c : cons) {
    if (c.T == 1) A = std::min(A, c.rhs);
    if (c.T == 2) B = std::min(B, c.rhs);
    if (c.T == 3) Cs = std::min(Cs, c.rhs);
  }
  Cs = std::min(Cs, A + B);
  A = std::min(A, Cs);
  B = std::min(B, Cs);
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, B);
  double r1_kink = Cs - B;  // R1 where the sum constraint starts binding
  if (r1_kink > 1e-12 && r1_kink < A - 1e-12) pts.emplace_back(r1_kink, B);
  if (Cs - A > 1e-12 && Cs - A < B - 1e-12) pts.emplace_back(A, Cs - A);
  pts.emplace_back(A, std::min(B, std::max(Cs - A, 0.0)));
  pts.emplace_back(A, 0.0);
  // Deduplicate consecutive points.
  std::vector<std::pair<double, double>> out;
  for (auto& p : pts)
    if (out.empty() || std::abs(out.back().first - p.first) > 1e-12 ||
        std::abs(out.back().second - p.second) > 1e-12)
      out.push_back(p);
  return out;
}

}  // namespace cran
