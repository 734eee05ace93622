#pragma once

// Gaussian mutual-information evaluation. Two independent code paths are
// provided on purpose:
//   1. closed forms in the B-parameterization (i_y_yhat_given_x,
//      i_x_yhat_cond, sd_fronthaul_usage), and
//   2. a generic joint-covariance + Schur-complement conditional path
//      (joint_covariance / cond_mutual_info),
// so each can serve as an oracle for the other. All outputs are in bits.

#include <vector>

#include "cran/linalg.hpp"
#include "cran/model.hpp"
#include "cran/subsets.hpp"

namespace cran {

// ---------------------------------------------------------------------------
// Closed-form path.
// ---------------------------------------------------------------------------

/// Stacked channel from the users in mask T to BS l: N x (|T| M), user blocks
/// in ascending index order.
inline Matrix stacked_channel(const NetworkInstance& inst, int l, Mask T) {
  std::vector<int> users = mask_indices(T);
  Matrix H(inst.N, (Eigen::Index)users.size() * inst.M);
  for (std::size_t j = 0; j < users.size(); ++j)
    H.middleCols((Eigen::Index)j * inst.M, inst.M) = inst.H[l][users[j]];
  return H;
}

/// Block-diagonal input covariance of the users in T.
inline Matrix input_covariance(const NetworkInstance& inst, Mask T) {
  std::vector<int> users = mask_indices(T);
  Eigen::Index d = (Eigen::Index)users.size() * inst.M;
  Matrix K = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < users.size(); ++j)
    K.block((Eigen::Index)j * inst.M, (Eigen::Index)j * inst.M, inst.M, inst.M) =
        inst.Kx[users[j]];
  return K;
}

/// I(Y_l; Yhat_l | X) = log2 det(Sigma^-1) - log2 det(Sigma^-1 - B).
/// Returns +inf when B_l sits at the upper Loewner endpoint (zero
/// quantization noise); the endpoint test uses the whitened eigenvalues with
/// a 1e-12 margin so the sentinel is robust to rounding.
inline double i_y_yhat_given_x(const NetworkInstance& inst, const QuantizerB& b,
                               int l) {
  Eigen::VectorXd ev = whitened_eigenvalues(b.B[l], inst.Sigma[l]);
  double bits = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double gap = 1.0 - ev(i);
    if (gap < 1e-12) return kInf;
    bits -= std::log2(gap);
  }
  return bits;
}

/// I(X_T; Yhat_{Sc} | X_{T^c}) in the singularity-safe symmetrized form
/// log2 det(I + K_T^{1/2} (sum_{l in Sc} H'_{l,T} B_l H_{l,T}) K_T^{1/2}).
inline double i_x_yhat_cond(const NetworkInstance& inst, const QuantizerB& b,
                            Mask T, Mask Sc) {
  if (T == 0) throw std::invalid_argument("i_x_yhat_cond: empty user subset");
  Eigen::Index d = (Eigen::Index)mask_size(T) * inst.M;
  Matrix A = Matrix::Zero(d, d);
  for (int l = 0; l < inst.L; ++l) {
    if (!mask_contains(Sc, l)) continue;
    Matrix H = stacked_channel(inst, l, T);
    A += H.adjoint() * b.B[l] * H;
  }
  Matrix Ks = herm_sqrt(input_covariance(inst, T));
  Matrix inner = Matrix::Identity(d, d) + Ks * A * Ks;
  return logdet2(hermitize(inner, 1e-7));
}

/// I(Y_S; Yhat_S | Yhat_{S^c}) in closed form:
/// I(X;Yhat_L) - I(X;Yhat_{S^c}) + sum_{l in S} I(Y_l;Yhat_l|X).
inline double sd_fronthaul_usage(const NetworkInstance& inst,
                                 const QuantizerB& b, Mask S) {
  if (S == 0) throw std::invalid_argument("sd_fronthaul_usage: empty BS subset");
  Mask allK = full_mask(inst.K);
  Mask allL = full_mask(inst.L);
  double usage =
      i_x_yhat_cond(inst, b, allK, allL) - i_x_yhat_cond(inst, b, allK, allL & ~S);
  for (int l = 0; l < inst.L; ++l) {
    if (!mask_contains(S, l)) continue;
    double t = i_y_yhat_given_x(inst, b, l);
    if (t == kInf) return kInf;
    usage += t;
  }
  return usage;
}

// ---------------------------------------------------------------------------
// Joint-covariance path.
// ---------------------------------------------------------------------------

enum class BlockKind { X, YHat, Y };

struct Block {
  BlockKind kind;
  int index;  // user index for X, BS index for YHat / Y
};

/// Joint Gaussian covariance of (X_1..X_K, Yhat_1..Yhat_L) and, when
/// extended, also the pre-quantization observations (Y_1..Y_L).
///
/// Extended covariances store Yhat in a whitened surrogate form
/// Yhat'_l = B_l^{1/2} Y_l + n_l with cov(n_l) = I - B^{1/2} Sigma B^{1/2},
/// which has the same mutual informations as Y_l + q_l (an invertible
/// transform whenever B_l is PD) but stays finite and well-conditioned at
/// both Loewner endpoints, including B_l singular where Q_l does not exist.
struct JointCovariance {
  int K = 0, L = 0, M = 0, N = 0;
  bool extended = false;
  Matrix cov;

  int offset(const Block& blk) const {
    switch (blk.kind) {
      case BlockKind::X:
        return blk.index * M;
      case BlockKind::YHat:
        return K * M + blk.index * N;
      case BlockKind::Y:
        if (!extended)
          throw std::invalid_argument("joint covariance has no Y blocks");
        return K * M + L * N + blk.index * N;
    }
    throw std::logic_error("unreachable");
  }
  int block_dim(const Block& blk) const {
    return blk.kind == BlockKind::X ? M : N;
  }
  std::vector<int> rows(const std::vector<Block>& blocks) const {
    std::vector<int> out;
    for (const Block& blk : blocks) {
      int o = offset(blk), d = block_dim(blk);
      for (int i = 0; i < d; ++i) out.push_back(o + i);
    }
    return out;
  }
};

namespace detail {
inline Matrix submatrix(const Matrix& a, const std::vector<int>& r,
                        const std::vector<int>& c) {
  Matrix out(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = a(r[i], c[j]);
  return out;
}

/// cov(Y_l, Y_m) = sum_j H_{lj} K_j H_{mj}' + delta_{lm} Sigma_l.
inline Matrix y_cross_cov(const NetworkInstance& inst, int l, int m) {
  Matrix c = Matrix::Zero(inst.N, inst.N);
  for (int j = 0; j < inst.K; ++j)
    c += inst.H[l][j] * inst.Kx[j] * inst.H[m][j].adjoint();
  if (l == m) c += inst.Sigma[l];
  return c;
}
}  // namespace detail

/// Literal joint covariance of (X, Yhat) with Yhat_l = Y_l + q_l,
/// cov(q_l) = Q_l = B_l^-1 - Sigma_l. Requires every B_l PD so Q_l exists
/// (B_l = Sigma_l^-1 gives Q_l = 0).
inline JointCovariance joint_covariance(const NetworkInstance& inst,
                                        const QuantizerB& b) {
  if (!quantizer_feasible(inst, b))
    throw std::invalid_argument("joint_covariance: infeasible quantizer");
  JointCovariance jc;
  jc.K = inst.K;
  jc.L = inst.L;
  jc.M = inst.M;
  jc.N = inst.N;
  jc.extended = false;
  int dim = inst.K * inst.M + inst.L * inst.N;
  jc.cov = Matrix::Zero(dim, dim);
  for (int k = 0; k < inst.K; ++k)
    jc.cov.block(k * inst.M, k * inst.M, inst.M, inst.M) = inst.Kx[k];
  int y0 = inst.K * inst.M;
  for (int l = 0; l < inst.L; ++l) {
    Matrix Q = q_from_b(b.B[l], inst.Sigma[l]);
    for (int m = 0; m < inst.L; ++m) {
      Matrix c = detail::y_cross_cov(inst, l, m);
      if (l == m) c += Q;
      jc.cov.block(y0 + l * inst.N, y0 + m * inst.N, inst.N, inst.N) = c;
    }
    for (int k = 0; k < inst.K; ++k) {
      Matrix c = inst.Kx[k] * inst.H[l][k].adjoint();
      jc.cov.block(k * inst.M, y0 + l * inst.N, inst.M, inst.N) = c;
      jc.cov.block(y0 + l * inst.N, k * inst.M, inst.N, inst.M) = c.adjoint();
    }
  }
  jc.cov = hermitize(jc.cov, 1e-7);
  return jc;
}

/// Joint covariance of (X, Yhat', Y) with the whitened Yhat surrogate; valid
/// for every feasible quantizer including singular B_l and B_l = Sigma^-1.
inline JointCovariance joint_covariance_extended(const NetworkInstance& inst,
                                                 const QuantizerB& b) {
  if (!quantizer_feasible(inst, b))
    throw std::invalid_argument("joint_covariance_extended: infeasible quantizer");
  JointCovariance jc;
  jc.K = inst.K;
  jc.L = inst.L;
  jc.M = inst.M;
  jc.N = inst.N;
  jc.extended = true;
  int xdim = inst.K * inst.M, ydim = inst.L * inst.N;
  int dim = xdim + 2 * ydim;
  int h0 = xdim, y0 = xdim + ydim;
  jc.cov = Matrix::Zero(dim, dim);
  std::vector<Matrix> W(inst.L), Ncov(inst.L);
  for (int l = 0; l < inst.L; ++l) {
    W[l] = herm_sqrt(b.B[l]);
    Matrix n = Matrix::Identity(inst.N, inst.N) - W[l] * inst.Sigma[l] * W[l];
    // Feasibility bounds the whitened eigenvalues by 1, so n is PSD up to
    // rounding; clamp to keep the joint matrix PSD.
    Ncov[l] = clip_eigenvalues(0.5 * (n + n.adjoint()), 0.0, kInf);
  }
  for (int k = 0; k < inst.K; ++k)
    jc.cov.block(k * inst.M, k * inst.M, inst.M, inst.M) = inst.Kx[k];
  for (int l = 0; l < inst.L; ++l) {
    for (int k = 0; k < inst.K; ++k) {
      Matrix cxy = inst.Kx[k] * inst.H[l][k].adjoint();  // cov(X_k, Y_l)
      jc.cov.block(k * inst.M, y0 + l * inst.N, inst.M, inst.N) = cxy;
      jc.cov.block(y0 + l * inst.N, k * inst.M, inst.N, inst.M) = cxy.adjoint();
      Matrix cxh = cxy * W[l];  // cov(X_k, Yhat'_l)
      jc.cov.block(k * inst.M, h0 + l * inst.N, inst.M, inst.N) = cxh;
      jc.cov.block(h0 + l * inst.N, k * inst.M, inst.N, inst.M) = cxh.adjoint();
    }
    for (int m = 0; m < inst.L; ++m) {
      Matrix cyy = detail::y_cross_cov(inst, l, m);
      jc.cov.block(y0 + l * inst.N, y0 + m * inst.N, inst.N, inst.N) = cyy;
      Matrix chh = W[l] * cyy * W[m];
      if (l == m) chh += Ncov[l];
      jc.cov.block(h0 + l * inst.N, h0 + m * inst.N, inst.N, inst.N) = chh;
      Matrix cyh = cyy * W[m];  // cov(Y_l, Yhat'_m); noise n_m independent
      jc.cov.block(y0 + l * inst.N, h0 + m * inst.N, inst.N, inst.N) = cyh;
      jc.cov.block(h0 + m * inst.N, y0 + l * inst.N, inst.N, inst.N) = cyh.adjoint();
    }
  }
  jc.cov = hermitize(jc.cov, 1e-7);
  return jc;
}

namespace detail {
/// Schur-complement conditional covariance cov(A | C). The conditioning
/// block is inverted through an eigen pseudo-inverse with a relative cutoff,
/// which tolerates singular conditioning covariances (deterministic
/// components condition out exactly).
inline Matrix conditional_covariance(const Matrix& cov,
                                     const std::vector<int>& ra,
                                     const std::vector<int>& rc) {
  Matrix Saa = submatrix(cov, ra, ra);
  if (rc.empty()) return Saa;
  Matrix Sac = submatrix(cov, ra, rc);
  Matrix Scc = submatrix(cov, rc, rc);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Scc + Scc.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  double cutoff = std::max(ev.cwiseAbs().maxCoeff(), 1.0) * 1e-13;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) inv(i) = 1.0 / ev(i);
  Matrix pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  Matrix s = Saa - Sac * pinv * Sac.adjoint();
  return 0.5 * (s + s.adjoint());
}

/// log2 det of a conditional covariance with the near-singularity ridge:
/// when the minimum eigenvalue is below 1e-12, add 1e-12 * trace/dim before
/// the log-det and flag the evaluation. An exactly-zero matrix still yields
/// -inf (deterministic conditional => infinite mutual information upstream).
inline double logdet_conditional(const Matrix& s, bool* regularized) {
  if (s.rows() == 0) return 0.0;
  double mineig = min_eigenvalue(s);
  if (mineig < 1e-12) {
    double ridge = 1e-12 * std::real(s.trace()) / (double)s.rows();
    if (regularized) *regularized = true;
    if (ridge <= 0.0) return -kInf;
    return logdet2(s + ridge * Matrix::Identity(s.rows(), s.cols()));
  }
  return logdet2(s);
}
}  // namespace detail

/// I(A; B | C) = log2 det cov(A|C) - log2 det cov(A|B,C), blocks disjoint.
/// Sets *regularized when a near-singular conditional needed the ridge.
inline double cond_mutual_info(const JointCovariance& jc,
                               const std::vector<Block>& A,
                               const std::vector<Block>& B,
                               const std::vector<Block>& C,
                               bool* regularized = nullptr) {
  if (regularized) *regularized = false;
  std::vector<int> ra = jc.rows(A), rb = jc.rows(B), rc = jc.rows(C);
  std::vector<int> rbc = rb;
  rbc.insert(rbc.end(), rc.begin(), rc.end());
  double h1 = detail::logdet_conditional(
      detail::conditional_covariance(jc.cov, ra, rc), regularized);
  double h2 = detail::logdet_conditional(
      detail::conditional_covariance(jc.cov, ra, rbc), regularized);
  if (h2 == -kInf) return h1 == -kInf ? 0.0 : kInf;
  return h1 - h2;
}

/// Convenience: blocks for the users in mask T.
inline std::vector<Block> x_blocks(Mask T) {
  std::vector<Block> out;
  for (int k : mask_indices(T)) out.push_back({BlockKind::X, k});
  return out;
}
/// Blocks for the quantized observations of the BSs in mask S.
inline std::vector<Block> yhat_blocks(Mask S) {
  std::vector<Block> out;
  for (int l : mask_indices(S)) out.push_back({BlockKind::YHat, l});
  return out;
}
/// Blocks for the raw observations of the BSs in mask S (extended only).
inline std::vector<Block> y_blocks(Mask S) {
  std::vector<Block> out;
  for (int l : mask_indices(S)) out.push_back({BlockKind::Y, l});
  return out;
}

}  // namespace cran
