#pragma once

// Channel model for the uplink C-RAN evaluation library: network instances,
// the B-reparameterized quantizers, validation, and seeded random generation.
// All rates and capacities are in bits per complex dimension.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cran/linalg.hpp"

namespace cran {

/// Uplink network: K users with M antennas each, L base stations with N
/// antennas each, fronthaul capacities C_l from BS l to the central
/// processor. H[l][k] is the N x M channel from user k to BS l.
struct NetworkInstance {
  int K = 0;
  int L = 0;
  int M = 0;
  int N = 0;
  std::vector<std::vector<Matrix>> H;  // [l][k], N x M
  std::vector<Matrix> Sigma;           // [l], N x N Hermitian PD
  std::vector<Matrix> Kx;              // [k], M x M Hermitian PSD
  std::vector<double> P;               // per-user power budgets
  std::vector<double> C;               // fronthaul capacities, bits
};

/// Per-BS quantizer in the (Sigma + Q)^-1 parameterization. Feasible iff
/// 0 <= B_l <= Sigma_l^-1 in the Loewner order.
struct QuantizerB {
  std::vector<Matrix> B;  // [l], N x N Hermitian
};

struct RateFronthaulTuple {
  std::vector<double> R;  // length K
  std::vector<double> C;  // length L
};

struct ValidationIssue {
  std::string invariant;
  int index = -1;
  double evidence = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

inline ValidationReport validate(const NetworkInstance& inst) {
  ValidationReport rep;
  auto fail = [&](const std::string& inv, int idx, double ev,
                  const std::string& msg) {
    rep.issues.push_back({inv, idx, ev, msg});
  };
  if (inst.K < 1 || inst.L < 1 || inst.M < 1 || inst.N < 1) {
    fail("dimensions", -1, 0.0, "K, L, M, N must all be >= 1");
    return rep;
  }
  auto dim_msg = [](const char* what, int idx) {
    std::ostringstream os;
    os << what << " has wrong dimensions at index " << idx;
    return os.str();
  };
  if ((int)inst.H.size() != inst.L) fail("dimensions", -1, 0, "H outer size != L");
  if ((int)inst.Sigma.size() != inst.L) fail("dimensions", -1, 0, "Sigma size != L");
  if ((int)inst.Kx.size() != inst.K) fail("dimensions", -1, 0, "Kx size != K");
  if ((int)inst.P.size() != inst.K) fail("dimensions", -1, 0, "P size != K");
  if ((int)inst.C.size() != inst.L) fail("dimensions", -1, 0, "C size != L");
  if (!rep.ok()) return rep;

  for (int l = 0; l < inst.L; ++l) {
    if ((int)inst.H[l].size() != inst.K) {
      fail("dimensions", l, 0, "H inner size != K");
      continue;
    }
    for (int k = 0; k < inst.K; ++k) {
      if (inst.H[l][k].rows() != inst.N || inst.H[l][k].cols() != inst.M)
        fail("dimensions", l * inst.K + k, 0, dim_msg("H", l * inst.K + k));
    }
  }
  for (int l = 0; l < inst.L; ++l) {
    if (inst.Sigma[l].rows() != inst.N || inst.Sigma[l].cols() != inst.N) {
      fail("dimensions", l, 0, dim_msg("Sigma", l));
      continue;
    }
    double mineig = min_eigenvalue(inst.Sigma[l]);
    if (mineig <= 0.0) {
      std::ostringstream os;
      os << "Sigma_" << (l + 1) << " not positive definite (min eigenvalue "
         << mineig << ")";
      fail("sigma_pd", l, mineig, os.str());
    }
  }
  for (int k = 0; k < inst.K; ++k) {
    if (inst.Kx[k].rows() != inst.M || inst.Kx[k].cols() != inst.M) {
      fail("dimensions", k, 0, dim_msg("Kx", k));
      continue;
    }
    double mineig = min_eigenvalue(inst.Kx[k]);
    if (mineig < -1e-9) {
      std::ostringstream os;
      os << "Kx_" << (k + 1) << " not PSD (min eigenvalue " << mineig << ")";
      fail("kx_psd", k, mineig, os.str());
    }
    double tr = std::real(inst.Kx[k].trace());
    if (tr > inst.P[k] + 1e-9) {
      std::ostringstream os;
      os << "trace(Kx_" << (k + 1) << ") = " << tr << " exceeds power budget "
         << inst.P[k];
      fail("power", k, tr, os.str());
    }
  }
  for (int l = 0; l < inst.L; ++l) {
    if (inst.C[l] < 0.0)
      fail("fronthaul_nonneg", l, inst.C[l], "C_l must be >= 0");
  }
  return rep;
}

/// B = (Sigma + Q)^-1.
inline Matrix b_from_q(const Matrix& Q, const Matrix& Sigma) {
  Matrix Qh = hermitize(Q);
  if (!is_psd(Qh)) throw std::invalid_argument("b_from_q: Q not PSD");
  Matrix sum = Sigma + Qh;
  if (min_eigenvalue(sum) <= 0.0)
    throw std::invalid_argument("b_from_q: Sigma + Q singular");
  return hermitize(Matrix(sum.inverse()), 1e-7);
}

/// Q = B^-1 - Sigma; inverse of b_from_q.
inline Matrix q_from_b(const Matrix& B, const Matrix& Sigma) {
  if (min_eigenvalue(B) <= 0.0)
    throw std::invalid_argument("q_from_b: B must be positive definite");
  return hermitize(Matrix(B.inverse() - Sigma), 1e-7);
}

/// Eigenvalues of Sigma^(1/2) B Sigma^(1/2); membership in [0,1] is the
/// Loewner-interval condition 0 <= B <= Sigma^-1.
inline Eigen::VectorXd whitened_eigenvalues(const Matrix& B, const Matrix& Sigma) {
  Matrix s = herm_sqrt(Sigma);
  return herm_eigenvalues(s * B * s);
}

inline bool quantizer_feasible(const NetworkInstance& inst, const QuantizerB& b,
                               double tol = 1e-9) {
  if ((int)b.B.size() != inst.L) return false;
  for (int l = 0; l < inst.L; ++l) {
    Eigen::VectorXd ev = whitened_eigenvalues(b.B[l], inst.Sigma[l]);
    if (ev.minCoeff() < -tol || ev.maxCoeff() > 1.0 + tol) return false;
  }
  return true;
}

/// The Appendix-D operating point Q_l = Sigma_l, i.e. B_l = Sigma_l^-1 / 2.
inline QuantizerB half_inverse_noise_quantizer(const NetworkInstance& inst) {
  QuantizerB b;
  b.B.reserve(inst.L);
  for (int l = 0; l < inst.L; ++l)
    b.B.push_back(hermitize(Matrix(0.5 * inst.Sigma[l].inverse()), 1e-7));
  return b;
}

/// B_l = Sigma_l^-1 (zero quantization noise, infinite fronthaul usage).
inline QuantizerB uncompressed_quantizer(const NetworkInstance& inst) {
  QuantizerB b;
  b.B.reserve(inst.L);
  for (int l = 0; l < inst.L; ++l)
    b.B.push_back(hermitize(Matrix(inst.Sigma[l].inverse()), 1e-7));
  return b;
}

inline QuantizerB zero_quantizer(const NetworkInstance& inst) {
  QuantizerB b;
  for (int l = 0; l < inst.L; ++l) b.B.push_back(Matrix::Zero(inst.N, inst.N));
  return b;
}

namespace detail {
inline Complex complex_gaussian(std::mt19937_64& rng) {
  // Box-Muller keeps the draw sequence platform-stable.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double u1 = 1.0 - u(rng);
  double u2 = u(rng);
  double r = std::sqrt(-std::log(u1));
  return Complex(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
}
}  // namespace detail

/// Deterministic random instance: i.i.d. circular complex Gaussian channels
/// rescaled so the average per-antenna receive SNR equals snr_db exactly,
/// with Sigma_l = I, Kx_k = (P_k/M) I, P_k = 1.
inline NetworkInstance random_instance(std::uint64_t seed, int K, int L, int M,
                                       int N, double snr_db,
                                       double fronthaul_bits = 4.0) {
  if (K < 1 || L < 1 || M < 1 || N < 1)
    throw std::invalid_argument("random_instance: dimensions must be >= 1");
  std::mt19937_64 rng(seed);
  NetworkInstance inst;
  inst.K = K;
  inst.L = L;
  inst.M = M;
  inst.N = N;
  inst.H.assign(L, std::vector<Matrix>(K));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      Matrix h(N, M);
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < M; ++c) h(r, c) = detail::complex_gaussian(rng);
      inst.H[l][k] = h;
    }
  inst.Sigma.assign(L, Matrix::Identity(N, N));
  inst.Kx.assign(K, Matrix::Identity(M, M) / double(M));
  inst.P.assign(K, 1.0);
  inst.C.assign(L, fronthaul_bits);

  // Empirical rescale: average over receive antennas of sum_k |H Kx H'|_nn
  // equals the target linear SNR (noise power 1 per antenna).
  double signal = 0.0;
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      signal += std::real((inst.H[l][k] * inst.Kx[k] * inst.H[l][k].adjoint()).trace());
  signal /= double(L * N);
  double target = std::pow(10.0, snr_db / 10.0);
  double scale = std::sqrt(target / signal);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) inst.H[l][k] *= scale;
  return inst;
}

/// Random feasible quantizer with whitened eigenvalues in [lo, hi].
inline QuantizerB random_quantizer(const NetworkInstance& inst,
                                   std::uint64_t seed, double lo = 0.05,
                                   double hi = 0.95) {
  std::mt19937_64 rng(seed);
  QuantizerB b;
  for (int l = 0; l < inst.L; ++l) {
    Matrix g(inst.N, inst.N);
    for (int r = 0; r < inst.N; ++r)
      for (int c = 0; c < inst.N; ++c) g(r, c) = detail::complex_gaussian(rng);
    Matrix h = 0.5 * (g + g.adjoint());
    // Squash eigenvalues into [lo, hi] with a linear map of their range.
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Eigen::VectorXd ev = es.eigenvalues();
    double span = std::max(ev.maxCoeff() - ev.minCoeff(), 1e-9);
    Eigen::VectorXd mapped =
        ((ev.array() - ev.minCoeff()) / span * (hi - lo) + lo).matrix();
    Matrix tilde = es.eigenvectors() * mapped.asDiagonal() *
                   es.eigenvectors().adjoint();
    Matrix si = herm_inv_sqrt(inst.Sigma[l]);
    b.B.push_back(hermitize(Matrix(si * tilde * si), 1e-7));
  }
  return b;
}

/// K = L = M = N = 1, h = 1, Sigma = 1, Kx = P = 1, C as given.
inline NetworkInstance scalar_unit_instance(double fronthaul_bits = 2.0) {
  NetworkInstance inst;
  inst.K = inst.L = inst.M = inst.N = 1;
  inst.H = {{Matrix::Ones(1, 1)}};
  inst.Sigma = {Matrix::Identity(1, 1)};
  inst.Kx = {Matrix::Identity(1, 1)};
  inst.P = {1.0};
  inst.C = {fronthaul_bits};
  return inst;
}

}  // namespace cran
