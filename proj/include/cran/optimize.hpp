#pragma once

// Quantizer optimization. All four programs maximize a concave value
// function of the reparameterized quantizers B (and, for the tradeoff
// program, the fronthaul variables C) over the Loewner box 0 <= B_l <=
// Sigma_l^-1:
//   * jd-weighted:            max_B  LP_x{ mu.x : rate constraints at B }
//   * sd-sum:                 max_B  min_S rhs(full-user-set, S)
//   * sd-sum-sum-fronthaul:   max_B  min{ I(X;Yhat_L), Csum - sum_l iy_l }
//   * rate-fronthaul-tradeoff max_{B,C} LP_x{...} - gamma nu.C, nu.C <= Csum
// The outer method is projected supergradient ascent (diminishing steps)
// followed by a feasible-segment golden-section polish along supergradient,
// coordinate, and random Hermitian directions. A zooming grid oracle over
// whitened-diagonal quantizers provides independent reference values for
// low-dimensional cases.

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "cran/gaussinfo.hpp"
#include "cran/model.hpp"
#include "cran/regions.hpp"

namespace cran {

inline constexpr double kBoxEps = 1e-9;  // whitened-eigenvalue margin

struct ObjectiveSpec {
  enum Kind { JdWeighted, SdSum, SdSumFronthaul, Tradeoff } kind = SdSum;
  std::vector<double> mu;  // user weights (JdWeighted, Tradeoff)
  std::vector<double> nu;  // fronthaul weights (Tradeoff)
  double gamma = 0.0;      // fronthaul price (Tradeoff)
  double Csum = 0.0;       // sum-fronthaul budget (SdSumFronthaul, Tradeoff)
};

struct TraceRow {
  int iter = 0;
  double value = 0.0;
  double step = 0.0;
};

struct SolveResult {
  QuantizerB b_star;
  std::vector<double> C_star;  // tradeoff only: fronthaul variables
  double value = 0.0;          // objective, bits
  RateFronthaulTuple point;    // achieved rates (and fronthaul) at b_star
  std::vector<double> slacks;  // rate-constraint slacks at the solution
  int iterations = 0;
  bool converged = false;
  double optimality_gap_estimate = 0.0;
  std::vector<TraceRow> trace;
};

struct SolveOptions {
  int max_iters = 20000;
  double rel_tol = 1e-9;  // relative best-value change over `window` iters
  int window = 50;
  bool record_trace = false;
  int polish_passes = 12;
};

// ---------------------------------------------------------------------------
// Small dense two-phase simplex: min c.z  s.t.  E z = d, z >= 0.
// Row count is at most the user count, so a dense basis inverse is fine.
// ---------------------------------------------------------------------------

struct LpSolution {
  bool ok = false;
  double value = 0.0;
  Eigen::VectorXd z;   // primal variables of the standard form
  Eigen::VectorXd pi;  // simplex multipliers of the equality rows
};

namespace detail {
inline LpSolution simplex_standard(const Eigen::MatrixXd& E,
                                   const Eigen::VectorXd& d,
                                   const Eigen::VectorXd& c) {
  const int p = (int)E.rows();
  const int n = (int)E.cols();
  // Phase 1: artificials with the sign of d so the start basis is feasible.
  Eigen::MatrixXd Ea(p, n + p);
  Ea.leftCols(n) = E;
  Ea.rightCols(p).setZero();
  Eigen::VectorXd da = d;
  for (int i = 0; i < p; ++i) {
    Ea(i, n + i) = (d(i) >= 0.0) ? 1.0 : -1.0;
    if (d(i) < 0.0) da(i) = d(i);
  }
  std::vector<int> basis(p);
  for (int i = 0; i < p; ++i) basis[i] = n + i;

  auto run = [&](const Eigen::VectorXd& cost, int ncols) -> bool {
    for (int iter = 0; iter < 50000; ++iter) {
      Eigen::MatrixXd B(p, p);
      for (int i = 0; i < p; ++i) B.col(i) = Ea.col(basis[i]);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
      Eigen::VectorXd cb(p);
      for (int i = 0; i < p; ++i) cb(i) = cost(basis[i]);
      Eigen::VectorXd pi = lu.transpose().solve(cb);
      // Bland's rule: first column with negative reduced cost.
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        bool inb = false;
        for (int i = 0; i < p; ++i)
          if (basis[i] == j) { inb = true; break; }
        if (inb) continue;
        double red = cost(j) - pi.dot(Ea.col(j));
        if (red < -1e-10) { enter = j; break; }
      }
      if (enter < 0) return true;  // optimal
      Eigen::VectorXd dir = lu.solve(Ea.col(enter));
      Eigen::VectorXd xb = lu.solve(da);
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < p; ++i) {
        if (dir(i) > 1e-12) {
          double ratio = xb(i) / dir(i);
          if (leave < 0 || ratio < best - 1e-15 ||
              (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      basis[leave] = enter;
    }
    return false;
  };

  LpSolution sol;
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + p);
  for (int i = 0; i < p; ++i) c1(n + i) = 1.0;
  if (!run(c1, n + p)) return sol;
  {  // check phase-1 objective ~ 0
    Eigen::MatrixXd B(p, p);
    for (int i = 0; i < p; ++i) B.col(i) = Ea.col(basis[i]);
    Eigen::VectorXd xb = B.partialPivLu().solve(da);
    double art = 0.0;
    for (int i = 0; i < p; ++i)
      if (basis[i] >= n) art += std::abs(xb(i));
    if (art > 1e-8) return sol;  // infeasible
  }
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + p);
  c2.head(n) = c;
  for (int i = 0; i < p; ++i) c2(n + i) = 1e9;  // keep artificials out
  if (!run(c2, n + p)) return sol;

  Eigen::MatrixXd B(p, p);
  for (int i = 0; i < p; ++i) B.col(i) = Ea.col(basis[i]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  Eigen::VectorXd xb = lu.solve(da);
  Eigen::VectorXd cb(p);
  for (int i = 0; i < p; ++i) cb(i) = c2(basis[i]);
  sol.z = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < p; ++i)
    if (basis[i] < n) sol.z(basis[i]) = xb(i);
  sol.pi = lu.transpose().solve(cb);
  sol.value = c.dot(sol.z);
  sol.ok = true;
  return sol;
}
}  // namespace detail

/// Exact inner rate LP: max mu.x over {x >= 0, sum_{k in T} x_k <= rhs_{T,S}}
/// solved through its dual (min rhs.y, A^T y >= mu, y >= 0), whose row count
/// equals the user count. Returns the rates x and the dual weights y used as
/// the supergradient mixture over constraints.
struct RateLpResult {
  bool ok = false;
  double value = 0.0;
  Eigen::VectorXd x;  // rates
  Eigen::VectorXd y;  // one weight per constraint, aligned with input order
};

inline RateLpResult solve_rate_lp(const std::vector<SubsetConstraint>& cons,
                                  const std::vector<double>& mu) {
  const int K = (int)mu.size();
  const int m = (int)cons.size();
  // Dual standard form: A^T y - s = mu, y >= 0, s >= 0, minimize rhs.y.
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(K, m + K);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m + K);
  for (int j = 0; j < m; ++j) {
    for (int k : mask_indices(cons[j].T)) E(k, j) = 1.0;
    c(j) = cons[j].rhs;
  }
  for (int k = 0; k < K; ++k) E(k, m + k) = -1.0;
  Eigen::VectorXd d(K);
  for (int k = 0; k < K; ++k) d(k) = mu[k];
  LpSolution sol = detail::simplex_standard(E, d, c);
  RateLpResult res;
  if (!sol.ok) return res;
  res.ok = true;
  res.value = sol.value;
  res.y = sol.z.head(m);
  res.x = sol.pi.cwiseMax(0.0);
  return res;
}

// ---------------------------------------------------------------------------
// Value functions with supergradients.
// ---------------------------------------------------------------------------

struct ValueGrad {
  double value = -kInf;
  std::vector<Matrix> gB;  // per-BS Hermitian gradients
  Eigen::VectorXd gC;      // tradeoff only
};

namespace detail {
inline double kLn2() { return 0.6931471805599453; }

/// Gradient of I(Y_l;Yhat_l|X) w.r.t. B_l: (Sigma^-1 - B)^-1 / ln 2.
inline Matrix grad_iy(const NetworkInstance& inst, const Matrix& Bl, int l) {
  Matrix D = inst.Sigma[l].inverse() - Bl;
  Matrix g = D.inverse() / kLn2();
  return 0.5 * (g + g.adjoint());
}

/// Per-BS gradients of I(X_T; Yhat_{Sc} | X_{T^c}) w.r.t. the B_l, l in Sc:
/// H_l Ks M^-1 Ks H_l' / ln 2 with M = I + Ks (sum H' B H) Ks.
inline void add_grad_ixy(const NetworkInstance& inst, const QuantizerB& b,
                         Mask T, Mask Sc, double w, std::vector<Matrix>& gB) {
  if (T == 0 || Sc == 0 || w == 0.0) return;
  Eigen::Index dim = (Eigen::Index)mask_size(T) * inst.M;
  Matrix A = Matrix::Zero(dim, dim);
  std::vector<Matrix> Hs(inst.L);
  for (int l : mask_indices(Sc)) {
    Hs[l] = stacked_channel(inst, l, T);
    A += Hs[l].adjoint() * b.B[l] * Hs[l];
  }
  Matrix Ks = herm_sqrt(input_covariance(inst, T));
  Matrix Minv = (Matrix::Identity(dim, dim) + Ks * A * Ks).inverse();
  Matrix core = Ks * Minv * Ks / kLn2();
  for (int l : mask_indices(Sc)) {
    Matrix g = Hs[l] * core * Hs[l].adjoint();
    gB[l] += w * 0.5 * (g + g.adjoint());
  }
}
}  // namespace detail

/// Uniform-weight value: min_S { sum_{l in S}[C_l - iy_l] + I(X;Yhat_{S^c}) }
/// (unclamped) and a supergradient from the minimizing cut. `C_override`
/// substitutes the instance fronthaul capacities when given.
inline ValueGrad sum_rate_value_grad(const NetworkInstance& inst,
                                     const QuantizerB& b,
                                     const double* C_override = nullptr) {
  Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, b, l);
  double best = kInf;
  Mask bestS = 0;
  for (Mask S = 0; S <= allL; ++S) {
    double v = (allL & ~S) ? i_x_yhat_cond(inst, b, allK, allL & ~S) : 0.0;
    for (int l : mask_indices(S))
      v += (C_override ? C_override[l] : inst.C[l]) - iy[l];
    if (v < best) {
      best = v;
      bestS = S;
    }
  }
  ValueGrad vg;
  vg.value = best;
  vg.gB.assign(inst.L, Matrix::Zero(inst.N, inst.N));
  for (int l : mask_indices(bestS)) vg.gB[l] -= detail::grad_iy(inst, b.B[l], l);
  detail::add_grad_ixy(inst, b, allK, allL & ~bestS, 1.0, vg.gB);
  return vg;
}

/// Sum-fronthaul value: min{ I(X;Yhat_L), Csum - sum_l iy_l } (unclamped).
inline ValueGrad sd_sumfronthaul_value_grad(const NetworkInstance& inst,
                                            const QuantizerB& b, double Csum) {
  Mask allK = full_mask(inst.K), allL = full_mask(inst.L);
  double air = i_x_yhat_cond(inst, b, allK, allL);
  double budget = Csum;
  for (int l = 0; l < inst.L; ++l) budget -= i_y_yhat_given_x(inst, b, l);
  ValueGrad vg;
  vg.value = std::min(air, budget);
  vg.gB.assign(inst.L, Matrix::Zero(inst.N, inst.N));
  std::vector<Matrix> ga(inst.L, Matrix::Zero(inst.N, inst.N));
  std::vector<Matrix> gc(inst.L, Matrix::Zero(inst.N, inst.N));
  detail::add_grad_ixy(inst, b, allK, allL, 1.0, ga);
  for (int l = 0; l < inst.L; ++l) gc[l] -= detail::grad_iy(inst, b.B[l], l);
  double eps = 1e-6 * (1.0 + std::abs(vg.value));
  if (air <= budget - eps) {
    vg.gB = std::move(ga);
  } else if (budget <= air - eps) {
    vg.gB = std::move(gc);
  } else {
    // Both pieces are active: the steepest-ascent direction of the min is the
    // minimal-norm point of the segment between the two piece gradients,
    // which follows the ridge instead of zig-zagging across it.
    double num = 0.0, den = 0.0;
    for (int l = 0; l < inst.L; ++l) {
      Matrix d = ga[l] - gc[l];
      num -= std::real((gc[l].adjoint() * d).trace());
      den += std::real((d.adjoint() * d).trace());
    }
    double lam = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.5;
    for (int l = 0; l < inst.L; ++l)
      vg.gB[l] = lam * ga[l] + (1.0 - lam) * gc[l];
  }
  return vg;
}

/// Weighted value through the exact rate LP; infeasible quantizers (negative
/// right-hand sides) get a concave penalty pushing back toward feasibility.
/// When `C_var`/`gamma`/`nu` are given (tradeoff), the gradient in C is
/// produced as well and gamma * nu.C is subtracted from the value.
inline ValueGrad weighted_value_grad(const NetworkInstance& inst,
                                     const QuantizerB& b,
                                     const std::vector<double>& mu,
                                     const Eigen::VectorXd* C_var = nullptr,
                                     const std::vector<double>* nu = nullptr,
                                     double gamma = 0.0) {
  Mask allL = full_mask(inst.L);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, b, l);
  auto cap = [&](int l) { return C_var ? (*C_var)(l) : inst.C[l]; };

  std::vector<SubsetConstraint> cons;
  for (Mask T = 1; T <= full_mask(inst.K); ++T)
    for (Mask S = 0; S <= allL; ++S) {
      double rhs = i_x_yhat_cond(inst, b, T, allL & ~S);
      for (int l : mask_indices(S)) rhs += cap(l) - iy[l];
      cons.push_back({T, S, rhs, ConstraintKind::JD, false});
    }

  ValueGrad vg;
  vg.gB.assign(inst.L, Matrix::Zero(inst.N, inst.N));
  vg.gC = Eigen::VectorXd::Zero(inst.L);
  double musum = 0.0;
  for (double m : mu) musum += m;
  double penalty_w = 1.0 + musum;

  bool infeasible = false;
  double pen = 0.0;
  for (const SubsetConstraint& c : cons)
    if (c.rhs < -1e-12) {
      infeasible = true;
      pen += c.rhs;
    }
  if (infeasible) {
    vg.value = penalty_w * pen;
    for (const SubsetConstraint& c : cons) {
      if (c.rhs >= -1e-12) continue;
      for (int l : mask_indices(c.S)) {
        vg.gB[l] -= penalty_w * detail::grad_iy(inst, b.B[l], l);
        vg.gC(l) += penalty_w;
      }
      detail::add_grad_ixy(inst, b, c.T, allL & ~c.S, penalty_w, vg.gB);
    }
  } else {
    RateLpResult lp = solve_rate_lp(cons, mu);
    if (!lp.ok) return vg;  // value stays -inf; caller treats as failure
    vg.value = lp.value;
    for (int j = 0; j < (int)cons.size(); ++j) {
      double w = lp.y(j);
      if (w <= 1e-12) continue;
      for (int l : mask_indices(cons[j].S)) {
        vg.gB[l] -= w * detail::grad_iy(inst, b.B[l], l);
        vg.gC(l) += w;
      }
      detail::add_grad_ixy(inst, b, cons[j].T, allL & ~cons[j].S, w, vg.gB);
    }
  }
  if (nu) {
    for (int l = 0; l < inst.L; ++l) {
      vg.value -= gamma * (*nu)[l] * cap(l);
      vg.gC(l) -= gamma * (*nu)[l];
    }
  }
  return vg;
}

// ---------------------------------------------------------------------------
// Projected supergradient ascent + golden-section polish.
// ---------------------------------------------------------------------------

/// Frobenius projection onto the Loewner box in the whitened metric:
/// eigenvalues of Sigma^{1/2} B Sigma^{1/2} clipped to [eps, 1-eps].
inline QuantizerB project_box(const NetworkInstance& inst, const QuantizerB& b,
                              double eps = kBoxEps) {
  QuantizerB out;
  out.B.reserve(inst.L);
  for (int l = 0; l < inst.L; ++l) {
    Matrix s = herm_sqrt(inst.Sigma[l]);
    Matrix si = herm_inv_sqrt(inst.Sigma[l]);
    Matrix w = s * b.B[l] * s;
    Matrix clipped = clip_eigenvalues(0.5 * (w + w.adjoint()), eps, 1.0 - eps);
    out.B.push_back(hermitize(Matrix(si * clipped * si), 1e-7));
  }
  return out;
}

/// Euclidean projection onto {C >= 0, nu.C <= Csum} by bisection on the
/// multiplier of the budget constraint.
inline Eigen::VectorXd project_budget(const Eigen::VectorXd& z,
                                      const std::vector<double>& nu,
                                      double Csum) {
  Eigen::VectorXd c = z.cwiseMax(0.0);
  double used = 0.0;
  for (int l = 0; l < c.size(); ++l) used += nu[l] * c(l);
  if (used <= Csum) return c;
  double lo = 0.0, hi = 1.0;
  auto usage = [&](double lam) {
    double u = 0.0;
    for (int l = 0; l < z.size(); ++l)
      u += nu[l] * std::max(z(l) - lam * nu[l], 0.0);
    return u;
  };
  while (usage(hi) > Csum) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (usage(mid) > Csum ? lo : hi) = mid;
  }
  for (int l = 0; l < c.size(); ++l) c(l) = std::max(z(l) - hi * nu[l], 0.0);
  return c;
}

namespace detail {

struct Iterate {
  QuantizerB b;
  Eigen::VectorXd c;  // empty unless the objective has fronthaul variables
};

using ValueGradFn = std::function<ValueGrad(const Iterate&)>;

inline bool iterate_feasible(const NetworkInstance& inst, const Iterate& it,
                             const std::vector<double>* nu, double Csum) {
  for (int l = 0; l < inst.L; ++l) {
    Eigen::VectorXd ev = whitened_eigenvalues(it.b.B[l], inst.Sigma[l]);
    if (ev.minCoeff() < kBoxEps - 1e-12 || ev.maxCoeff() > 1.0 - kBoxEps + 1e-12)
      return false;
  }
  if (it.c.size() > 0) {
    double used = 0.0;
    for (int l = 0; l < it.c.size(); ++l) {
      if (it.c(l) < -1e-12) return false;
      used += (*nu)[l] * it.c(l);
    }
    if (used > Csum + 1e-12) return false;
  }
  return true;
}

/// Largest / smallest t with base + t * dir still feasible (the feasible set
/// is convex so the feasible t form an interval); found by bisection.
inline std::pair<double, double> feasible_interval(
    const NetworkInstance& inst, const Iterate& base, const Iterate& dir,
    const std::vector<double>* nu, double Csum, double tmax) {
  auto at = [&](double t) {
    Iterate it = base;
    for (int l = 0; l < inst.L; ++l) it.b.B[l] += t * dir.b.B[l];
    if (it.c.size() > 0) it.c += t * dir.c;
    return it;
  };
  auto edge = [&](double sign) {
    if (!iterate_feasible(inst, at(sign * 1e-14), nu, Csum)) return 0.0;
    double lo = 0.0, hi = tmax;
    if (iterate_feasible(inst, at(sign * hi), nu, Csum)) return sign * hi;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (iterate_feasible(inst, at(sign * mid), nu, Csum) ? lo : hi) = mid;
    }
    return sign * lo;
  };
  return {edge(-1.0), edge(+1.0)};
}

inline double golden_max(const std::function<double(double)>& f, double a,
                         double b, int iters = 80) {
  const double phi = 0.6180339887498949;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-15; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

inline SolveResult ascend(const NetworkInstance& inst, const ValueGradFn& fn,
                          Iterate start, const std::vector<double>* nu,
                          double Csum, const SolveOptions& opt) {
  SolveResult res;
  Iterate cur = start;
  cur.b = project_box(inst, cur.b);
  if (cur.c.size() > 0) cur.c = project_budget(cur.c, *nu, Csum);

  double sigscale = 0.0;
  for (int l = 0; l < inst.L; ++l)
    sigscale = std::max(sigscale, herm_eigenvalues(inst.Sigma[l]).cwiseInverse().maxCoeff());
  double step0 = 0.25 * sigscale;

  Iterate best = cur;
  ValueGrad vg = fn(cur);
  double best_val = vg.value;

  // Diminishing-step supergradient ascent.
  auto stage = [&](double s0, int iters, bool primary) {
    cur = best;
    vg = fn(cur);
    double window_ref = best_val;
    int t = 0;
    for (t = 1; t <= iters; ++t) {
      double norm2 = 0.0;
      for (const Matrix& g : vg.gB) norm2 += g.squaredNorm();
      if (vg.gC.size() > 0 && cur.c.size() > 0) norm2 += vg.gC.squaredNorm();
      double norm = std::sqrt(norm2);
      double step = s0 / std::sqrt((double)t);
      if (norm > 1e-15) {
        for (int l = 0; l < inst.L; ++l) cur.b.B[l] += (step / norm) * vg.gB[l];
        if (cur.c.size() > 0) cur.c += (step / norm) * vg.gC;
      }
      cur.b = project_box(inst, cur.b);
      if (cur.c.size() > 0) cur.c = project_budget(cur.c, *nu, Csum);
      vg = fn(cur);
      if (vg.value > best_val) {
        best_val = vg.value;
        best = cur;
      }
      if (opt.record_trace && primary) res.trace.push_back({t, vg.value, step});
      if (t % opt.window == 0) {
        double denom = std::max(1.0, std::abs(best_val));
        if (std::abs(best_val - window_ref) / denom < opt.rel_tol) {
          if (primary) res.converged = true;
          break;
        }
        window_ref = best_val;
      }
    }
    if (primary) res.iterations = std::min(t, iters);
  };
  stage(step0, opt.max_iters, true);

  // Polish: golden-section searches along the feasible segment in several
  // directions; the value is concave along any line, so each 1-D search is
  // exact up to tolerance.
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto value_at = [&](const Iterate& base, const Iterate& dir, double tt) {
    Iterate it = base;
    for (int l = 0; l < inst.L; ++l) it.b.B[l] += tt * dir.b.B[l];
    if (it.c.size() > 0) it.c += tt * dir.c;
    return fn(it).value;
  };
  double before_polish = best_val;
  for (int pass = 0; pass < opt.polish_passes; ++pass) {
    double pass_start = best_val;
    std::vector<Iterate> dirs;
    // Supergradient direction at the incumbent.
    ValueGrad gb = fn(best);
    Iterate d0;
    d0.b.B = gb.gB;
    if (best.c.size() > 0) d0.c = gb.gC;
    dirs.push_back(d0);
    // Whitened eigenmode coordinate directions of each B block.
    for (int l = 0; l < inst.L; ++l) {
      Matrix s = herm_sqrt(inst.Sigma[l]);
      Matrix si = herm_inv_sqrt(inst.Sigma[l]);
      Eigen::SelfAdjointEigenSolver<Matrix> es(s * best.b.B[l] * s);
      for (int i = 0; i < inst.N; ++i) {
        Iterate d;
        d.b.B.assign(inst.L, Matrix::Zero(inst.N, inst.N));
        Vector u = es.eigenvectors().col(i);
        d.b.B[l] = si * (u * u.adjoint()) * si;
        if (best.c.size() > 0) d.c = Eigen::VectorXd::Zero(inst.L);
        dirs.push_back(d);
      }
    }
    // Fronthaul coordinate directions.
    if (best.c.size() > 0) {
      for (int l = 0; l < inst.L; ++l) {
        Iterate d;
        d.b.B.assign(inst.L, Matrix::Zero(inst.N, inst.N));
        d.c = Eigen::VectorXd::Zero(inst.L);
        d.c(l) = 1.0;
        dirs.push_back(d);
      }
    }
    // Random Hermitian directions.
    for (int r = 0; r < 2; ++r) {
      Iterate d;
      d.b.B.reserve(inst.L);
      for (int l = 0; l < inst.L; ++l) {
        Matrix g(inst.N, inst.N);
        for (int i = 0; i < inst.N; ++i)
          for (int j = 0; j < inst.N; ++j)
            g(i, j) = Complex(gauss(rng), gauss(rng));
        d.b.B.push_back(Matrix(0.5 * (g + g.adjoint())));
      }
      if (best.c.size() > 0) {
        d.c = Eigen::VectorXd::Zero(inst.L);
        for (int l = 0; l < inst.L; ++l) d.c(l) = gauss(rng);
      }
      dirs.push_back(d);
    }
    for (Iterate& d : dirs) {
      double n2 = 0.0;
      for (const Matrix& g : d.b.B) n2 += g.squaredNorm();
      if (d.c.size() > 0) n2 += d.c.squaredNorm();
      if (n2 < 1e-24) continue;
      double inv = 1.0 / std::sqrt(n2);
      for (Matrix& g : d.b.B) g *= inv;
      if (d.c.size() > 0) d.c *= inv;
      double tmax = 4.0 * (sigscale + (d.c.size() > 0 ? Csum + 1.0 : 0.0));
      auto [tlo, thi] = feasible_interval(inst, best, d, nu, Csum, tmax);
      if (thi - tlo < 1e-14) continue;
      double tstar = golden_max(
          [&](double tt) { return value_at(best, d, tt); }, tlo, thi);
      double v = value_at(best, d, tstar);
      if (v > best_val) {
        best_val = v;
        for (int l = 0; l < inst.L; ++l) best.b.B[l] += tstar * d.b.B[l];
        if (best.c.size() > 0) best.c += tstar * d.c;
      }
    }
    if (best_val - pass_start < 1e-12) break;
  }
  res.optimality_gap_estimate = best_val - before_polish;

  res.b_star = best.b;
  if (best.c.size() > 0)
    res.C_star.assign(best.c.data(), best.c.data() + best.c.size());
  res.value = best_val;
  return res;
}
}  // namespace detail

namespace detail {
inline void fill_solution_point(const NetworkInstance& inst, SolveResult& res,
                                const std::vector<double>& mu,
                                const double* C_override) {
  std::vector<SubsetConstraint> cons;
  Mask allL = full_mask(inst.L);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, res.b_star, l);
  for (Mask T = 1; T <= full_mask(inst.K); ++T)
    for (Mask S = 0; S <= allL; ++S) {
      double rhs = i_x_yhat_cond(inst, res.b_star, T, allL & ~S);
      for (int l : mask_indices(S))
        rhs += (C_override ? C_override[l] : inst.C[l]) - iy[l];
      cons.push_back({T, S, std::max(rhs, 0.0), ConstraintKind::JD, rhs < 0.0});
    }
  RateLpResult lp = solve_rate_lp(cons, mu);
  res.point.R.assign(inst.K, 0.0);
  if (lp.ok)
    for (int k = 0; k < inst.K; ++k) res.point.R[k] = lp.x(k);
  res.point.C = C_override
                    ? std::vector<double>(C_override, C_override + inst.L)
                    : inst.C;
  res.slacks.clear();
  for (const SubsetConstraint& c : cons) {
    double sum = 0.0;
    for (int k : mask_indices(c.T)) sum += res.point.R[k];
    res.slacks.push_back(c.rhs - sum);
  }
}

inline bool uniform_weights(const std::vector<double>& mu) {
  for (double m : mu)
    if (m != mu.front()) return false;
  return true;
}
}  // namespace detail

/// Weighted sum-rate maximization under joint decoding (individual
/// fronthaul). Uniform weight vectors route through the same min-cut value
/// function as the successive-decoding sum-rate solver, which the decoding
/// equivalence guarantees is the same optimum.
inline SolveResult maximize_weighted_sum_jd(const NetworkInstance& inst,
                                            const std::vector<double>& mu,
                                            const SolveOptions& opt = {}) {
  check_enum_cap(inst);
  if ((int)mu.size() != inst.K)
    throw std::invalid_argument("maximize_weighted_sum_jd: bad weight count");
  for (double m : mu)
    if (m < 0.0)
      throw std::invalid_argument("maximize_weighted_sum_jd: negative weight");
  detail::Iterate start;
  start.b = half_inverse_noise_quantizer(inst);
  SolveResult res;
  if (detail::uniform_weights(mu)) {
    double mu0 = mu.front();
    res = detail::ascend(
        inst,
        [&](const detail::Iterate& it) { return sum_rate_value_grad(inst, it.b); },
        start, nullptr, 0.0, opt);
    res.value = mu0 * std::max(res.value, 0.0);
  } else {
    res = detail::ascend(
        inst,
        [&](const detail::Iterate& it) {
          return weighted_value_grad(inst, it.b, mu);
        },
        start, nullptr, 0.0, opt);
    res.value = std::max(res.value, 0.0);
  }
  detail::fill_solution_point(inst, res, mu, nullptr);
  return res;
}

/// Successive-decoding sum-rate maximization under individual fronthaul
/// constraints.
inline SolveResult maximize_sum_sd_individual(const NetworkInstance& inst,
                                              const SolveOptions& opt = {}) {
  check_enum_cap(inst);
  detail::Iterate start;
  start.b = half_inverse_noise_quantizer(inst);
  SolveResult res = detail::ascend(
      inst,
      [&](const detail::Iterate& it) { return sum_rate_value_grad(inst, it.b); },
      start, nullptr, 0.0, opt);
  res.value = std::max(res.value, 0.0);
  detail::fill_solution_point(inst, res, std::vector<double>(inst.K, 1.0),
                              nullptr);
  return res;
}

/// Successive-decoding sum-rate maximization under a total fronthaul budget
/// (two constraints only).
inline SolveResult maximize_sum_sd_sumfronthaul(const NetworkInstance& inst,
                                                double Csum,
                                                const SolveOptions& opt = {}) {
  if (Csum < 0.0)
    throw std::invalid_argument("maximize_sum_sd_sumfronthaul: Csum < 0");
  detail::Iterate start;
  start.b = half_inverse_noise_quantizer(inst);
  SolveResult res = detail::ascend(
      inst,
      [&](const detail::Iterate& it) {
        return sd_sumfronthaul_value_grad(inst, it.b, Csum);
      },
      start, nullptr, 0.0, opt);
  res.value = std::max(res.value, 0.0);
  res.point.R.assign(inst.K, 0.0);
  res.point.R[0] = res.value;  // sum rate
  res.point.C.assign(inst.L, 0.0);
  double compression = 0.0;  // quantization overhead on top of the sum rate
  for (int l = 0; l < inst.L; ++l) {
    res.point.C[l] = i_y_yhat_given_x(inst, res.b_star, l);
    compression += res.point.C[l];
  }
  double air =
      i_x_yhat_cond(inst, res.b_star, full_mask(inst.K), full_mask(inst.L));
  res.slacks = {air - res.value, Csum - res.value - compression};
  return res;
}

/// Joint optimization of rates, quantizers, and fronthaul allocations:
/// max mu.R - gamma nu.C subject to the rate constraints and nu.C <= Csum.
inline SolveResult weighted_rate_fronthaul_tradeoff(
    const NetworkInstance& inst, const std::vector<double>& mu,
    const std::vector<double>& nu, double gamma, double Csum,
    const SolveOptions& opt = {}) {
  check_enum_cap(inst);
  if ((int)mu.size() != inst.K || (int)nu.size() != inst.L)
    throw std::invalid_argument("tradeoff: bad weight vector length");
  for (double v : nu)
    if (v < 0.0) throw std::invalid_argument("tradeoff: negative nu");
  if (gamma < 0.0) throw std::invalid_argument("tradeoff: negative gamma");
  detail::Iterate start;
  start.b = half_inverse_noise_quantizer(inst);
  // Start at an even split of the budget across the links.
  double nsum = 0.0;
  for (double v : nu) nsum += v;
  start.c = Eigen::VectorXd::Constant(inst.L,
                                      nsum > 1e-12 ? Csum / nsum : 1.0);
  start.c = project_budget(start.c, nu, Csum);
  SolveResult res = detail::ascend(
      inst,
      [&](const detail::Iterate& it) {
        return weighted_value_grad(inst, it.b, mu, &it.c, &nu, gamma);
      },
      start, &nu, Csum, opt);
  detail::fill_solution_point(inst, res, mu, res.C_star.data());
  return res;
}

// ---------------------------------------------------------------------------
// Independent grid oracle.
// ---------------------------------------------------------------------------

/// Objective value at a fixed quantizer (and fronthaul vector for the
/// tradeoff), evaluated purely through region-level primitives.
inline double oracle_objective_value(const NetworkInstance& inst,
                                     const ObjectiveSpec& spec,
                                     const QuantizerB& b,
                                     const Eigen::VectorXd* C_var = nullptr) {
  NetworkInstance work = inst;
  if (C_var)
    for (int l = 0; l < inst.L; ++l) work.C[l] = (*C_var)(l);
  auto weighted_inner = [&](const std::vector<double>& mu) {
    if (detail::uniform_weights(mu))
      return mu.front() * jd_sum_rate_fixed_b(work, b);
    if (inst.K == 1) return mu[0] * jd_sum_rate_fixed_b(work, b);
    if (inst.K == 2) {
      auto pts = two_user_boundary(jd_constraints(work, b));
      double best = 0.0;
      for (auto& p : pts)
        best = std::max(best, mu[0] * p.first + mu[1] * p.second);
      return best;
    }
    throw std::invalid_argument("oracle: weighted objective needs K <= 2");
  };
  switch (spec.kind) {
    case ObjectiveSpec::SdSum:
      return jd_sum_rate_fixed_b(work, b);
    case ObjectiveSpec::JdWeighted:
      return weighted_inner(spec.mu);
    case ObjectiveSpec::SdSumFronthaul: {
      double budget = spec.Csum;
      for (int l = 0; l < inst.L; ++l) budget -= i_y_yhat_given_x(inst, b, l);
      double air = i_x_yhat_cond(inst, b, full_mask(inst.K), full_mask(inst.L));
      return std::max(std::min(air, budget), 0.0);
    }
    case ObjectiveSpec::Tradeoff: {
      double price = 0.0;
      for (int l = 0; l < inst.L; ++l) price += spec.nu[l] * work.C[l];
      return weighted_inner(spec.mu) - spec.gamma * price;
    }
  }
  return -kInf;
}

/// Zooming dense grid over whitened-diagonal quantizers (and fronthaul axes
/// for the tradeoff). Requires at most 3 scalar degrees of freedom. The
/// value function is concave, so re-centering the shrinking window on the
/// incumbent never loses the maximum.
inline double grid_oracle(const NetworkInstance& inst, const ObjectiveSpec& spec,
                          int resolution = 0) {
  if (inst.N != 1)
    throw std::invalid_argument(
        "grid_oracle: whitened-diagonal search is exhaustive only for "
        "single-antenna BSs");
  int bdof = inst.L * inst.N;
  int cdof = spec.kind == ObjectiveSpec::Tradeoff ? inst.L : 0;
  int dof = bdof + cdof;
  if (dof > 3)
    throw std::invalid_argument("grid_oracle: more than 3 degrees of freedom");
  if (resolution <= 0) resolution = dof == 1 ? 201 : dof == 2 ? 41 : 17;
  if (resolution > 400)
    throw std::invalid_argument("grid_oracle: resolution above 400");

  std::vector<Matrix> si(inst.L);
  for (int l = 0; l < inst.L; ++l) si[l] = herm_inv_sqrt(inst.Sigma[l]);
  double cmax = 0.0;
  if (cdof > 0) {
    double numin = kInf;
    for (double v : spec.nu) numin = std::min(numin, v);
    cmax = numin > 1e-12 ? spec.Csum / numin : spec.Csum + 10.0;
  }

  std::vector<double> lo(dof), hi(dof), best_pt(dof, 0.0);
  for (int i = 0; i < bdof; ++i) {
    lo[i] = kBoxEps;
    hi[i] = 1.0 - kBoxEps;
  }
  for (int i = bdof; i < dof; ++i) {
    lo[i] = 0.0;
    hi[i] = cmax;
  }

  auto eval = [&](const std::vector<double>& pt) {
    QuantizerB b;
    b.B.reserve(inst.L);
    for (int l = 0; l < inst.L; ++l) {
      Eigen::VectorXd diag(inst.N);
      for (int i = 0; i < inst.N; ++i) diag(i) = pt[l * inst.N + i];
      Matrix w = Matrix::Zero(inst.N, inst.N);
      w.diagonal() = diag.cast<Complex>();
      b.B.push_back(hermitize(Matrix(si[l] * w * si[l]), 1e-7));
    }
    Eigen::VectorXd cv;
    if (cdof > 0) {
      cv.resize(inst.L);
      double used = 0.0;
      for (int l = 0; l < inst.L; ++l) {
        cv(l) = pt[bdof + l];
        used += spec.nu[l] * cv(l);
      }
      if (used > spec.Csum + 1e-12) return -kInf;
    }
    return oracle_objective_value(inst, spec, b, cdof > 0 ? &cv : nullptr);
  };

  double best = -kInf;
  std::vector<int> idx(dof, 0);
  for (int round = 0; round < 10; ++round) {
    std::fill(idx.begin(), idx.end(), 0);
    bool done = false;
    while (!done) {
      std::vector<double> pt(dof);
      for (int i = 0; i < dof; ++i)
        pt[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (double)(resolution - 1);
      double v = eval(pt);
      if (v > best) {
        best = v;
        best_pt = pt;
      }
      int i = 0;
      for (; i < dof; ++i) {
        if (++idx[i] < resolution) break;
        idx[i] = 0;
      }
      done = i == dof;
    }
    // Zoom on the incumbent.
    for (int i = 0; i < dof; ++i) {
      double width = (hi[i] - lo[i]) * 0.35;
      double floor_i = i < bdof ? kBoxEps : 0.0;
      double ceil_i = i < bdof ? 1.0 - kBoxEps : cmax;
      lo[i] = std::max(best_pt[i] - 0.5 * width, floor_i);
      hi[i] = std::min(best_pt[i] + 0.5 * width, ceil_i);
    }
  }
  return best;
}

/// Solve-trace CSV (iteration, objective value, step length).
inline std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "iteration,value_bits_per_complex_dim,step\n";
  os << std::setprecision(17);
  for (const TraceRow& r : trace)
    os << r.iter << ',' << r.value << ',' << r.step << "\n";
  return os.str();
}

}  // namespace cran
