#pragma once

// Set-function machinery: submodularity / supermodularity brute-force checks
// with witnesses, the greedy extreme-point construction for the associated
// polyhedra, and the two concrete set functions used by the decoding
// equivalence arguments.

#include <functional>
#include <utility>
#include <vector>

#include "cran/gaussinfo.hpp"
#include "cran/model.hpp"
#include "cran/subsets.hpp"

namespace cran {

/// Memoized real-valued function on subsets of {0..n-1}.
struct SetFunction {
  int n = 0;
  std::function<double(Mask)> eval_fn;

  SetFunction() = default;
  SetFunction(int n_, std::function<double(Mask)> fn)
      : n(n_), eval_fn(std::move(fn)), cache_((std::size_t)1 << n_, 0.0),
        have_((std::size_t)1 << n_, 0) {}

  double operator()(Mask m) const {
    if (!have_[m]) {
      cache_[m] = eval_fn(m);
      have_[m] = 1;
    }
    return cache_[m];
  }

 private:
  mutable std::vector<double> cache_;
  mutable std::vector<char> have_;
};

struct ModularityCheck {
  bool ok = true;
  Mask S = 0, T = 0;  // violating pair when !ok
  double violation = 0.0;
};

/// Brute force over all subset pairs: f(S) + f(T) >= f(S|T) + f(S&T).
inline ModularityCheck is_submodular(const SetFunction& f, double tol = 1e-9) {
  if (f.n > 12) throw std::invalid_argument("is_submodular: ground set too large");
  Mask full = full_mask(f.n);
  for (Mask S = 0; S <= full; ++S)
    for (Mask T = S; T <= full; ++T) {
      double lhs = f(S) + f(T);
      double rhs = f(S | T) + f(S & T);
      if (lhs < rhs - tol) return {false, S, T, rhs - lhs};
    }
  return {};
}

/// Brute force: g(S) + g(T) <= g(S|T) + g(S&T).
inline ModularityCheck is_supermodular(const SetFunction& g, double tol = 1e-9) {
  if (g.n > 12) throw std::invalid_argument("is_supermodular: ground set too large");
  Mask full = full_mask(g.n);
  for (Mask S = 0; S <= full; ++S)
    for (Mask T = S; T <= full; ++T) {
      double lhs = g(S) + g(T);
      double rhs = g(S | T) + g(S & T);
      if (lhs > rhs + tol) return {false, S, T, lhs - rhs};
    }
  return {};
}

/// Greedy chain increments along `ordering`: v_{i_j} = f(chain_j) -
/// f(chain_{j-1}). For submodular f this is an extreme point of
/// {x : sum_{i in S} x_i <= f(S) for all S}; for supermodular g the same
/// increments give an extreme point of the mirrored >=-constraint
/// polyhedron.
inline std::vector<double> greedy_extreme_point(const SetFunction& f,
                                                const std::vector<int>& ordering) {
  if ((int)ordering.size() != f.n)
    throw std::invalid_argument("greedy_extreme_point: bad ordering size");
  std::vector<double> v(f.n, 0.0);
  Mask chain = 0;
  double prev = f(0);
  for (int idx : ordering) {
    chain |= Mask(1) << idx;
    double cur = f(chain);
    v[idx] = cur - prev;
    prev = cur;
  }
  return v;
}

/// Membership slack of v in {x : sum_{i in S} x_i <= f(S)}: the minimum of
/// f(S) - sum_{i in S} v_i over all S.
inline double polyhedron_min_slack(const SetFunction& f,
                                   const std::vector<double>& v) {
  double worst = kInf;
  Mask full = full_mask(f.n);
  for (Mask S = 0; S <= full; ++S) {
    double sum = 0.0;
    for (int i : mask_indices(S)) sum += v[i];
    worst = std::min(worst, f(S) - sum);
  }
  return worst;
}

/// Sum-fronthaul value function over user subsets at fixed quantizer:
/// f(T) = min{ Csum - sum_l I(Y_l;Yhat_l|X), I(X_T; Yhat_L | X_{T^c}) }.
inline SetFunction f_jd_sumfronthaul(const NetworkInstance& inst,
                                     const QuantizerB& b, double Csum) {
  double penalty = 0.0;
  for (int l = 0; l < inst.L; ++l) penalty += i_y_yhat_given_x(inst, b, l);
  double cprime = Csum - penalty;
  Mask allL = full_mask(inst.L);
  return SetFunction(inst.K, [inst, b, cprime, allL](Mask T) {
    double air = (T == 0) ? 0.0 : i_x_yhat_cond(inst, b, T, allL);
    return std::min(cprime, air);
  });
}

/// Fronthaul set functions over BS subsets at fixed quantizer and target sum
/// rate R: g(S) = R + sum_{l in S} I(Y_l;Yhat_l|X) - I(X; Yhat_{S^c}), and
/// its nonnegative part g+. Returns {g, g+}.
inline std::pair<SetFunction, SetFunction> g_fronthaul(
    const NetworkInstance& inst, const QuantizerB& b, double R_jd) {
  Mask allK = full_mask(inst.K);
  Mask allL = full_mask(inst.L);
  std::vector<double> iy(inst.L);
  for (int l = 0; l < inst.L; ++l) iy[l] = i_y_yhat_given_x(inst, b, l);
  auto raw = [inst, b, R_jd, iy, allK, allL](Mask S) {
    double v = R_jd;
    for (int l : mask_indices(S)) v += iy[l];
    Mask Sc = allL & ~S;
    if (Sc) v -= i_x_yhat_cond(inst, b, allK, Sc);
    return v;
  };
  SetFunction g(inst.L, raw);
  SetFunction gplus(inst.L, [raw](Mask S) { return std::max(raw(S), 0.0); });
  return {std::move(g), std::move(gplus)};
}

}  // namespace cran
