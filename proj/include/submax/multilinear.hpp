#pragma once

// Multilinear extension of a set function.
//
// F(y) = E[f(S_y)] where S_y includes each element v independently with
// probability y_v. For monotone submodular f, F is nondecreasing in every
// coordinate and concave along nonnegative directions; it is linear in each
// single coordinate, which the one-sample gradient estimator below exploits.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "submax/core.hpp"
#include "submax/rng.hpp"

namespace submax {

inline void validate_unit_cube(const std::vector<double>& y) {
  for (double v : y)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("multilinear: coordinates must lie in [0, 1]");
}

struct MultilinearEstimator {
  enum class Mode { Exact, Sampled };
  Mode mode = Mode::Exact;
  int samples = 1000;
  int cap = 20;  // max count of strictly fractional coordinates in Exact mode

  static MultilinearEstimator exact(int cap = 20) {
    return {Mode::Exact, 1000, cap};
  }
  static MultilinearEstimator sampled(int rho) { return {Mode::Sampled, rho, 20}; }
};

// F(y). Exact mode sums over subsets of the strictly fractional coordinates
// (coordinates at 0 or 1 are resolved up front), so F(indicator of S) equals
// f(S) exactly, with a single oracle call.
inline double multilinear_eval(const ValueOracle& f, const std::vector<double>& y,
                               const MultilinearEstimator& est, Rng* rng = nullptr) {
  validate_unit_cube(y);
  const int n = static_cast<int>(y.size());

  if (est.mode == MultilinearEstimator::Mode::Sampled) {
    if (rng == nullptr)
      throw std::invalid_argument("multilinear_eval: sampled mode needs an rng");
    double total = 0.0;
    for (int it = 0; it < est.samples; ++it) {
      std::vector<ItemId> ids;
      for (int v = 0; v < n; ++v)
        if (rng->uniform() < y[v]) ids.push_back(v);
      total += f(ItemSet(std::move(ids)));
    }
    return total / est.samples;
  }

  std::vector<ItemId> certain, frac;
  for (int v = 0; v < n; ++v) {
    if (y[v] >= 1.0) certain.push_back(v);
    else if (y[v] > 0.0) frac.push_back(v);
  }
  if (static_cast<int>(frac.size()) > est.cap)
    throw cap_exceeded("multilinear_eval: too many fractional coordinates for exact mode");
  const std::uint64_t full = 1ull << frac.size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    double prob = 1.0;
    std::vector<ItemId> ids = certain;
    for (std::size_t i = 0; i < frac.size(); ++i) {
      if (mask & (1ull << i)) {
        prob *= y[frac[i]];
        ids.push_back(frac[i]);
      } else {
        prob *= 1.0 - y[frac[i]];
      }
    }
    total += prob * f(ItemSet(std::move(ids)));
  }
  return total;
}

// All coordinates of the marginal vector, (dF(y))_v = E[f(S_y + v) - f(S_y)].
// Equals (1 - y_v) times the partial derivative of F at y. Sampled mode
// reuses one batch of sampled sets for every coordinate.
inline std::vector<double> multilinear_marginals(const ValueOracle& f,
                                                 const std::vector<double>& y,
                                                 const MultilinearEstimator& est,
                                                 Rng* rng = nullptr) {
  validate_unit_cube(y);
  const int n = static_cast<int>(y.size());
  std::vector<double> out(n, 0.0);

  if (est.mode == MultilinearEstimator::Mode::Sampled) {
    if (rng == nullptr)
      throw std::invalid_argument("multilinear_marginals: sampled mode needs an rng");
    for (int it = 0; it < est.samples; ++it) {
      std::vector<ItemId> ids;
      for (int v = 0; v < n; ++v)
        if (rng->uniform() < y[v]) ids.push_back(v);
      ItemSet s(std::move(ids));
      double base = f(s);
      for (int v = 0; v < n; ++v)
        out[v] += s.contains(v) ? 0.0 : f(s.with(v)) - base;
    }
    for (double& x : out) x /= est.samples;
    return out;
  }

  const double base = multilinear_eval(f, y, est);
  for (int v = 0; v < n; ++v) {
    if (y[v] >= 1.0) {
      out[v] = 0.0;  // v is already always present
      continue;
    }
    std::vector<double> up(y);
    up[v] = 1.0;
    out[v] = multilinear_eval(f, up, est) - base;
  }
  return out;
}

// Single-coordinate unbiased estimate of the marginal vector.
struct SparseEstimate {
  ItemId coord = -1;
  double value = 0.0;
};

// Draw v uniformly, sample S_y once, and return +-2n * f(.) on coordinate v:
// with a fair coin X, the estimate is 2n*f(S_y + v) if X = 1 and
// -2n*f(S_y) if X = 0, so its expectation is exactly the marginal vector.
// Costs one oracle evaluation.
inline SparseEstimate sample_marginal_estimate(const ValueOracle& f,
                                               const std::vector<double>& y, Rng& rng) {
  validate_unit_cube(y);
  const int n = static_cast<int>(y.size());
  if (n == 0) throw std::invalid_argument("sample_marginal_estimate: empty point");
  const ItemId v = rng.uniform_int(n);
  std::vector<ItemId> ids;
  for (int u = 0; u < n; ++u)
    if (rng.uniform() < y[u]) ids.push_back(u);
  ItemSet a(std::move(ids));
  const bool upper = rng.bernoulli(0.5);
  const double two_n = 2.0 * n;
  if (upper) return {v, two_n * f(a.with(v))};
  return {v, -two_n * f(a)};
}

}  // namespace submax
