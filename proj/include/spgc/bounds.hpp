// Executable forms of the theoretical results: Rademacher complexity bounds
// for LGC and EGC, a Monte-Carlo empirical Rademacher estimator, the EGC
// truncation-error bound, and per-hop coefficient extraction.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spgc/graph.hpp"
#include "spgc/models.hpp"
#include "spgc/propagation.hpp"
#include "spgc/rng.hpp"

namespace spgc {

struct BoundInputs {
  double a = 1.0;          // coefficient cap: ||alpha||_inf <= a or |beta| <= a
  double b = 1.0;          // ||Theta||_1 cap
  double M = 1.0;          // sup |X_ij|
  double lipschitz = 1.0;  // Lipschitz constant of the activation
  std::size_t k = 0;
  double l1_norm = 0.0;  // ||L||_1 of the propagation operator
  std::size_t L_samples = 1;
};

namespace detail {
inline void check_bound_inputs(const BoundInputs& in) {
  if (in.a <= 0.0 || in.b <= 0.0 || in.M <= 0.0 || in.lipschitz <= 0.0 || in.l1_norm <= 0.0 ||
      in.L_samples < 1)
    throw std::invalid_argument("bound inputs must be strictly positive");
}
}  // namespace detail

// (b M Lambda / sqrt(L)) * sum_{i=0}^k a ||L||_1^i, geometric sum in closed
// form away from ||L||_1 = 1.
inline double lgc_rademacher_bound(const BoundInputs& in) {
  detail::check_bound_inputs(in);
  const double x = in.l1_norm;
  double geo;
  if (std::fabs(x - 1.0) < 1e-12) {
    geo = static_cast<double>(in.k + 1);
  } else {
    geo = (std::pow(x, static_cast<double>(in.k + 1)) - 1.0) / (x - 1.0);
  }
  return in.b * in.M * in.lipschitz / std::sqrt(static_cast<double>(in.L_samples)) * in.a * geo;
}

// (b M Lambda / sqrt(L)) * exp(a ||L||_1). k plays no role.
inline double egc_rademacher_bound(const BoundInputs& in) {
  detail::check_bound_inputs(in);
  return in.b * in.M * in.lipschitz / std::sqrt(static_cast<double>(in.L_samples)) *
         std::exp(in.a * in.l1_norm);
}

// (|beta|^{k+1} ||L||^{k+1} / (k+1)!) * ||X Theta|| / (1 - |beta| ||L|| / (k+2)),
// factorial in log space so large k stays finite.
inline double egc_truncation_bound(double beta, double spec_norm, std::size_t k,
                                   double xtheta_norm) {
  if (spec_norm < 0.0 || xtheta_norm < 0.0)
    throw std::invalid_argument("truncation bound: norms must be nonnegative");
  const double r = std::fabs(beta) * spec_norm;
  const double denom = 1.0 - r / static_cast<double>(k + 2);
  if (denom <= 0.0)
    throw std::invalid_argument(
        "truncation bound requires |beta| * ||L|| / (k+2) < 1; increase k or shrink beta");
  if (r == 0.0) return 0.0;
  const double log_lead =
      static_cast<double>(k + 1) * std::log(r) - std::lgamma(static_cast<double>(k + 2));
  return std::exp(log_lead) * xtheta_norm / denom;
}

// --- empirical Rademacher complexity -----------------------------------------

struct RademacherCaps {
  double a = 1.0;  // coefficient cap
  double b = 1.0;  // ||Theta||_1 cap
};

struct EmpiricalRademacher {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

namespace detail {

// Euclidean projection onto the l1 ball of radius b.
inline void project_l1(std::vector<double>& theta, double b) {
  double norm = 0.0;
  for (double t : theta) norm += std::fabs(t);
  if (norm <= b) return;
  std::vector<double> mag(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) mag[i] = std::fabs(theta[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    cum += mag[i];
    const double t = (cum - b) / static_cast<double>(i + 1);
    if (mag[i] > t) {
      rho = i + 1;
      tau = t;
    }
  }
  (void)rho;
  for (double& t : theta) {
    const double shrunk = std::max(std::fabs(t) - tau, 0.0);
    t = t < 0.0 ? -shrunk : shrunk;
  }
}

// sup over the cap-constrained ball of (1/L) sum_i coeff_i(p) (v_i . Theta)
// for one sign draw, approximated by multi-restart projected gradient ascent.
// Under-approximation only, so the one-sided check against the theoretical
// bound stays sound.
inline double pga_sup(Variant variant, const std::vector<std::vector<double>>& v,
                      const RademacherCaps& caps, std::size_t big_l, Rng& rng) {
  const std::size_t hops = v.size();
  const std::size_t c = v[0].size();
  const double inv_l = 1.0 / static_cast<double>(big_l);
  constexpr std::size_t restarts = 10, steps = 200;
  double best = 0.0;  // alpha = 0 (or beta = 0, Theta = 0) is always feasible

  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<double> coeff(variant == Variant::EGC ? 1 : hops);
    for (double& x : coeff) x = rng.uniform(-caps.a, caps.a);
    std::vector<double> theta(c);
    for (double& x : theta) x = rng.uniform(-caps.b, caps.b);
    project_l1(theta, caps.b);

    for (std::size_t step = 1; step <= steps; ++step) {
      std::vector<double> series(hops);
      if (variant == Variant::EGC) {
        const auto e = egc_coefficients(coeff[0], hops - 1);
        series = e;
      } else {
        series = coeff;
      }
      // value and gradients
      std::vector<double> vdot(hops, 0.0);
      for (std::size_t i = 0; i < hops; ++i)
        for (std::size_t j = 0; j < c; ++j) vdot[i] += v[i][j] * theta[j];
      std::vector<double> grad_theta(c, 0.0);
      for (std::size_t i = 0; i < hops; ++i)
        for (std::size_t j = 0; j < c; ++j) grad_theta[j] += series[i] * v[i][j] * inv_l;
      std::vector<double> grad_coeff(coeff.size(), 0.0);
      if (variant == Variant::EGC) {
        const auto e = egc_coefficients(coeff[0], hops - 1);
        for (std::size_t i = 1; i < hops; ++i) grad_coeff[0] += e[i - 1] * vdot[i] * inv_l;
      } else {
        for (std::size_t i = 0; i < hops; ++i) grad_coeff[i] = vdot[i] * inv_l;
      }

      double gnorm = 0.0;
      for (double gv : grad_theta) gnorm += gv * gv;
      for (double gv : grad_coeff) gnorm += gv * gv;
      gnorm = std::sqrt(gnorm);
      if (gnorm == 0.0) break;
      const double eta =
          0.5 * std::max(caps.a, caps.b) / (gnorm * std::sqrt(static_cast<double>(step)));
      for (std::size_t j = 0; j < c; ++j) theta[j] += eta * grad_theta[j];
      for (std::size_t i = 0; i < coeff.size(); ++i)
        coeff[i] = std::clamp(coeff[i] + eta * grad_coeff[i], -caps.a, caps.a);
      project_l1(theta, caps.b);
    }

    std::vector<double> series =
        variant == Variant::EGC ? egc_coefficients(coeff[0], hops - 1) : coeff;
    double val = 0.0;
    for (std::size_t i = 0; i < hops; ++i)
      for (std::size_t j = 0; j < c; ++j) val += series[i] * v[i][j] * theta[j];
    best = std::max(best, val * inv_l);
  }
  return best;
}

}  // namespace detail

// Monte-Carlo estimate of the empirical Rademacher complexity over all graph
// nodes, identity activation, scalar-output Theta in R^c. Verification oracle
// only; intentionally restricted to tiny instances.
inline EmpiricalRademacher empirical_rademacher(const DiffusionCache& cache, const Graph& graph,
                                                Variant variant, const RademacherCaps& caps,
                                                std::size_t mc_samples, std::uint64_t seed) {
  if (variant != Variant::LGC && variant != Variant::EGC)
    throw std::invalid_argument("empirical Rademacher oracle covers LGC and EGC only");
  if (graph.n > 20 || cache.feature_dim > 4 || cache.k > 3)
    throw std::invalid_argument(
        "empirical Rademacher oracle is limited to n <= 20, c <= 4, k <= 3");
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  EmpiricalRademacher out;
  out.samples = mc_samples;
  if (caps.a == 0.0 || caps.b == 0.0) return out;  // only the zero function

  const std::size_t n = graph.n;
  const std::size_t c = cache.feature_dim;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t draw = 0; draw < mc_samples; ++draw) {
    Rng rng(hash64(seed, 0x72616465ULL, draw));
    std::vector<double> eps(n);
    for (double& e : eps) e = rng.next_double() < 0.5 ? -1.0 : 1.0;
    // v_i = T_i^T eps
    std::vector<std::vector<double>> v(cache.k + 1, std::vector<double>(c, 0.0));
    for (std::size_t i = 0; i <= cache.k; ++i) {
      const DenseMatrix& t = propagated(cache, i);
      for (std::size_t row = 0; row < n; ++row)
        for (std::size_t j = 0; j < c; ++j) v[i][j] += eps[row] * t(row, j);
    }
    const double sup = detail::pga_sup(variant, v, caps, n, rng);
    sum += sup;
    sumsq += sup * sup;
  }
  const double mc = static_cast<double>(mc_samples);
  out.estimate = sum / mc;
  const double var = std::max(sumsq / mc - out.estimate * out.estimate, 0.0);
  out.std_error = std::sqrt(var / mc);
  return out;
}

// --- coefficient extraction ---------------------------------------------------

struct CoefficientPoint {
  std::size_t hop;
  double coefficient;
  double variance;  // over nodes; 0 for EGC and LGC
};

// Per-hop coefficient series behind the trained model: the exponential series
// for EGC, the alpha vector for LGC, and the node mean/variance of the gate
// outputs for hLGC.
inline std::vector<CoefficientPoint> extract_coefficients(const ModelParams& params,
                                                          const DiffusionCache& cache) {
  std::vector<CoefficientPoint> out;
  switch (params.variant) {
    case Variant::SGC:
      throw std::invalid_argument("SGC has no coefficient series");
    case Variant::EGC: {
      const auto c = egc_coefficients(params.beta, params.k);
      for (std::size_t i = 0; i <= params.k; ++i) out.push_back({i, c[i], 0.0});
      break;
    }
    case Variant::LGC: {
      for (std::size_t i = 0; i <= params.k; ++i) out.push_back({i, params.alpha[i], 0.0});
      break;
    }
    case Variant::HLGC: {
      const ForwardTrace trace = forward_hlgc(cache, params);
      const std::size_t n = cache.n();
      for (std::size_t i = 0; i <= params.k; ++i) {
        double mean = 0.0;
        std::vector<double> f(n);
        for (std::size_t v = 0; v < n; ++v) {
          f[v] = detail::sigmoid(trace.hops[i].h(v, 0)) * params.alpha[i];
          mean += f[v];
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t v = 0; v < n; ++v) var += (f[v] - mean) * (f[v] - mean);
        var /= static_cast<double>(n);
        out.push_back({i, mean, var});
      }
      break;
    }
  }
  return out;
}

}  // namespace spgc
