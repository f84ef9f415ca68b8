// Single-layer linear graph convolutional models: SGC, EGC, LGC and hLGC.
// Forward passes read hops from a DiffusionCache; gradients are analytic
// reverse-mode derivatives of masked mean cross-entropy.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spgc/dense.hpp"
#include "spgc/propagation.hpp"
#include "spgc/rng.hpp"

namespace spgc {

enum class Variant : std::uint8_t { SGC = 0, EGC = 1, LGC = 2, HLGC = 3 };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::SGC: return "sgc";
    case Variant::EGC: return "egc";
    case Variant::LGC: return "lgc";
    case Variant::HLGC: return "hlgc";
  }
  return "unknown";
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "sgc") return Variant::SGC;
  if (s == "egc") return Variant::EGC;
  if (s == "lgc") return Variant::LGC;
  if (s == "hlgc") return Variant::HLGC;
  throw std::invalid_argument("unknown model variant: " + s);
}

// Per-hop gate hyper-network weights (hLGC only).
struct GatePair {
  DenseMatrix w1;  // c x ceil(c/2)
  DenseMatrix w2;  // ceil(c/2) x 1
};

struct ModelParams {
  Variant variant = Variant::SGC;
  std::size_t k = 0;
  DenseMatrix theta;          // c x C, shared classifier weights
  double beta = 0.0;          // EGC
  std::vector<double> alpha;  // k+1 entries, LGC and hLGC
  std::vector<GatePair> gates;  // k+1 entries, hLGC
};

inline std::size_t gate_hidden_dim(std::size_t c) { return (c + 1) / 2; }

inline ModelParams init_params(Variant variant, std::size_t k, std::size_t c, std::size_t n_classes,
                               std::uint64_t seed) {
  Rng rng(seed);
  auto glorot = [&rng](std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
    return m;
  };
  ModelParams p;
  p.variant = variant;
  p.k = k;
  p.theta = glorot(c, n_classes);
  if (variant == Variant::EGC) p.beta = 1.0;
  if (variant == Variant::LGC) p.alpha.assign(k + 1, 1.0 / static_cast<double>(k + 1));
  if (variant == Variant::HLGC) {
    p.alpha.assign(k + 1, 1.0);
    const std::size_t m = gate_hidden_dim(c);
    p.gates.reserve(k + 1);
    for (std::size_t i = 0; i <= k; ++i) p.gates.push_back({glorot(c, m), glorot(m, 1)});
  }
  return p;
}

// Exponential-series coefficients c_i = beta^i / i! via the recurrence
// c_i = c_{i-1} * beta / i (c_0 = 1, including beta = 0).
inline std::vector<double> egc_coefficients(double beta, std::size_t k) {
  std::vector<double> c(k + 1);
  c[0] = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c[i] = c[i - 1] * beta / static_cast<double>(i);
  return c;
}

struct HlgcHopTrace {
  DenseMatrix pre;  // n x m, pre-activation of the gate hidden layer
  DenseMatrix h;    // n x 1, pre-sigmoid gate score
};

struct ForwardTrace {
  DenseMatrix logits;  // n x C
  DenseMatrix probs;   // n x C, row softmax of logits
  // SGC/EGC/LGC: the hop-weighted feature sum entering the classifier.
  DenseMatrix combined;        // n x c
  std::vector<double> coeffs;  // per-hop scalar coefficients used
  // hLGC only.
  std::vector<HlgcHopTrace> hops;
};

namespace detail {
inline DenseMatrix row_softmax(const DenseMatrix& logits) {
  DenseMatrix p(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    double mx = logits(r, 0);
    for (std::size_t j = 1; j < logits.cols(); ++j) mx = std::max(mx, logits(r, j));
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.cols(); ++j) {
      const double e = std::exp(logits(r, j) - mx);
      p(r, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < logits.cols(); ++j) p(r, j) /= sum;
  }
  return p;
}

inline void check_forward_pre(const DiffusionCache& cache, const ModelParams& p) {
  if (p.k > cache.k) throw std::out_of_range("model hop count exceeds cache depth");
  if (p.theta.rows() != cache.feature_dim)
    throw std::invalid_argument("classifier weights do not match feature dimension");
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace detail

// logits built from a fixed per-hop coefficient vector: (sum_i c_i P^i X) Theta.
inline ForwardTrace forward_weighted(const DiffusionCache& cache, const ModelParams& p,
                                     const std::vector<double>& coeffs) {
  detail::check_forward_pre(cache, p);
  ForwardTrace t;
  t.coeffs = coeffs;
  t.combined = DenseMatrix(cache.n(), cache.feature_dim);
  for (std::size_t i = 0; i <= p.k; ++i)
    if (coeffs[i] != 0.0) add_scaled(t.combined, coeffs[i], propagated(cache, i));
  t.logits = matmul(t.combined, p.theta);
  t.probs = detail::row_softmax(t.logits);
  return t;
}

inline ForwardTrace forward_sgc(const DiffusionCache& cache, const ModelParams& p) {
  if (p.variant != Variant::SGC) throw std::invalid_argument("forward_sgc: wrong variant");
  std::vector<double> coeffs(p.k + 1, 0.0);
  coeffs[p.k] = 1.0;
  return forward_weighted(cache, p, coeffs);
}

inline ForwardTrace forward_egc(const DiffusionCache& cache, const ModelParams& p) {
  if (p.variant != Variant::EGC) throw std::invalid_argument("forward_egc: wrong variant");
  return forward_weighted(cache, p, egc_coefficients(p.beta, p.k));
}

inline ForwardTrace forward_lgc(const DiffusionCache& cache, const ModelParams& p) {
  if (p.variant != Variant::LGC) throw std::invalid_argument("forward_lgc: wrong variant");
  if (p.alpha.size() != p.k + 1) throw std::invalid_argument("forward_lgc: alpha length != k+1");
  return forward_weighted(cache, p, p.alpha);
}

inline ForwardTrace forward_hlgc(const DiffusionCache& cache, const ModelParams& p) {
  if (p.variant != Variant::HLGC) throw std::invalid_argument("forward_hlgc: wrong variant");
  detail::check_forward_pre(cache, p);
  if (p.alpha.size() != p.k + 1 || p.gates.size() != p.k + 1)
    throw std::invalid_argument("forward_hlgc: parameter arity != k+1");
  const std::size_t n = cache.n();
  const std::size_t c = cache.feature_dim;
  const std::size_t m = gate_hidden_dim(c);
  ForwardTrace t;
  t.logits = DenseMatrix(n, p.theta.cols());
  t.hops.reserve(p.k + 1);
  for (std::size_t i = 0; i <= p.k; ++i) {
    const DenseMatrix& ti = propagated(cache, i);
    if (p.gates[i].w1.rows() != c || p.gates[i].w1.cols() != m || p.gates[i].w2.rows() != m ||
        p.gates[i].w2.cols() != 1)
      throw std::invalid_argument("forward_hlgc: gate weight shape mismatch");
    HlgcHopTrace hop;
    hop.pre = matmul(ti, p.gates[i].w1);
    DenseMatrix relu = hop.pre;
    for (std::size_t j = 0; j < relu.size(); ++j)
      if (relu.data()[j] < 0.0) relu.data()[j] = 0.0;
    hop.h = matmul(relu, p.gates[i].w2);
    const DenseMatrix q = matmul(ti, p.theta);
    for (std::size_t v = 0; v < n; ++v) {
      const double gate = detail::sigmoid(hop.h(v, 0)) * p.alpha[i];
      for (std::size_t j = 0; j < t.logits.cols(); ++j) t.logits(v, j) += q(v, j) * gate;
    }
    t.hops.push_back(std::move(hop));
  }
  t.probs = detail::row_softmax(t.logits);
  return t;
}

inline ForwardTrace forward(const DiffusionCache& cache, const ModelParams& p) {
  switch (p.variant) {
    case Variant::SGC: return forward_sgc(cache, p);
    case Variant::EGC: return forward_egc(cache, p);
    case Variant::LGC: return forward_lgc(cache, p);
    case Variant::HLGC: return forward_hlgc(cache, p);
  }
  throw std::invalid_argument("forward: unknown variant");
}

// Gradient set, same shapes as the trainable fields of ModelParams.
struct Gradients {
  DenseMatrix theta;
  double beta = 0.0;
  std::vector<double> alpha;
  std::vector<GatePair> gates;
};

// Analytic gradients of mean masked cross-entropy.
inline Gradients gradients(const ForwardTrace& trace, const DiffusionCache& cache,
                           const ModelParams& p, const std::vector<int>& labels,
                           const std::vector<std::size_t>& mask) {
  if (mask.empty()) throw std::invalid_argument("gradients: empty mask");
  const std::size_t n = cache.n();
  const std::size_t n_classes = p.theta.cols();
  // dLoss/dlogits, zero outside the mask.
  DenseMatrix g(n, n_classes);
  const double inv = 1.0 / static_cast<double>(mask.size());
  for (std::size_t v : mask) {
    for (std::size_t j = 0; j < n_classes; ++j) g(v, j) = trace.probs(v, j) * inv;
    g(v, static_cast<std::size_t>(labels[v])) -= inv;
  }

  Gradients out;
  switch (p.variant) {
    case Variant::SGC: {
      out.theta = matmul_at_b(propagated(cache, p.k), g);
      break;
    }
    case Variant::EGC: {
      out.theta = matmul_at_b(trace.combined, g);
      // d c_i / d beta = c_{i-1} for i >= 1 (and 0 for i = 0).
      const DenseMatrix r = matmul_a_bt(g, p.theta);  // n x c
      const auto coeffs = egc_coefficients(p.beta, p.k);
      for (std::size_t i = 1; i <= p.k; ++i)
        out.beta += coeffs[i - 1] * dot(propagated(cache, i), r);
      break;
    }
    case Variant::LGC: {
      out.theta = matmul_at_b(trace.combined, g);
      const DenseMatrix r = matmul_a_bt(g, p.theta);
      out.alpha.resize(p.k + 1);
      for (std::size_t i = 0; i <= p.k; ++i) out.alpha[i] = dot(propagated(cache, i), r);
      break;
    }
    case Variant::HLGC: {
      out.theta = DenseMatrix(p.theta.rows(), p.theta.cols());
      out.alpha.assign(p.k + 1, 0.0);
      out.gates.resize(p.k + 1);
      for (std::size_t i = 0; i <= p.k; ++i) {
        const DenseMatrix& ti = propagated(cache, i);
        const HlgcHopTrace& hop = trace.hops[i];
        const DenseMatrix q = matmul(ti, p.theta);
        DenseMatrix g_gated(n, n_classes);  // G scaled by this hop's gate
        DenseMatrix dh(n, 1);
        for (std::size_t v = 0; v < n; ++v) {
          const double s = detail::sigmoid(hop.h(v, 0));
          double dgate = 0.0;
          for (std::size_t j = 0; j < n_classes; ++j) {
            g_gated(v, j) = g(v, j) * s * p.alpha[i];
            dgate += g(v, j) * q(v, j);
          }
          out.alpha[i] += dgate * s;
          dh(v, 0) = dgate * p.alpha[i] * s * (1.0 - s);
        }
        add_scaled(out.theta, 1.0, matmul_at_b(ti, g_gated));
        DenseMatrix relu = hop.pre;
        for (std::size_t j = 0; j < relu.size(); ++j)
          if (relu.data()[j] < 0.0) relu.data()[j] = 0.0;
        out.gates[i].w2 = matmul_at_b(relu, dh);
        DenseMatrix dpre = matmul_a_bt(dh, p.gates[i].w2);  // n x m
        for (std::size_t j = 0; j < dpre.size(); ++j)
          if (hop.pre.data()[j] <= 0.0) dpre.data()[j] = 0.0;  // ReLU subgradient at 0 is 0
        out.gates[i].w1 = matmul_at_b(ti, dpre);
      }
      break;
    }
  }
  return out;
}

}  // namespace spgc
