// Full-batch training: cross-entropy, Adam, inverted dropout on the cached
// hops, early stopping on validation accuracy, and checkpoint/history export.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spgc/graph.hpp"
#include "spgc/models.hpp"
#include "spgc/propagation.hpp"
#include "spgc/rng.hpp"
#include "spgc/textio.hpp"

namespace spgc {

inline double cross_entropy(const DenseMatrix& probs, const std::vector<int>& labels,
                            const std::vector<std::size_t>& mask) {
  if (mask.empty()) throw std::invalid_argument("cross_entropy: empty mask");
  double loss = 0.0;
  for (std::size_t v : mask) {
    const double p = std::max(probs(v, static_cast<std::size_t>(labels[v])), 1e-300);
    loss -= std::log(p);
  }
  return loss / static_cast<double>(mask.size());
}

// Fraction of mask nodes whose argmax logit matches the label (ties to the
// lowest class index).
inline double accuracy(const DenseMatrix& logits, const std::vector<int>& labels,
                       const std::vector<std::size_t>& mask) {
  if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
  std::size_t hits = 0;
  for (std::size_t v : mask) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.cols(); ++j)
      if (logits(v, j) > logits(v, best)) best = j;
    if (static_cast<int>(best) == labels[v]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(mask.size());
}

// Inverted dropout, training mode. Evaluation mode is simply not calling this.
inline DenseMatrix apply_dropout(const DenseMatrix& x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  if (rate == 0.0) return x;
  DenseMatrix y(x.rows(), x.cols());
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i)
    y.data()[i] = rng.next_double() < rate ? 0.0 : x.data()[i] * scale;
  return y;
}

// --- Adam ------------------------------------------------------------------

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

namespace detail {
struct TensorView {
  double* param;
  const double* grad;
  std::size_t len;
};

inline std::vector<TensorView> trainable_views(ModelParams& p, const Gradients& g) {
  std::vector<TensorView> views;
  views.push_back({p.theta.data(), g.theta.data(), p.theta.size()});
  if (p.variant == Variant::EGC) views.push_back({&p.beta, &g.beta, 1});
  if (p.variant == Variant::LGC || p.variant == Variant::HLGC)
    views.push_back({p.alpha.data(), g.alpha.data(), p.alpha.size()});
  if (p.variant == Variant::HLGC)
    for (std::size_t i = 0; i < p.gates.size(); ++i) {
      views.push_back({p.gates[i].w1.data(), g.gates[i].w1.data(), p.gates[i].w1.size()});
      views.push_back({p.gates[i].w2.data(), g.gates[i].w2.data(), p.gates[i].w2.size()});
    }
  return views;
}
}  // namespace detail

// One Adam update (beta1=0.9, beta2=0.999, eps=1e-8, bias correction), with
// weight decay folded additively into the gradient for every trainable tensor.
inline void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, double lr,
                      double weight_decay, std::size_t t) {
  if (t < 1) throw std::invalid_argument("adam_step: t must be >= 1");
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  auto views = detail::trainable_views(params, grads);
  if (state.m.empty()) {
    for (const auto& view : views) {
      state.m.emplace_back(view.len, 0.0);
      state.v.emplace_back(view.len, 0.0);
    }
  }
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < views.size(); ++i) {
    auto& [param, grad, len] = views[i];
    for (std::size_t j = 0; j < len; ++j) {
      const double gj = grad[j] + weight_decay * param[j];
      state.m[i][j] = beta1 * state.m[i][j] + (1.0 - beta1) * gj;
      state.v[i][j] = beta2 * state.v[i][j] + (1.0 - beta2) * gj * gj;
      const double mhat = state.m[i][j] / bc1;
      const double vhat = state.v[i][j] / bc2;
      param[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

// --- training loop ----------------------------------------------------------

struct TrainConfig {
  double learning_rate = 0.2;
  double weight_decay = 0.0;
  double dropout = 0.0;
  std::size_t max_epochs = 500;
  std::size_t patience = 100;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  double train_loss, val_loss, test_loss;
  double train_acc, val_acc, test_acc;
  double wall_ms;
};

struct TrainReport {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_acc = 0.0;
  double test_acc_at_best = 0.0;
  ModelParams final_params;  // checkpointed best
  bool stopped_early = false;
};

inline TrainReport train(Variant variant, const DiffusionCache& cache, const Graph& graph,
                         const TrainConfig& config) {
  if (config.learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be > 0");
  if (config.max_epochs < 1 || config.patience < 1)
    throw std::invalid_argument("max_epochs and patience must be >= 1");
  if (cache.n() != graph.n) throw std::invalid_argument("cache/graph node count mismatch");

  const std::size_t n_classes = static_cast<std::size_t>(graph.num_classes());
  ModelParams params = init_params(variant, cache.k, cache.feature_dim, n_classes, config.seed);
  AdamState adam;
  Rng dropout_rng(hash64(config.seed, 0x64726f70ULL, 0));

  TrainReport report;
  double best_val = -1.0;
  std::size_t since_improve = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    const DiffusionCache* step_cache = &cache;
    DiffusionCache dropped;
    if (config.dropout > 0.0) {
      dropped.operator_kind = cache.operator_kind;
      dropped.k = cache.k;
      dropped.feature_dim = cache.feature_dim;
      dropped.terms.reserve(cache.k + 1);
      for (const auto& t : cache.terms)
        dropped.terms.push_back(apply_dropout(t, config.dropout, dropout_rng));
      step_cache = &dropped;
    }

    const ForwardTrace step_trace = forward(*step_cache, params);
    const Gradients grads = gradients(step_trace, *step_cache, params, graph.y, graph.train_mask);
    adam_step(params, grads, adam, config.learning_rate, config.weight_decay, epoch);

    const ForwardTrace eval = forward(cache, params);
    EpochRecord rec;
    rec.train_loss = cross_entropy(eval.probs, graph.y, graph.train_mask);
    rec.val_loss = cross_entropy(eval.probs, graph.y, graph.val_mask);
    rec.test_loss = cross_entropy(eval.probs, graph.y, graph.test_mask);
    rec.train_acc = accuracy(eval.logits, graph.y, graph.train_mask);
    rec.val_acc = accuracy(eval.logits, graph.y, graph.val_mask);
    rec.test_acc = accuracy(eval.logits, graph.y, graph.test_mask);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report.history.push_back(rec);

    if (rec.val_acc > best_val) {  // strict improvement; ties keep the earlier epoch
      best_val = rec.val_acc;
      report.best_epoch = epoch;
      report.best_val_acc = rec.val_acc;
      report.test_acc_at_best = rec.test_acc;
      report.final_params = params;
      since_improve = 0;
    } else if (++since_improve >= config.patience) {
      report.stopped_early = true;
      break;
    }
  }
  return report;
}

// History CSV, the data behind loss-curve plots. The ms column is the epoch
// wall time at millisecond resolution; sub-millisecond timings are reported
// in the run summary instead so that reruns of the same seed stay
// byte-identical.
inline void write_history_csv(const TrainReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open history file: " + path);
  os << "epoch,train_loss,val_loss,test_loss,train_acc,val_acc,test_acc,ms\n";
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    const auto& r = report.history[i];
    os << (i + 1) << ',' << format_double(r.train_loss) << ',' << format_double(r.val_loss) << ','
       << format_double(r.test_loss) << ',' << format_double(r.train_acc) << ','
       << format_double(r.val_acc) << ',' << format_double(r.test_acc) << ','
       << static_cast<long long>(std::llround(r.wall_ms)) << '\n';
  }
  if (!os) throw std::runtime_error("history write failed: " + path);
}

// --- checkpoint file ---------------------------------------------------------
// Magic "SPGCKPT1", variant, k, seed, then the variant's tensors in row-major
// double precision. Bit-exact round trip.

namespace detail {
inline void write_matrix(std::ostream& os, const DenseMatrix& m) {
  write_pod(os, static_cast<std::uint64_t>(m.rows()));
  write_pod(os, static_cast<std::uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}
inline DenseMatrix read_matrix(std::istream& is) {
  std::uint64_t r, c;
  read_pod(is, r);
  read_pod(is, c);
  DenseMatrix m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return m;
}
}  // namespace detail

inline void save_checkpoint(const ModelParams& p, std::uint64_t seed, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write("SPGCKPT1", 8);
  detail::write_pod(os, static_cast<std::uint8_t>(p.variant));
  detail::write_pod(os, static_cast<std::uint64_t>(p.k));
  detail::write_pod(os, seed);
  detail::write_matrix(os, p.theta);
  detail::write_pod(os, p.beta);
  detail::write_pod(os, static_cast<std::uint64_t>(p.alpha.size()));
  os.write(reinterpret_cast<const char*>(p.alpha.data()),
           static_cast<std::streamsize>(p.alpha.size() * sizeof(double)));
  detail::write_pod(os, static_cast<std::uint64_t>(p.gates.size()));
  for (const auto& gate : p.gates) {
    detail::write_matrix(os, gate.w1);
    detail::write_matrix(os, gate.w2);
  }
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

struct Checkpoint {
  ModelParams params;
  std::uint64_t seed = 0;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "SPGCKPT1")
    throw std::runtime_error("not a checkpoint file: " + path);
  Checkpoint ck;
  std::uint8_t variant;
  std::uint64_t k;
  detail::read_pod(is, variant);
  detail::read_pod(is, k);
  detail::read_pod(is, ck.seed);
  if (variant > 3) throw std::runtime_error("checkpoint has unknown variant tag");
  ck.params.variant = static_cast<Variant>(variant);
  ck.params.k = static_cast<std::size_t>(k);
  ck.params.theta = detail::read_matrix(is);
  detail::read_pod(is, ck.params.beta);
  std::uint64_t alen;
  detail::read_pod(is, alen);
  ck.params.alpha.resize(static_cast<std::size_t>(alen));
  is.read(reinterpret_cast<char*>(ck.params.alpha.data()),
          static_cast<std::streamsize>(alen * sizeof(double)));
  std::uint64_t glen;
  detail::read_pod(is, glen);
  ck.params.gates.resize(static_cast<std::size_t>(glen));
  for (auto& gate : ck.params.gates) {
    gate.w1 = detail::read_matrix(is);
    gate.w2 = detail::read_matrix(is);
  }
  if (!is) throw std::runtime_error("checkpoint truncated: " + path);
  return ck;
}

}  // namespace spgc
