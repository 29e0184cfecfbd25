#pragma once

#include "stftkan/checkpoint.hpp"
#include "stftkan/data.hpp"
#include "stftkan/metrics.hpp"
#include "stftkan/model.hpp"
#include "stftkan/nn.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace stftkan {

struct TrainConfig {
  ModelVariant variant = ModelVariant::Mlp;
  int batch_size = 16;  // 2 for fourier-kan
  int epochs = 300;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  CosineSchedule schedule{1e-3, 1e-3, 300};
  std::uint64_t seed = 0;
  ModelDims dims;
  bool augment = true;
  double augment_range = 0.2;
  std::optional<StftModelConfig> stft;

  static int default_batch_size(ModelVariant v) {
    return v == ModelVariant::FourierKan ? 2 : 16;
  }
};

struct EpochRecord {
  int epoch;
  double lr;
  double train_loss;
  double test_oa;
  double test_ba;
  double epoch_time_s;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  Metrics final_test;
  double best_test_oa = 0.0;
  int best_epoch = -1;
};

namespace detail {

// One sample's contribution to the batch-weighted cross-entropy:
// term = w * (logsumexp - logit_y); grad scaled by w / weight_sum.
template <typename S>
std::pair<S, Vector<S>> ce_sample_term(const Vector<S>& logits, int label, S w,
                                       S weight_sum) {
  const S max_logit = logits.maxCoeff();
  const Vector<S> exps = (logits.array() - max_logit).exp();
  const S z = exps.sum();
  const S lse = max_logit + std::log(z);
  Vector<S> grad = (w / weight_sum) * (exps / z);
  grad(label) -= w / weight_sum;
  return {w * (lse - logits(label)), grad};
}

}  // namespace detail

template <typename S>
Metrics evaluate_model(LiteDgcnnModel<S>& model,
                       const std::vector<PointCloud>& test_set) {
  if (test_set.empty()) throw DataError("evaluate: empty test set");
  std::vector<int> preds, labels;
  preds.reserve(test_set.size());
  for (const auto& cloud : test_set) {
    const Vector<S> logits = model.forward(cloud.points.template cast<S>());
    preds.push_back(predict_class(logits));
    labels.push_back(cloud.label);
  }
  Metrics m = compute_metrics(preds, labels, model.num_classes());
  m.param_count = model.param_count();
  return m;
}

inline void write_metrics_csv(const std::vector<EpochRecord>& history,
                              const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << "epoch,lr,train_loss,test_oa,test_ba,epoch_time_s\n";
  for (const auto& r : history) {
    os << r.epoch << ',' << std::setprecision(17) << r.lr << ','
       << r.train_loss << ',' << r.test_oa << ',' << r.test_ba << ','
       << r.epoch_time_s << '\n';
  }
}

// Seeded epoch loop: shuffled mini-batches, per-epoch translation
// augmentation, weighted cross-entropy, one Adam step per batch, LR from
// the cosine schedule per epoch. Tracks the best test-OA checkpoint.
template <typename S>
TrainResult train(const TrainConfig& cfg, const DatasetSplit& split,
                  const std::optional<std::filesystem::path>& out_dir = {}) {
  if (split.train.empty() || split.test.empty())
    throw DataError("train: split has empty train or test set");
  Rng rng(cfg.seed);
  LiteDgcnnModel<S> model = LiteDgcnnModel<S>::build(
      cfg.variant, static_cast<int>(split.class_names.size()), rng, cfg.dims,
      cfg.stft);
  Adam<S> adam(cfg.lr, cfg.weight_decay);
  std::vector<ParamRef<S>> params;
  model.collect_params(params);
  const Vector<S> weights = split.class_weights.template cast<S>();

  if (out_dir) std::filesystem::create_directories(*out_dir);

  TrainResult result;
  std::vector<std::size_t> order(split.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = cfg.schedule.lr_at(epoch);
    adam.set_lr(lr);
    rng.shuffle(order);

    double loss_sum = 0.0, weight_total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::size_t batch_index = start / cfg.batch_size;

      S weight_sum = S(0);
      for (std::size_t i = start; i < end; ++i)
        weight_sum += weights(split.train[order[i]].label);

      model.zero_grads();
      S batch_loss = S(0);
      for (std::size_t i = start; i < end; ++i) {
        PointCloud sample = split.train[order[i]];
        if (cfg.augment)
          sample = augment_translate(sample, rng, cfg.augment_range);
        const Vector<S> logits =
            model.forward(sample.points.template cast<S>());
        auto [term, grad] = detail::ce_sample_term<S>(
            logits, sample.label, weights(sample.label), weight_sum);
        if (!std::isfinite(static_cast<double>(term)))
          throw NumericError("NaN loss at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batch_index));
        batch_loss += term;
        model.backward(grad);
      }
      adam.step(params);
      loss_sum += static_cast<double>(batch_loss);
      weight_total += static_cast<double>(weight_sum);
    }

    const Metrics test_metrics = evaluate_model(model, split.test);
    const auto t1 = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / weight_total;
    rec.test_oa = test_metrics.oa;
    rec.test_ba = test_metrics.ba;
    rec.epoch_time_s =
        std::chrono::duration<double>(t1 - t0).count();
    result.history.push_back(rec);

    if (test_metrics.oa > result.best_test_oa || result.best_epoch < 0) {
      result.best_test_oa = test_metrics.oa;
      result.best_epoch = epoch;
      if (out_dir) save_checkpoint(model, *out_dir / "best.ckpt");
    }
    result.final_test = test_metrics;
  }

  if (out_dir) {
    save_checkpoint(model, *out_dir / "final.ckpt");
    write_metrics_csv(result.history, *out_dir / "metrics.csv");
  }
  return result;
}

}  // namespace stftkan
