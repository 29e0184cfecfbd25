#pragma once

#include "stftkan/core.hpp"
#include "stftkan/fourier_kan.hpp"
#include "stftkan/graph.hpp"
#include "stftkan/layer.hpp"
#include "stftkan/nn.hpp"
#include "stftkan/stft_kan.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stftkan {

enum class ModelVariant : std::uint8_t {
  Mlp = 0,
  StftKan = 1,
  StftKanMlp = 2,
  FourierKan = 3,
};

inline const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::Mlp: return "mlp";
    case ModelVariant::StftKan: return "stft-kan";
    case ModelVariant::StftKanMlp: return "stft-kan-mlp";
    case ModelVariant::FourierKan: return "fourier-kan";
  }
  throw ConfigError("unknown model variant");
}

inline ModelVariant variant_from_name(const std::string& name) {
  if (name == "mlp") return ModelVariant::Mlp;
  if (name == "stft-kan") return ModelVariant::StftKan;
  if (name == "stft-kan-mlp") return ModelVariant::StftKanMlp;
  if (name == "fourier-kan") return ModelVariant::FourierKan;
  throw ConfigError("unknown model variant: " + name);
}

struct ModelDims {
  int k = 8;        // neighbors
  int hidden1 = 64;
  int hidden2 = 128;
  int emb = 1024;   // feature expansion width
};

// Framing configs for the windowed layers; defaults match the minimal
// published configuration (ECL-1/ECL-2/FEL/CL). The input widths are
// derived from the dims at build time.
struct StftModelConfig {
  StftKanConfig ecl1{6, 64, 2, 2, 3, WindowKind::Boxcar, 8.0, true, true};
  StftKanConfig ecl2{64, 128, 28, 5, 1, WindowKind::Blackman, 8.0, false, true};
  StftKanConfig fel{128, 1024, 52, 20, 7, WindowKind::Bartlett, 8.0, true, true};
  StftKanConfig cl{2048, 7, 197, 10, 6, WindowKind::Hann, 8.0, false, true};
};

// Hybrid model: MLP edge convolution, windowed FEL, windowed CL with
// stride 7 and grid size 7.
inline StftModelConfig hybrid_stft_config() {
  StftModelConfig cfg;
  cfg.cl.stride = 7;
  cfg.cl.grid_size = 7;
  return cfg;
}

inline StftModelConfig default_stft_config(ModelVariant variant) {
  return variant == ModelVariant::StftKanMlp ? hybrid_stft_config()
                                             : StftModelConfig{};
}

// Single-EdgeConv point-cloud classifier:
//   knn(coords, k) -> edge features (n*k x 6) -> ecl1 -> ecl2 (shared
//   weights over all edges) -> channelwise max over each point's edges
//   -> fel per point -> concat(global max, global mean) -> cl -> logits.
template <typename S>
class LiteDgcnnModel {
 public:
  LiteDgcnnModel() = default;

  static LiteDgcnnModel build(ModelVariant variant, int num_classes, Rng& rng,
                              ModelDims dims = {},
                              std::optional<StftModelConfig> stft_cfg = {}) {
    if (num_classes < 2) throw ConfigError("model: need at least 2 classes");
    StftModelConfig stft = stft_cfg.value_or(default_stft_config(variant));
    LiteDgcnnModel m;
    m.variant_ = variant;
    m.classes_ = num_classes;
    m.dims_ = dims;
    const int in1 = 6;
    const int pooled = 2 * dims.emb;
    switch (variant) {
      case ModelVariant::Mlp:
        m.push_linear_relu(m.ecl1_, in1, dims.hidden1, rng);
        m.push_linear_relu(m.ecl2_, dims.hidden1, dims.hidden2, rng);
        m.push_linear_relu(m.fel_, dims.hidden2, dims.emb, rng);
        m.cl_.push_back(
            make_layer(LinearLayer<S>::init(pooled, num_classes, rng)));
        break;
      case ModelVariant::StftKan: {
        stft.ecl1.d_in = in1;
        stft.ecl1.d_out = dims.hidden1;
        stft.ecl2.d_in = dims.hidden1;
        stft.ecl2.d_out = dims.hidden2;
        stft.fel.d_in = dims.hidden2;
        stft.fel.d_out = dims.emb;
        stft.cl.d_in = pooled;
        stft.cl.d_out = num_classes;
        m.ecl1_.push_back(make_layer(StftKanLayer<S>::init(stft.ecl1, rng)));
        m.ecl2_.push_back(make_layer(StftKanLayer<S>::init(stft.ecl2, rng)));
        m.fel_.push_back(make_layer(StftKanLayer<S>::init(stft.fel, rng)));
        m.cl_.push_back(make_layer(StftKanLayer<S>::init(stft.cl, rng)));
        break;
      }
      case ModelVariant::StftKanMlp: {
        m.push_linear_relu(m.ecl1_, in1, dims.hidden1, rng);
        m.push_linear_relu(m.ecl2_, dims.hidden1, dims.hidden2, rng);
        stft.fel.d_in = dims.hidden2;
        stft.fel.d_out = dims.emb;
        stft.cl.d_in = pooled;
        stft.cl.d_out = num_classes;
        m.fel_.push_back(make_layer(StftKanLayer<S>::init(stft.fel, rng)));
        m.cl_.push_back(make_layer(StftKanLayer<S>::init(stft.cl, rng)));
        break;
      }
      case ModelVariant::FourierKan:
        m.ecl1_.push_back(
            make_layer(FourierKanLayer<S>::init(in1, dims.hidden1, 1, rng)));
        m.ecl2_.push_back(make_layer(
            FourierKanLayer<S>::init(dims.hidden1, dims.hidden2, 1, rng)));
        m.fel_.push_back(make_layer(
            FourierKanLayer<S>::init(dims.hidden2, dims.emb, 1, rng)));
        m.cl_.push_back(
            make_layer(FourierKanLayer<S>::init(pooled, num_classes, 1, rng)));
        break;
    }
    m.name_layers();
    return m;
  }

  Vector<S> forward(const Matrix<S>& cloud) {
    if (cloud.cols() != 3) throw DataError("model: clouds must be n x 3");
    if (cloud.rows() <= dims_.k)
      throw DataError("model: need more points than neighbors");
    require_finite(cloud, "input cloud");

    graph_ = knn<S>(cloud, dims_.k);
    Matrix<S> h = edge_features<S>(cloud, graph_);  // (n*k) x 6
    for (auto& l : ecl1_) h = l->forward(h);
    for (auto& l : ecl2_) h = l->forward(h);
    agg_ = edge_aggregate_max<S>(h, graph_.n, graph_.k);  // n x hidden2
    Matrix<S> p = agg_.values;
    for (auto& l : fel_) p = l->forward(p);  // n x emb
    pool_ = global_pool<S>(p);               // 2*emb
    Matrix<S> logits = pool_.pooled.transpose();
    for (auto& l : cl_) logits = l->forward(logits);
    require_finite(logits, "logits");
    return logits.row(0).transpose();
  }

  // Reverse pass through the cached forward state. Parameter gradients
  // accumulate into the layers; returns the gradient w.r.t. the cloud.
  Matrix<S> backward(const Vector<S>& grad_logits) {
    if (pool_.n == 0) throw std::logic_error("model backward: no forward cache");
    Matrix<S> g = grad_logits.transpose();
    for (auto it = cl_.rbegin(); it != cl_.rend(); ++it) g = (*it)->backward(g);
    Matrix<S> grad_feat =
        global_pool_backward<S>(Vector<S>(g.row(0).transpose()), pool_);
    for (auto it = fel_.rbegin(); it != fel_.rend(); ++it)
      grad_feat = (*it)->backward(grad_feat);
    Matrix<S> grad_edges =
        edge_aggregate_max_backward<S>(grad_feat, agg_, graph_.k);
    for (auto it = ecl2_.rbegin(); it != ecl2_.rend(); ++it)
      grad_edges = (*it)->backward(grad_edges);
    for (auto it = ecl1_.rbegin(); it != ecl1_.rend(); ++it)
      grad_edges = (*it)->backward(grad_edges);
    return edge_features_backward<S>(grad_edges, graph_, 3);
  }

  void collect_params(std::vector<ParamRef<S>>& out) {
    for_each_layer([&](Layer<S>& l) { l.collect_params(out); });
  }

  void zero_grads() {
    for_each_layer([](Layer<S>& l) { l.zero_grads(); });
  }

  std::int64_t param_count() const {
    std::int64_t total = 0;
    const_cast<LiteDgcnnModel*>(this)->for_each_layer(
        [&](Layer<S>& l) { total += l.param_count(); });
    return total;
  }

  ModelVariant variant() const { return variant_; }
  int num_classes() const { return classes_; }
  const ModelDims& dims() const { return dims_; }

  std::array<std::vector<Layer<S>*>, 4> blocks() {
    std::array<std::vector<Layer<S>*>, 4> out;
    for (auto& l : ecl1_) out[0].push_back(l.get());
    for (auto& l : ecl2_) out[1].push_back(l.get());
    for (auto& l : fel_) out[2].push_back(l.get());
    for (auto& l : cl_) out[3].push_back(l.get());
    return out;
  }

  // checkpoint support: rebuild the layer stack from serialized configs
  friend class Checkpoint;
  std::vector<LayerPtr<S>> ecl1_, ecl2_, fel_, cl_;

  void set_meta(ModelVariant v, int classes, ModelDims dims) {
    variant_ = v;
    classes_ = classes;
    dims_ = dims;
    name_layers();
  }

 private:
  template <typename L>
  static LayerPtr<S> make_layer(L&& layer) {
    return std::make_unique<L>(std::forward<L>(layer));
  }

  void push_linear_relu(std::vector<LayerPtr<S>>& block, int d_in, int d_out,
                        Rng& rng) {
    block.push_back(make_layer(LinearLayer<S>::init(d_in, d_out, rng)));
    block.push_back(std::make_unique<ReluLayer<S>>(d_out));
  }

  template <typename F>
  void for_each_layer(F&& f) {
    for (auto& l : ecl1_) f(*l);
    for (auto& l : ecl2_) f(*l);
    for (auto& l : fel_) f(*l);
    for (auto& l : cl_) f(*l);
  }

  void name_layers() {
    const char* block_names[4] = {"ecl1", "ecl2", "fel", "cl"};
    auto bl = blocks();
    for (int b = 0; b < 4; ++b)
      for (std::size_t i = 0; i < bl[b].size(); ++i)
        bl[b][i]->set_name(std::string(block_names[b]) + "." +
                           std::to_string(i));
  }

  ModelVariant variant_ = ModelVariant::Mlp;
  int classes_ = 2;
  ModelDims dims_;
  // forward cache
  KnnGraph graph_;
  EdgeAggregate<S> agg_;
  GlobalPool<S> pool_;
};

// Closed-form parameter count for the standard dims, cross-checkable
// against an assembled model.
inline std::int64_t reference_param_count(
    ModelVariant variant, int num_classes, ModelDims dims = {},
    std::optional<StftModelConfig> stft_cfg = {}) {
  const StftModelConfig stft = stft_cfg.value_or(default_stft_config(variant));
  auto linear = [](std::int64_t d_in, std::int64_t d_out) {
    return d_in * d_out + d_out;
  };
  auto stft_count = [](StftKanConfig cfg, int d_in, int d_out) {
    cfg.d_in = d_in;
    cfg.d_out = d_out;
    const auto fr = num_windows(cfg.d_in, cfg.window_size, cfg.stride);
    return 2LL * d_out * fr.num_windows * cfg.grid_size +
           (cfg.use_bias ? d_out : 0);
  };
  auto fourier_count = [](std::int64_t d_in, std::int64_t d_out, int g) {
    return 2LL * d_out * d_in * g + d_out;
  };
  const int pooled = 2 * dims.emb;
  switch (variant) {
    case ModelVariant::Mlp:
      return linear(6, dims.hidden1) + linear(dims.hidden1, dims.hidden2) +
             linear(dims.hidden2, dims.emb) + linear(pooled, num_classes);
    case ModelVariant::StftKan:
      return stft_count(stft.ecl1, 6, dims.hidden1) +
             stft_count(stft.ecl2, dims.hidden1, dims.hidden2) +
             stft_count(stft.fel, dims.hidden2, dims.emb) +
             stft_count(stft.cl, pooled, num_classes);
    case ModelVariant::StftKanMlp:
      return linear(6, dims.hidden1) + linear(dims.hidden1, dims.hidden2) +
             stft_count(stft.fel, dims.hidden2, dims.emb) +
             stft_count(stft.cl, pooled, num_classes);
    case ModelVariant::FourierKan:
      return fourier_count(6, dims.hidden1, 1) +
             fourier_count(dims.hidden1, dims.hidden2, 1) +
             fourier_count(dims.hidden2, dims.emb, 1) +
             fourier_count(pooled, num_classes, 1);
  }
  throw ConfigError("unknown model variant");
}

}  // namespace stftkan
