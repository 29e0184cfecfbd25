#pragma once

#include "stftkan/train.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <string>
#include <vector>

namespace stftkan {

struct LayerSearchBounds {
  int grid_min, grid_max;
  int window_min, window_max;
  int stride_min, stride_max;
};

// Uniform sampling bounds per windowed layer; defaults mirror the
// published search-space table.
struct SearchSpace {
  LayerSearchBounds ecl1{1, 4, 2, 4, 1, 3};
  LayerSearchBounds ecl2{1, 7, 10, 64, 5, 20};
  LayerSearchBounds fel{5, 10, 20, 100, 10, 25};
  LayerSearchBounds cl{5, 8, 150, 400, 8, 15};
  std::vector<WindowKind> window_kinds{
      WindowKind::Boxcar, WindowKind::Hann,     WindowKind::Hamming,
      WindowKind::Bartlett, WindowKind::Blackman, WindowKind::Kaiser};
};

struct SearchTrial {
  int trial = 0;
  StftModelConfig config;
  double test_oa = 0.0;
  double test_ba = 0.0;
};

namespace detail {

inline void sample_layer(StftKanConfig& cfg, const LayerSearchBounds& b,
                         const std::vector<WindowKind>& kinds, Rng& rng) {
  cfg.grid_size = static_cast<int>(rng.uniform_int(b.grid_min, b.grid_max));
  cfg.window_size = static_cast<int>(rng.uniform_int(b.window_min, b.window_max));
  cfg.stride = static_cast<int>(rng.uniform_int(b.stride_min, b.stride_max));
  cfg.smooth_init = rng.uniform_int(0, 1) == 1;
  cfg.window = kinds[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(kinds.size()) - 1))];
}

}  // namespace detail

// Draw one config uniformly within bounds; framing always yields
// N_w >= 1 (short inputs zero-pad to a single frame), so feasibility
// rejection can only trigger on pathological custom bounds.
inline StftModelConfig sample_config(const SearchSpace& space, Rng& rng,
                                     const ModelDims& dims) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    StftModelConfig cfg;
    detail::sample_layer(cfg.ecl1, space.ecl1, space.window_kinds, rng);
    detail::sample_layer(cfg.ecl2, space.ecl2, space.window_kinds, rng);
    detail::sample_layer(cfg.fel, space.fel, space.window_kinds, rng);
    detail::sample_layer(cfg.cl, space.cl, space.window_kinds, rng);
    const bool feasible =
        num_windows(6, cfg.ecl1.window_size, cfg.ecl1.stride).num_windows >= 1 &&
        num_windows(dims.hidden1, cfg.ecl2.window_size, cfg.ecl2.stride)
                .num_windows >= 1 &&
        num_windows(dims.hidden2, cfg.fel.window_size, cfg.fel.stride)
                .num_windows >= 1 &&
        num_windows(2 * dims.emb, cfg.cl.window_size, cfg.cl.stride)
                .num_windows >= 1;
    if (feasible) return cfg;
  }
  throw ConfigError("search: no feasible config within 100 attempts");
}

// Uniform random search over the windowed-layer hyperparameters: each
// trial trains the stft-kan variant for budget_epochs and records the
// final test OA. Fully seeded; trials ranked by OA descending.
template <typename S>
std::vector<SearchTrial> random_search(const SearchSpace& space, int trials,
                                       int budget_epochs,
                                       const TrainConfig& base,
                                       const DatasetSplit& split) {
  if (trials < 1) throw ConfigError("search: trials must be >= 1");
  std::vector<SearchTrial> results;
  Rng sampler(base.seed);
  for (int t = 0; t < trials; ++t) {
    SearchTrial trial;
    trial.trial = t;
    trial.config = sample_config(space, sampler, base.dims);
    TrainConfig cfg = base;
    cfg.variant = ModelVariant::StftKan;
    cfg.epochs = budget_epochs;
    cfg.stft = trial.config;
    cfg.seed = base.seed + static_cast<std::uint64_t>(t) + 1;
    const TrainResult r = train<S>(cfg, split);
    trial.test_oa = r.final_test.oa;
    trial.test_ba = r.final_test.ba;
    results.push_back(trial);
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchTrial& a, const SearchTrial& b) {
                     return a.test_oa > b.test_oa;
                   });
  return results;
}

inline void write_search_csv(const std::vector<SearchTrial>& trials,
                             const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << "rank,trial,test_oa,test_ba";
  for (const char* layer : {"ecl1", "ecl2", "fel", "cl"})
    os << ',' << layer << "_g," << layer << "_w," << layer << "_s," << layer
       << "_smooth," << layer << "_window";
  os << '\n';
  int rank = 0;
  for (const auto& t : trials) {
    os << rank++ << ',' << t.trial << ',' << t.test_oa << ',' << t.test_ba;
    for (const StftKanConfig* cfg :
         {&t.config.ecl1, &t.config.ecl2, &t.config.fel, &t.config.cl})
      os << ',' << cfg->grid_size << ',' << cfg->window_size << ','
         << cfg->stride << ',' << (cfg->smooth_init ? 1 : 0) << ','
         << window_name(cfg->window);
    os << '\n';
  }
}

}  // namespace stftkan
