#include "stftkan/checkpoint.hpp"
#include "stftkan/data.hpp"
#include "stftkan/gradcheck_suite.hpp"
#include "stftkan/search.hpp"
#include "stftkan/train.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace stftkan;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCheckpoint = 4;

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

SearchSpace parse_search_space(const std::string& path) {
  SearchSpace space;
  const auto kv = parse_kv_file(path);
  auto layer_bounds = [&](const std::string& prefix, LayerSearchBounds& b) {
    auto get = [&](const std::string& name, int& field) {
      const auto it = kv.find(prefix + "." + name);
      if (it != kv.end()) field = std::stoi(it->second);
    };
    get("grid_min", b.grid_min);
    get("grid_max", b.grid_max);
    get("window_min", b.window_min);
    get("window_max", b.window_max);
    get("stride_min", b.stride_min);
    get("stride_max", b.stride_max);
  };
  layer_bounds("ecl1", space.ecl1);
  layer_bounds("ecl2", space.ecl2);
  layer_bounds("fel", space.fel);
  layer_bounds("cl", space.cl);
  const auto it = kv.find("windows");
  if (it != kv.end()) {
    space.window_kinds.clear();
    std::istringstream ls(it->second);
    std::string name;
    while (std::getline(ls, name, ','))
      space.window_kinds.push_back(window_from_name(name));
    if (space.window_kinds.empty())
      throw ConfigError("search space: empty window list");
  }
  return space;
}

DatasetSplit split_from_cache(const std::string& path, std::uint64_t seed,
                              double ratio = 0.8) {
  const CachedDataset ds = read_cache(path);
  return stratified_split(ds.clouds, ds.class_names, ratio, seed);
}

void print_metrics(const Metrics& m, const std::vector<std::string>& class_names) {
  std::printf("overall_accuracy  %.4f\n", m.oa);
  std::printf("balanced_accuracy %.4f\n", m.ba);
  std::printf("param_count       %lld\n", static_cast<long long>(m.param_count));
  for (std::size_t c = 0; c < class_names.size(); ++c)
    std::printf("recall[%s] %.4f\n", class_names[c].c_str(),
                m.per_class_recall[c]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STFT-KAN / liteDGCNN point-cloud classifier"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);

  // preprocess
  auto* preprocess_cmd =
      app.add_subcommand("preprocess", "Ingest raw clouds into a binary cache");
  std::string pre_input, pre_output = "cache.stpc";
  int pre_points = 1024;
  std::uint64_t pre_seed = 0;
  preprocess_cmd->add_option("--input", pre_input, "Dataset root: <root>/<class>/*.xyz|*.ply")
      ->required();
  preprocess_cmd->add_option("--output", pre_output, "Cache file to write");
  preprocess_cmd->add_option("--points", pre_points, "Points per cloud after FPS");
  preprocess_cmd->add_option("--seed", pre_seed, "Reserved for future augmentation");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model variant");
  std::string train_variant = "mlp", train_data, train_out = "run";
  TrainConfig tcfg;
  int train_batch = -1;
  train_cmd->add_option("--variant", train_variant,
                        "mlp|stft-kan|stft-kan-mlp|fourier-kan");
  train_cmd->add_option("--data", train_data, "Preprocessed cache file")->required();
  train_cmd->add_option("--seed", tcfg.seed, "Global RNG seed");
  train_cmd->add_option("--epochs", tcfg.epochs, "Training epochs");
  train_cmd->add_option("--batch", train_batch, "Batch size (default 16; 2 for fourier-kan)");
  train_cmd->add_option("--lr", tcfg.lr, "Base learning rate");
  train_cmd->add_option("--weight-decay", tcfg.weight_decay, "L2 weight decay");
  train_cmd->add_option("--eta-min", tcfg.schedule.eta_min, "Cosine schedule floor");
  train_cmd->add_option("--out", train_out, "Output directory");
  bool no_augment = false;
  train_cmd->add_flag("--no-augment", no_augment, "Disable translation augmentation");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  std::string eval_ckpt, eval_data;
  std::uint64_t eval_seed = 0;
  eval_cmd->add_option("--ckpt", eval_ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--data", eval_data, "Preprocessed cache file")->required();
  eval_cmd->add_option("--seed", eval_seed, "Split seed (must match training)");

  // params
  auto* params_cmd = app.add_subcommand("params", "Report the parameter count");
  std::string params_variant = "stft-kan";
  int params_classes = 7;
  params_cmd->add_option("--variant", params_variant,
                         "mlp|stft-kan|stft-kan-mlp|fourier-kan");
  params_cmd->add_option("--classes", params_classes, "Number of classes");

  // gradcheck
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "Finite-difference check of all analytic gradients");
  std::uint64_t grad_seed = 0;
  grad_cmd->add_option("--seed", grad_seed, "RNG seed");

  // search
  auto* search_cmd =
      app.add_subcommand("search", "Uniform random hyperparameter search");
  std::string search_space_file, search_data, search_out = "search.csv";
  int search_trials = 10, search_epochs = 10;
  std::uint64_t search_seed = 0;
  search_cmd->add_option("--space", search_space_file, "Search-space bounds file (key=value)");
  search_cmd->add_option("--data", search_data, "Preprocessed cache file")->required();
  search_cmd->add_option("--trials", search_trials, "Number of trials");
  search_cmd->add_option("--epochs", search_epochs, "Epoch budget per trial");
  search_cmd->add_option("--seed", search_seed, "Global RNG seed");
  search_cmd->add_option("--out", search_out, "Ranked trial table CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*preprocess_cmd) {
      CachedDataset ds = preprocess_directory(pre_input, pre_points);
      write_cache(ds, pre_output);
      std::printf("wrote %zu clouds (%d classes, %d points each) to %s\n",
                  ds.clouds.size(), static_cast<int>(ds.class_names.size()),
                  pre_points, pre_output.c_str());
    } else if (*train_cmd) {
      tcfg.variant = variant_from_name(train_variant);
      tcfg.batch_size = train_batch > 0
                            ? train_batch
                            : TrainConfig::default_batch_size(tcfg.variant);
      tcfg.augment = !no_augment;
      tcfg.schedule.base_lr = tcfg.lr;
      tcfg.schedule.total_epochs = tcfg.epochs;
      const DatasetSplit split = split_from_cache(train_data, tcfg.seed);
      std::printf("training %s on %zu/%zu train/test clouds, %d epochs\n",
                  variant_name(tcfg.variant), split.train.size(),
                  split.test.size(), tcfg.epochs);
      const TrainResult result = train<float>(tcfg, split, {train_out});
      std::printf("best test OA %.4f (epoch %d); final test OA %.4f\n",
                  result.best_test_oa, result.best_epoch, result.final_test.oa);
      print_metrics(result.final_test, split.class_names);
    } else if (*eval_cmd) {
      const DatasetSplit split = split_from_cache(eval_data, eval_seed);
      auto model = load_checkpoint<float>(eval_ckpt);
      const Metrics m = evaluate_model(model, split.test);
      print_metrics(m, split.class_names);
    } else if (*params_cmd) {
      const auto variant = variant_from_name(params_variant);
      const auto count = reference_param_count(variant, params_classes);
      std::printf("%s C=%d: %lld parameters (%.2f M)\n", variant_name(variant),
                  params_classes, static_cast<long long>(count),
                  static_cast<double>(count) / 1e6);
    } else if (*grad_cmd) {
      const auto reports = run_gradcheck_suite(grad_seed);
      bool all_ok = true;
      for (const auto& r : reports) {
        std::printf("[%s] %-28s max rel err %.3e\n", r.passed ? "PASS" : "FAIL",
                    r.what.c_str(), r.max_rel_error);
        all_ok = all_ok && r.passed;
      }
      if (!all_ok) return kExitNumeric;
    } else if (*search_cmd) {
      const SearchSpace space = search_space_file.empty()
                                    ? SearchSpace{}
                                    : parse_search_space(search_space_file);
      TrainConfig base;
      base.variant = ModelVariant::StftKan;
      base.seed = search_seed;
      const DatasetSplit split = split_from_cache(search_data, search_seed);
      const auto trials =
          random_search<float>(space, search_trials, search_epochs, base, split);
      write_search_csv(trials, search_out);
      std::printf("best trial %d: test OA %.4f (table: %s)\n", trials[0].trial,
                  trials[0].test_oa, search_out.c_str());
    }
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
