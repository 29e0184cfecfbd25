#pragma once

#include "stftkan/model.hpp"
#include "stftkan/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

namespace stftkan {

// Checkpoint layout, little-endian:
//   magic "SKCK" | version u32 | variant u8 | classes u32
//   dims: k, hidden1, hidden2, emb (u32 each)
//   per block (ecl1, ecl2, fel, cl): layer count u32,
//     per layer: tag u8, layer config, layer tensors (f32, length-prefixed)

inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename S>
void save_checkpoint(LiteDgcnnModel<S>& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot write " + path.string());
  os.write("SKCK", 4);
  io::write_pod<std::uint32_t>(os, kCheckpointVersion);
  io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(model.variant()));
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(model.num_classes()));
  const auto& d = model.dims();
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d.k));
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d.hidden1));
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d.hidden2));
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d.emb));
  for (auto& block : model.blocks()) {
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(block.size()));
    for (auto* layer : block) {
      io::write_pod<std::uint8_t>(os, layer->tag());
      layer->write_config(os);
      layer->write_params(os);
    }
  }
  if (!os) throw CheckpointError("write failure on " + path.string());
}

template <typename S>
LayerPtr<S> read_layer(std::istream& is) {
  const auto tag = io::read_pod<std::uint8_t>(is);
  switch (tag) {
    case 0: {
      const auto d_in = static_cast<int>(io::read_pod<std::uint32_t>(is));
      const auto d_out = static_cast<int>(io::read_pod<std::uint32_t>(is));
      auto layer = std::make_unique<LinearLayer<S>>(d_in, d_out);
      layer->read_params(is);
      return layer;
    }
    case 1: {
      const auto dim = static_cast<int>(io::read_pod<std::uint32_t>(is));
      return std::make_unique<ReluLayer<S>>(dim);
    }
    case 2: {
      const auto cfg = StftKanLayer<S>::read_config(is);
      auto layer = std::make_unique<StftKanLayer<S>>(cfg);
      layer->read_params(is);
      return layer;
    }
    case 3: {
      const auto d_in = static_cast<int>(io::read_pod<std::uint32_t>(is));
      const auto d_out = static_cast<int>(io::read_pod<std::uint32_t>(is));
      const auto g = static_cast<int>(io::read_pod<std::uint32_t>(is));
      auto layer = std::make_unique<FourierKanLayer<S>>(d_in, d_out, g);
      layer->read_params(is);
      return layer;
    }
    default:
      throw CheckpointError("unknown layer tag in checkpoint");
  }
}

template <typename S>
LiteDgcnnModel<S> load_checkpoint(
    const std::filesystem::path& path,
    std::optional<ModelVariant> expected_variant = {}) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "SKCK")
    throw CheckpointError(path.string() + ": bad checkpoint magic");
  const auto version = io::read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw CheckpointError(path.string() + ": unsupported checkpoint version " +
                          std::to_string(version));
  const auto variant = static_cast<ModelVariant>(io::read_pod<std::uint8_t>(is));
  if (expected_variant && variant != *expected_variant)
    throw CheckpointError(path.string() + ": checkpoint holds variant " +
                          variant_name(variant) + ", expected " +
                          variant_name(*expected_variant));
  const auto classes = static_cast<int>(io::read_pod<std::uint32_t>(is));
  ModelDims dims;
  dims.k = static_cast<int>(io::read_pod<std::uint32_t>(is));
  dims.hidden1 = static_cast<int>(io::read_pod<std::uint32_t>(is));
  dims.hidden2 = static_cast<int>(io::read_pod<std::uint32_t>(is));
  dims.emb = static_cast<int>(io::read_pod<std::uint32_t>(is));

  LiteDgcnnModel<S> model;
  std::vector<LayerPtr<S>>* blocks[4] = {&model.ecl1_, &model.ecl2_, &model.fel_,
                                         &model.cl_};
  for (auto* block : blocks) {
    const auto count = io::read_pod<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < count; ++i)
      block->push_back(read_layer<S>(is));
  }
  model.set_meta(variant, classes, dims);
  return model;
}

}  // namespace stftkan
