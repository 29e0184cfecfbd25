#pragma once

#include "stftkan/core.hpp"
#include "stftkan/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace stftkan {

using CloudMatrix = Eigen::Matrix<float, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct PointCloud {
  CloudMatrix points;
  int label = -1;
  std::string source_id;
};

struct DatasetSplit {
  std::vector<PointCloud> train;
  std::vector<PointCloud> test;
  std::vector<std::string> class_names;
  Vector<float> class_weights;
};

// --- file readers ------------------------------------------------------

inline PointCloud read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<float> coords;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z))
      throw ParseError(path.string() + ": malformed line " +
                       std::to_string(line_no));
    coords.push_back(static_cast<float>(x));
    coords.push_back(static_cast<float>(y));
    coords.push_back(static_cast<float>(z));
  }
  PointCloud c;
  c.points = Eigen::Map<CloudMatrix>(coords.data(),
                                     static_cast<Eigen::Index>(coords.size() / 3), 3);
  c.source_id = path.filename().string();
  if (c.points.rows() < 1) throw DataError(path.string() + ": empty cloud");
  return c;
}

inline PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  long vertex_count = -1;
  int prop_count = 0, xi = -1, yi = -1, zi = -1;
  bool in_vertex_element = false;
  // header
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii")
        throw ParseError(path.string() + ": only ascii PLY supported");
    } else if (tok == "element") {
      std::string what;
      ls >> what;
      in_vertex_element = (what == "vertex");
      if (in_vertex_element) ls >> vertex_count;
    } else if (tok == "property" && in_vertex_element) {
      std::string type, name;
      ls >> type >> name;
      if (name == "x") xi = prop_count;
      if (name == "y") yi = prop_count;
      if (name == "z") zi = prop_count;
      ++prop_count;
    } else if (tok == "end_header") {
      break;
    }
  }
  if (vertex_count < 1 || xi < 0 || yi < 0 || zi < 0)
    throw ParseError(path.string() + ": PLY header lacks vertex x/y/z");
  PointCloud c;
  c.points.resize(vertex_count, 3);
  for (long v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line))
      throw ParseError(path.string() + ": truncated vertex data");
    ++line_no;
    std::istringstream ls(line);
    std::vector<double> vals(prop_count);
    for (int p = 0; p < prop_count; ++p)
      if (!(ls >> vals[p]))
        throw ParseError(path.string() + ": malformed line " +
                         std::to_string(line_no));
    c.points(v, 0) = static_cast<float>(vals[xi]);
    c.points(v, 1) = static_cast<float>(vals[yi]);
    c.points(v, 2) = static_cast<float>(vals[zi]);
  }
  c.source_id = path.filename().string();
  return c;
}

inline PointCloud read_cloud(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".xyz" || ext == ".txt") return read_xyz(path);
  if (ext == ".ply") return read_ply(path);
  throw DataError("unknown point-cloud extension: " + path.string());
}

// --- preprocessing -----------------------------------------------------

// Greedy farthest-point sampling. Start = point nearest the centroid;
// each step adds the point maximizing the minimum distance to the
// selection; all ties break to the lowest index. Clouds smaller than m
// cycle the selected set.
inline std::vector<Eigen::Index> fps_indices(const CloudMatrix& points,
                                             Eigen::Index m) {
  const Eigen::Index n = points.rows();
  if (n < 1) throw DataError("fps: empty cloud");
  const Eigen::RowVector3f centroid = points.colwise().mean();
  Eigen::Index start = 0;
  float best = (points.row(0) - centroid).squaredNorm();
  for (Eigen::Index i = 1; i < n; ++i) {
    const float d = (points.row(i) - centroid).squaredNorm();
    if (d < best) {
      best = d;
      start = i;
    }
  }
  const Eigen::Index distinct = std::min(n, m);
  std::vector<Eigen::Index> selected;
  selected.reserve(m);
  selected.push_back(start);
  std::vector<float> min_dist(n);
  for (Eigen::Index i = 0; i < n; ++i)
    min_dist[i] = (points.row(i) - points.row(start)).squaredNorm();
  while (static_cast<Eigen::Index>(selected.size()) < distinct) {
    Eigen::Index far = 0;
    float far_d = -1.0f;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (min_dist[i] > far_d) {
        far_d = min_dist[i];
        far = i;
      }
    }
    selected.push_back(far);
    for (Eigen::Index i = 0; i < n; ++i)
      min_dist[i] = std::min(min_dist[i],
                             (points.row(i) - points.row(far)).squaredNorm());
  }
  // n < m: repeat the full selection cyclically
  for (Eigen::Index i = distinct; i < m; ++i)
    selected.push_back(selected[i % distinct]);
  return selected;
}

inline PointCloud fps(const PointCloud& cloud, Eigen::Index m) {
  const auto idx = fps_indices(cloud.points, m);
  PointCloud out;
  out.points.resize(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) out.points.row(i) = cloud.points.row(idx[i]);
  out.label = cloud.label;
  out.source_id = cloud.source_id;
  return out;
}

// Subtract centroid, divide by the farthest distance from it.
inline PointCloud normalize_unit_sphere(PointCloud cloud) {
  const Eigen::RowVector3f centroid = cloud.points.colwise().mean();
  cloud.points.rowwise() -= centroid;
  const float max_norm = cloud.points.rowwise().norm().maxCoeff();
  if (max_norm > 0.0f) cloud.points /= max_norm;
  return cloud;
}

// --- split, weights, augmentation --------------------------------------

inline Vector<float> class_weights(const std::vector<std::int64_t>& train_counts);

// Per class: train count = floor(ratio * count + 0.5) after a seeded
// shuffle; reproduces the published 80:20 per-class counts.
inline DatasetSplit stratified_split(const std::vector<PointCloud>& clouds,
                                     const std::vector<std::string>& class_names,
                                     double ratio, std::uint64_t seed) {
  DatasetSplit split;
  split.class_names = class_names;
  const int C = static_cast<int>(class_names.size());
  std::vector<std::vector<std::size_t>> by_class(C);
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].label < 0 || clouds[i].label >= C)
      throw DataError("split: label out of range");
    by_class[clouds[i].label].push_back(i);
  }
  Rng rng(seed);
  for (int c = 0; c < C; ++c) {
    auto& members = by_class[c];
    if (members.size() < 2)
      throw DataError("split: class " + class_names[c] + " has fewer than 2 samples");
    rng.shuffle(members);
    const auto train_count = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(members.size()) + 0.5));
    for (std::size_t i = 0; i < members.size(); ++i) {
      (i < train_count ? split.train : split.test).push_back(clouds[members[i]]);
    }
  }
  std::vector<std::int64_t> train_counts(C, 0);
  for (const auto& c : split.train) ++train_counts[c.label];
  split.class_weights = class_weights(train_counts);
  return split;
}

// w_c = min(mean / count_c, 10) for below-mean classes, 1 otherwise.
inline Vector<float> class_weights(const std::vector<std::int64_t>& train_counts) {
  const int C = static_cast<int>(train_counts.size());
  double mean = 0.0;
  for (auto c : train_counts) {
    if (c < 1) throw DataError("class_weights: counts must be >= 1");
    mean += static_cast<double>(c);
  }
  mean /= C;
  Vector<float> w(C);
  for (int c = 0; c < C; ++c) {
    const double count = static_cast<double>(train_counts[c]);
    w(c) = count < mean ? static_cast<float>(std::min(mean / count, 10.0)) : 1.0f;
  }
  return w;
}

// Rigid shift by one uniform offset in [-range, range]^3.
inline PointCloud augment_translate(PointCloud cloud, Rng& rng,
                                    double range = 0.2) {
  Eigen::RowVector3f offset;
  for (int i = 0; i < 3; ++i)
    offset(i) = static_cast<float>(rng.uniform(-range, range));
  cloud.points.rowwise() += offset;
  return cloud;
}

// --- preprocessed cache ------------------------------------------------
//
// Binary layout, little-endian:
//   magic "STPC" | version u32 | points-per-cloud u32
//   class count u32 | per class: name length u32 + UTF-8 bytes
//   sample count u32 | per sample: label u8, points*3 f32

inline constexpr std::uint32_t kCacheVersion = 1;

struct CachedDataset {
  std::vector<std::string> class_names;
  std::vector<PointCloud> clouds;
  std::uint32_t points_per_cloud = 1024;
};

inline void write_cache(const CachedDataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  os.write("STPC", 4);
  io::write_pod<std::uint32_t>(os, kCacheVersion);
  io::write_pod<std::uint32_t>(os, ds.points_per_cloud);
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ds.class_names.size()));
  for (const auto& name : ds.class_names) io::write_string(os, name);
  io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ds.clouds.size()));
  for (const auto& c : ds.clouds) {
    if (static_cast<std::uint32_t>(c.points.rows()) != ds.points_per_cloud)
      throw DataError("cache: cloud size does not match points-per-cloud");
    io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(c.label));
    for (Eigen::Index i = 0; i < c.points.rows(); ++i)
      for (int j = 0; j < 3; ++j) io::write_pod<float>(os, c.points(i, j));
  }
}

inline CachedDataset read_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "STPC")
    throw DataError(path.string() + ": bad cache magic");
  const auto version = io::read_pod<std::uint32_t>(is);
  if (version != kCacheVersion)
    throw DataError(path.string() + ": unsupported cache version " +
                    std::to_string(version));
  CachedDataset ds;
  ds.points_per_cloud = io::read_pod<std::uint32_t>(is);
  const auto num_classes = io::read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < num_classes; ++i)
    ds.class_names.push_back(io::read_string(is));
  const auto samples = io::read_pod<std::uint32_t>(is);
  ds.clouds.resize(samples);
  for (std::uint32_t s = 0; s < samples; ++s) {
    auto& c = ds.clouds[s];
    c.label = io::read_pod<std::uint8_t>(is);
    c.points.resize(ds.points_per_cloud, 3);
    for (std::uint32_t i = 0; i < ds.points_per_cloud; ++i)
      for (int j = 0; j < 3; ++j) c.points(i, j) = io::read_pod<float>(is);
    c.source_id = "cache:" + std::to_string(s);
  }
  return ds;
}

// Ingest <root>/<class_name>/*.{xyz,ply}: read, FPS to `points`, normalize.
inline CachedDataset preprocess_directory(const std::filesystem::path& root,
                                          Eigen::Index points) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw DataError("not a directory: " + root.string());
  CachedDataset ds;
  ds.points_per_cloud = static_cast<std::uint32_t>(points);
  std::map<std::string, std::vector<fs::path>> by_class;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    auto& files = by_class[entry.path().filename().string()];
    for (const auto& f : fs::directory_iterator(entry.path())) {
      const auto ext = f.path().extension().string();
      if (ext == ".xyz" || ext == ".ply" || ext == ".txt")
        files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
  }
  for (auto& [name, files] : by_class) {
    const int label = static_cast<int>(ds.class_names.size());
    ds.class_names.push_back(name);
    for (const auto& f : files) {
      PointCloud c = read_cloud(f);
      c.label = label;
      ds.clouds.push_back(normalize_unit_sphere(fps(c, points)));
    }
  }
  if (ds.clouds.empty()) throw DataError("no point clouds under " + root.string());
  return ds;
}

}  // namespace stftkan
