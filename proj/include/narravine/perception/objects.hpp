#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/common/stickers.hpp"
#include "narravine/perception/face.hpp"

namespace narravine::perception {

using narravine::StickerEntry;
using narravine::StickerManifest;

struct CubeObservation {
  Bbox bbox;
  std::string class_label;
  double confidence = 0;
  std::int64_t frame_ts = 0;
};

void to_json(Json& j, const CubeObservation& o);
void from_json(const Json& j, CubeObservation& o);

// Online-trainable set of object classes. Safe to use from several threads.
class ClassRegistry {
 public:
  void register_class(const std::string& label, const std::vector<CubeObservation>& samples);
  bool contains(const std::string& label) const;
  std::vector<std::string> labels() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<CubeObservation>> classes_;
};

void register_manifest(ClassRegistry& reg, const StickerManifest& manifest);

struct DetectorOptions {
  double misdetection_probability = 0.0;
  double noise_level = 0.0;
  std::uint64_t seed = 3;
};

class ObjectDetector {
 public:
  ObjectDetector(const ClassRegistry& registry, DetectorOptions opts = {});

  // scripted_cube is the ground truth in view, if any.
  CubeObservation detect(const std::optional<std::string>& scripted_cube, std::int64_t frame_ts);

  double correct_confidence() const;
  double misdetect_confidence() const;

 private:
  const ClassRegistry& registry_;
  DetectorOptions opts_;
  std::mt19937_64 rng_;
};

}  // namespace narravine::perception
