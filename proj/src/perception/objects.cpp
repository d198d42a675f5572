#include "narravine/perception/objects.hpp"

#include <algorithm>
#include <fstream>

#include "narravine/common/error.hpp"
#include "narravine/perception/errors.hpp"

namespace narravine::perception {

void to_json(Json& j, const CubeObservation& o) {
  j = Json{{"bbox", o.bbox}, {"class_label", o.class_label}, {"confidence", o.confidence},
           {"frame_ts", o.frame_ts}};
}

void from_json(const Json& j, CubeObservation& o) {
  o.bbox = j.value("bbox", Bbox{});
  j.at("class_label").get_to(o.class_label);
  j.at("confidence").get_to(o.confidence);
  o.frame_ts = j.value("frame_ts", std::int64_t{0});
}

void ClassRegistry::register_class(const std::string& label,
                                   const std::vector<CubeObservation>& samples) {
  if (label.empty()) throw PreconditionViolation("empty class label");
  if (samples.empty()) throw PreconditionViolation("class " + label + " needs at least one sample");
  std::lock_guard lock(mu_);
  if (classes_.count(label)) throw DuplicateLabel("class already registered: " + label);
  classes_.emplace(label, samples);
}

bool ClassRegistry::contains(const std::string& label) const {
  std::lock_guard lock(mu_);
  return classes_.count(label) > 0;
}

std::vector<std::string> ClassRegistry::labels() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [label, samples] : classes_) out.push_back(label);
  return out;
}

std::size_t ClassRegistry::size() const {
  std::lock_guard lock(mu_);
  return classes_.size();
}

void register_manifest(ClassRegistry& reg, const StickerManifest& manifest) {
  for (const auto& e : manifest.entries()) {
    if (reg.contains(e.id)) continue;
    reg.register_class(e.id, {CubeObservation{Bbox{280, 200, 80, 80}, e.id, 1.0, 0}});
  }
}

ObjectDetector::ObjectDetector(const ClassRegistry& registry, DetectorOptions opts)
    : registry_(registry), opts_(opts), rng_(opts.seed) {}

double ObjectDetector::correct_confidence() const {
  return 0.99 - 0.5 * std::clamp(opts_.noise_level, 0.0, 1.0);
}

double ObjectDetector::misdetect_confidence() const {
  return 0.45 - 0.4 * std::clamp(opts_.noise_level, 0.0, 1.0);
}

CubeObservation ObjectDetector::detect(const std::optional<std::string>& scripted_cube,
                                       std::int64_t frame_ts) {
  if (!scripted_cube) throw NoCubeVisible("no cube in view");
  if (!registry_.contains(*scripted_cube)) {
    throw NoCubeVisible("cube " + *scripted_cube + " is not a registered class");
  }
  CubeObservation obs{Bbox{280, 200, 80, 80}, *scripted_cube, correct_confidence(), frame_ts};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (opts_.misdetection_probability > 0 && unit(rng_) < opts_.misdetection_probability) {
    auto others = registry_.labels();
    others.erase(std::remove(others.begin(), others.end(), *scripted_cube), others.end());
    if (others.empty()) throw NoCubeVisible("misdetection with a single registered class");
    obs.class_label = others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng_)];
    obs.confidence = misdetect_confidence();
  }
  return obs;
}

}  // namespace narravine::perception
