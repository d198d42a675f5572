#include "narravine/perception/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "narravine/common/error.hpp"
#include "narravine/common/text.hpp"
#include "narravine/perception/errors.hpp"

namespace narravine::perception {

namespace {

constexpr double kCx = 320.0;
constexpr double kCy = 200.0;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double rad(double deg) { return deg * std::numbers::pi / 180.0; }

void check_length(const std::vector<double>& fv) {
  if (fv.size() != kGazeFeatureLength) {
    throw MalformedFeature("gaze feature vector has " + std::to_string(fv.size()) +
                           " elements, expected 57");
  }
}

}  // namespace

std::string to_string(GazeLabel l) {
  return l == GazeLabel::eye_contact ? "eye_contact" : "no_eye_contact";
}

std::vector<double> encode_gaze(const KeypointSet& kps) {
  std::vector<double> fv;
  fv.reserve(kGazeFeatureLength);
  for (const auto& kp : kps) {
    const Keypoint p = kp.value_or(Keypoint{});
    fv.push_back(p.x);
    fv.push_back(p.y);
    fv.push_back(clamp01(p.k));
  }
  return fv;
}

std::array<Keypoint, kGazeKeypoints> decode_gaze(const std::vector<double>& fv) {
  check_length(fv);
  std::array<Keypoint, kGazeKeypoints> out{};
  for (std::size_t i = 0; i < kGazeKeypoints; ++i) out[i] = {fv[3 * i], fv[3 * i + 1], fv[3 * i + 2]};
  return out;
}

GazeLabel label_for(const HeadPose& pose) {
  return std::abs(pose.yaw) + 2.0 * std::abs(pose.pitch) < 15.0 ? GazeLabel::eye_contact
                                                                : GazeLabel::no_eye_contact;
}

KeypointSet synthesize_keypoints(const HeadPose& pose, std::mt19937_64& rng, double pixel_noise) {
  std::normal_distribution<double> px(0.0, pixel_noise);
  const double sy = std::sin(rad(pose.yaw));
  const double cy = std::cos(rad(pose.yaw));
  const double sp = std::sin(rad(pose.pitch));
  auto place = [&](double bx, double by, double depth, double k) {
    return Keypoint{kCx + bx * cy + depth * sy + px(rng), kCy + by + 40.0 * sp + px(rng), clamp01(k)};
  };

  KeypointSet kps;
  const double k_left = 1.0 - std::max(0.0, pose.yaw) / 60.0 - std::abs(pose.pitch) / 60.0;
  const double k_right = 1.0 - std::max(0.0, -pose.yaw) / 60.0 - std::abs(pose.pitch) / 60.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / 8.0;
    const double ex = 10.0 * std::cos(a);
    const double ey = 4.0 * std::sin(a);
    kps[kLeftEyeBegin + i] = place(-30.0 + ex, ey, 40.0, k_left);
    kps[kRightEyeBegin + i] = place(30.0 + ex, ey, 40.0, k_right);
  }
  kps[kLeftEar] = place(-70.0, 10.0, 0.0, 0.6 + pose.yaw / 90.0);
  kps[kRightEar] = place(70.0, 10.0, 0.0, 0.6 - pose.yaw / 90.0);
  kps[kNose] = place(0.0, 25.0, 60.0, 1.0 - std::abs(pose.yaw) / 120.0);
  return kps;
}

std::vector<GazeSample> generate_gaze_samples(std::size_t n, std::uint64_t seed, double drop_rate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wide_yaw(-90.0, 90.0), wide_pitch(-45.0, 45.0);
  std::uniform_real_distribution<double> near_yaw(-25.0, 25.0), near_pitch(-12.0, 12.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GazeSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    HeadPose pose = i % 2 == 0 ? HeadPose{near_yaw(rng), near_pitch(rng)}
                               : HeadPose{wide_yaw(rng), wide_pitch(rng)};
    auto kps = synthesize_keypoints(pose, rng);
    for (auto& kp : kps) {
      if (unit(rng) < drop_rate) kp.reset();
    }
    out.push_back({encode_gaze(kps), label_for(pose)});
  }
  return out;
}

void write_gaze_csv(const std::string& path, const std::vector<GazeSample>& samples) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  for (std::size_t i = 0; i < kGazeFeatureLength; ++i) out << 'f' << i << ',';
  out << "label\n";
  out.setf(std::ios::fixed);
  out.precision(3);
  for (const auto& s : samples) {
    for (double v : s.features) out << v << ',';
    out << to_string(s.label) << '\n';
  }
}

std::vector<GazeSample> read_gaze_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<GazeSample> out;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto cells = text::split(line, ',');
    if (cells.size() != kGazeFeatureLength + 1) throw MalformedFeature("bad gaze csv row: " + line);
    GazeSample s;
    for (std::size_t i = 0; i < kGazeFeatureLength; ++i) s.features.push_back(std::stod(cells[i]));
    s.label = text::trim(cells.back()) == "eye_contact" ? GazeLabel::eye_contact
                                                        : GazeLabel::no_eye_contact;
    out.push_back(std::move(s));
  }
  return out;
}

GazeModel train_gaze_model(const std::vector<GazeSample>& samples, std::uint64_t seed) {
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (const auto& s : samples) {
    check_length(s.features);
    xs.push_back(s.features);
    ys.push_back(s.label == GazeLabel::eye_contact ? 1 : -1);
  }
  return GazeModel{train_linear_svm(xs, ys, SvmTraining{1e-4, 60, seed})};
}

GazeLabel classify_mutual_gaze(const std::vector<double>& fv, const GazeModel& model) {
  check_length(fv);
  return model.svm.decision(fv) >= 0.0 ? GazeLabel::eye_contact : GazeLabel::no_eye_contact;
}

}  // namespace narravine::perception
