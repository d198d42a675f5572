#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/perception/linear.hpp"

namespace narravine::perception {

// 8 keypoints per eye, then the two ears, then the nose.
inline constexpr std::size_t kGazeKeypoints = 19;
inline constexpr std::size_t kGazeFeatureLength = kGazeKeypoints * 3;
inline constexpr std::size_t kLeftEyeBegin = 0;
inline constexpr std::size_t kRightEyeBegin = 8;
inline constexpr std::size_t kLeftEar = 16;
inline constexpr std::size_t kRightEar = 17;
inline constexpr std::size_t kNose = 18;

struct Keypoint {
  double x = 0;
  double y = 0;
  double k = 0;

  bool operator==(const Keypoint&) const = default;
};

using KeypointSet = std::array<std::optional<Keypoint>, kGazeKeypoints>;

enum class GazeLabel { eye_contact, no_eye_contact };

std::string to_string(GazeLabel l);

// Missing keypoints become (0, 0, 0).
std::vector<double> encode_gaze(const KeypointSet& kps);
std::array<Keypoint, kGazeKeypoints> decode_gaze(const std::vector<double>& fv);

// Synthetic head pose generator. Angles in degrees.
struct HeadPose {
  double yaw = 0;
  double pitch = 0;
};

KeypointSet synthesize_keypoints(const HeadPose& pose, std::mt19937_64& rng, double pixel_noise = 1.5);
GazeLabel label_for(const HeadPose& pose);

struct GazeSample {
  std::vector<double> features;
  GazeLabel label;
};

std::vector<GazeSample> generate_gaze_samples(std::size_t n, std::uint64_t seed,
                                              double drop_rate = 0.02);
void write_gaze_csv(const std::string& path, const std::vector<GazeSample>& samples);
std::vector<GazeSample> read_gaze_csv(const std::string& path);

struct GazeModel {
  LinearSvm svm;
};

GazeModel train_gaze_model(const std::vector<GazeSample>& samples, std::uint64_t seed = 5);
GazeLabel classify_mutual_gaze(const std::vector<double>& fv, const GazeModel& model);

}  // namespace narravine::perception
