#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/perception/linear.hpp"

namespace narravine::perception {

inline constexpr int kFrameWidth = 640;
inline constexpr int kFrameHeight = 480;
inline constexpr std::size_t kEmbeddingDim = 128;

struct Bbox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  bool operator==(const Bbox&) const = default;
};

struct FaceDetection {
  Bbox bbox;
  std::vector<double> embedding;
  int track_id = 0;

  bool operator==(const FaceDetection&) const = default;
};

struct FaceFrame {
  std::int64_t ts_ms = 0;
  std::vector<FaceDetection> detections;
};

// Throws PreconditionViolation on an out-of-frame bbox or a non-unit embedding.
void validate(const FaceDetection& d);

// Per-identity base embedding, stable for a given (identity, seed).
std::vector<double> identity_embedding(int identity, std::uint64_t seed = 2024);
std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t dim = kEmbeddingDim);
std::vector<double> jitter_embedding(const std::vector<double>& base, double sigma,
                                     std::mt19937_64& rng);

struct EnrollOptions {
  std::int64_t duration_ms = 5000;
  double threshold = 0.5;
  int impostors = 32;
  std::uint64_t seed = 11;
};

struct PartnerModel {
  LinearSvm svm;
  double threshold = 0.5;
  int partner_track = -1;
  int positives = 0;
  int negatives = 0;

  double confidence(const std::vector<double>& embedding) const;
  bool is_partner(const FaceDetection& d) const { return confidence(d.embedding) >= threshold; }
};

PartnerModel enroll_partner(const std::vector<FaceFrame>& stream, const EnrollOptions& opts = {});

// Never returns "unknown": falls back to the biggest bbox.
FaceDetection recognize_partner(const std::vector<FaceDetection>& detections,
                                const PartnerModel& model);

void to_json(Json& j, const Bbox& b);
void from_json(const Json& j, Bbox& b);
void to_json(Json& j, const FaceDetection& d);
void from_json(const Json& j, FaceDetection& d);

}  // namespace narravine::perception
