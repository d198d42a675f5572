#include "narravine/perception/face.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "narravine/common/error.hpp"
#include "narravine/perception/errors.hpp"

namespace narravine::perception {

namespace {

void normalize(std::vector<double>& v) {
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

}  // namespace

void validate(const FaceDetection& d) {
  const auto& b = d.bbox;
  if (b.x < 0 || b.y < 0 || b.w <= 0 || b.h <= 0 || b.x + b.w > kFrameWidth ||
      b.y + b.h > kFrameHeight) {
    throw PreconditionViolation("face bbox outside the 640x480 frame");
  }
  if (d.embedding.size() != kEmbeddingDim) throw PreconditionViolation("embedding must have 128 elements");
  double n = 0;
  for (double x : d.embedding) n += x * x;
  if (std::abs(std::sqrt(n) - 1.0) > 1e-6) throw PreconditionViolation("embedding is not unit norm");
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = g(rng);
  normalize(v);
  return v;
}

std::vector<double> identity_embedding(int identity, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(identity) + 1);
  return random_unit_vector(rng);
}

std::vector<double> jitter_embedding(const std::vector<double>& base, double sigma,
                                     std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  auto v = base;
  for (auto& x : v) x += g(rng);
  normalize(v);
  return v;
}

double PartnerModel::confidence(const std::vector<double>& embedding) const {
  return sigmoid(2.0 * svm.decision(embedding));
}

PartnerModel enroll_partner(const std::vector<FaceFrame>& stream, const EnrollOptions& opts) {
  std::map<int, std::pair<double, int>> area_by_track;  // sum, count
  std::vector<const FaceDetection*> window;
  std::optional<std::int64_t> start;
  for (const auto& frame : stream) {
    if (!start) start = frame.ts_ms;
    if (frame.ts_ms - *start >= opts.duration_ms) break;
    for (const auto& d : frame.detections) {
      validate(d);
      auto& [sum, count] = area_by_track[d.track_id];
      sum += d.bbox.area();
      ++count;
      window.push_back(&d);
    }
  }
  if (window.empty()) throw NoFaceSeen("no face detected during enrollment");

  int partner = area_by_track.begin()->first;
  double best = -1;
  for (const auto& [track, acc] : area_by_track) {
    const double mean_area = acc.first / acc.second;
    if (mean_area > best) {
      best = mean_area;
      partner = track;
    }
  }

  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (const auto* d : window) {
    xs.push_back(d->embedding);
    ys.push_back(d->track_id == partner ? 1 : -1);
  }
  std::mt19937_64 rng(opts.seed);
  for (int i = 0; i < opts.impostors; ++i) {
    xs.push_back(random_unit_vector(rng));
    ys.push_back(-1);
  }

  PartnerModel m;
  m.svm = train_linear_svm(xs, ys, SvmTraining{1e-2, 60, opts.seed});
  m.threshold = opts.threshold;
  m.partner_track = partner;
  m.positives = static_cast<int>(std::count(ys.begin(), ys.end(), 1));
  m.negatives = static_cast<int>(ys.size()) - m.positives;
  return m;
}

FaceDetection recognize_partner(const std::vector<FaceDetection>& detections,
                                const PartnerModel& model) {
  if (detections.empty()) throw EmptyScene("no detections to recognize");
  const FaceDetection* best = nullptr;
  double best_conf = -1;
  for (const auto& d : detections) {
    const double c = model.confidence(d.embedding);
    if (c >= model.threshold && c > best_conf) {
      best_conf = c;
      best = &d;
    }
  }
  if (best) return *best;
  const auto it = std::max_element(detections.begin(), detections.end(),
                                    [](const auto& a, const auto& b) { return a.bbox.area() < b.bbox.area(); });
  return *it;
}

void to_json(Json& j, const Bbox& b) { j = Json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

void from_json(const Json& j, Bbox& b) {
  j.at("x").get_to(b.x);
  j.at("y").get_to(b.y);
  j.at("w").get_to(b.w);
  j.at("h").get_to(b.h);
}

void to_json(Json& j, const FaceDetection& d) {
  j = Json{{"bbox", d.bbox}, {"embedding", d.embedding}, {"track_id", d.track_id}};
}

void from_json(const Json& j, FaceDetection& d) {
  j.at("bbox").get_to(d.bbox);
  j.at("embedding").get_to(d.embedding);
  d.track_id = j.value("track_id", 0);
}

}  // namespace narravine::perception
