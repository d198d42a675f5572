#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "narravine/perception/errors.hpp"
#include "narravine/perception/face.hpp"
#include "narravine/perception/gaze.hpp"
#include "narravine/perception/objects.hpp"

namespace narravine::perception {
namespace {

FaceDetection face(int identity, double w, double h, std::mt19937_64& rng, double x = 10, double y = 10) {
  return FaceDetection{Bbox{x, y, w, h}, jitter_embedding(identity_embedding(identity), 0.03, rng),
                       identity};
}

std::vector<FaceFrame> frames(const std::vector<std::pair<int, double>>& faces, int count,
                              std::mt19937_64& rng) {
  std::vector<FaceFrame> out;
  for (int f = 0; f < count; ++f) {
    FaceFrame fr{f * 100, {}};
    double x = 0;
    for (const auto& [id, side] : faces) {
      fr.detections.push_back(face(id, side, side, rng, x, 10));
      x += side + 1;
    }
    out.push_back(fr);
  }
  return out;
}

TEST(FaceTest, SingleFaceEnrollsThatEmbedding) {
  std::mt19937_64 rng(1);
  auto m = enroll_partner(frames({{4, 60}}, 20, rng));
  EXPECT_EQ(m.partner_track, 4);
  EXPECT_TRUE(m.is_partner(face(4, 60, 60, rng)));
  EXPECT_FALSE(m.is_partner(face(9, 60, 60, rng)));
}

TEST(FaceTest, BiggestBoxBecomesThePartner) {
  std::mt19937_64 rng(2);
  auto m = enroll_partner(frames({{1, 10}, {2, 20}}, 20, rng));  // areas 100 vs 400
  EXPECT_EQ(m.partner_track, 2);
  EXPECT_TRUE(m.is_partner(face(2, 20, 20, rng)));
  EXPECT_FALSE(m.is_partner(face(1, 10, 10, rng)));
}

TEST(FaceTest, EmptyStreamThrowsNoFaceSeen) {
  EXPECT_THROW(enroll_partner({}), NoFaceSeen);
  EXPECT_THROW(enroll_partner({FaceFrame{0, {}}, FaceFrame{100, {}}}), NoFaceSeen);
}

TEST(FaceTest, OnlyTheEnrollmentWindowCounts) {
  std::mt19937_64 rng(3);
  auto stream = frames({{1, 30}}, 10, rng);
  auto late = frames({{2, 200}}, 10, rng);
  for (auto& f : late) {
    f.ts_ms += 6000;
    stream.push_back(f);
  }
  EXPECT_EQ(enroll_partner(stream).partner_track, 1);
}

TEST(FaceTest, InvalidDetectionsAreRejected) {
  std::mt19937_64 rng(4);
  auto d = face(1, 50, 50, rng, 620, 10);
  EXPECT_THROW(validate(d), PreconditionViolation);
  auto e = face(1, 50, 50, rng);
  e.embedding[0] += 0.1;
  EXPECT_THROW(validate(e), PreconditionViolation);
}

TEST(FaceTest, RecognizeReturnsPartnerAmongThree) {
  std::mt19937_64 rng(5);
  auto m = enroll_partner(frames({{7, 50}, {8, 30}}, 20, rng));
  std::vector<FaceDetection> scene{face(3, 90, 90, rng), face(7, 20, 20, rng, 200), face(5, 60, 60, rng, 400)};
  EXPECT_EQ(recognize_partner(scene, m).track_id, 7);
}

TEST(FaceTest, FallbackPicksBiggestBox) {
  std::mt19937_64 rng(6);
  auto m = enroll_partner(frames({{7, 50}}, 20, rng));
  std::vector<FaceDetection> scene{face(11, 10, 10, rng), face(12, 20, 20, rng, 100)};
  ASSERT_LT(m.confidence(scene[0].embedding), m.threshold);
  ASSERT_LT(m.confidence(scene[1].embedding), m.threshold);
  EXPECT_EQ(recognize_partner(scene, m).track_id, 12);
  EXPECT_EQ(recognize_partner({scene[0]}, m).track_id, 11);
  EXPECT_THROW(recognize_partner({}, m), EmptyScene);
}

// Exhaustive check over generated scenes against an independent area oracle.
TEST(FaceTest, PropertyGeneratedScenes) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const int people = 1 + static_cast<int>(seed % 4);
    std::vector<FaceFrame> stream;
    std::map<int, std::pair<double, int>> areas;
    std::uniform_real_distribution<double> side(20, 140);
    std::vector<double> base(people);
    for (auto& b : base) b = side(rng);
    for (int f = 0; f < 25; ++f) {
      FaceFrame fr{f * 200, {}};
      for (int p = 0; p < people; ++p) {
        if (f % (p + 2) == 1) continue;  // faces come and go
        const double s = std::clamp(base[p] + std::normal_distribution<double>(0, 3)(rng), 10.0, 150.0);
        fr.detections.push_back(face(100 + p, s, s, rng, p * 155.0, 20));
        areas[100 + p].first += s * s;
        areas[100 + p].second += 1;
      }
      stream.push_back(fr);
    }
    int expected = -1;
    double best = -1;
    for (const auto& [id, acc] : areas) {
      if (acc.first / acc.second > best) {
        best = acc.first / acc.second;
        expected = id;
      }
    }
    auto m = enroll_partner(stream);
    ASSERT_EQ(m.partner_track, expected) << "seed " << seed;

    std::vector<FaceDetection> scene;
    for (int p = 0; p < people; ++p) scene.push_back(face(100 + p, 30 + 10 * p, 30 + 10 * p, rng, p * 155.0));
    scene.push_back(face(999, 60, 60, rng, 500));
    ASSERT_EQ(recognize_partner(scene, m).track_id, expected);
    scene.erase(std::remove_if(scene.begin(), scene.end(), [&](auto& d) { return d.track_id == expected; }),
                scene.end());
    auto got = recognize_partner(scene, m);
    bool any_confident = false;
    for (const auto& d : scene) any_confident |= m.is_partner(d);
    if (!any_confident) {
      double max_area = 0;
      for (const auto& d : scene) max_area = std::max(max_area, d.bbox.area());
      ASSERT_EQ(got.bbox.area(), max_area);
    }
  }
}

TEST(GazeTest, WrongLengthIsMalformed) {
  GazeModel m{train_gaze_model(generate_gaze_samples(200, 1))};
  EXPECT_THROW(classify_mutual_gaze(std::vector<double>(56, 0.0), m), MalformedFeature);
  EXPECT_THROW(decode_gaze(std::vector<double>(58, 0.0)), MalformedFeature);
}

TEST(GazeTest, EncodeDecodeKeepsLayout) {
  std::mt19937_64 rng(2);
  auto kps = synthesize_keypoints({10, 5}, rng);
  kps[kLeftEar].reset();
  auto fv = encode_gaze(kps);
  ASSERT_EQ(fv.size(), 57u);
  auto back = decode_gaze(fv);
  for (std::size_t i = 0; i < kGazeKeypoints; ++i) {
    EXPECT_EQ(back[i], kps[i].value_or(Keypoint{}));
  }
  EXPECT_EQ(back[kLeftEar], (Keypoint{0, 0, 0}));
}

TEST(GazeTest, ShippedModelSeparatesPrototypes) {
  auto model = train_gaze_model(read_gaze_csv(std::string(NARRAVINE_DATA_DIR) + "/gaze_train.csv"));
  std::mt19937_64 rng(3);
  EXPECT_EQ(classify_mutual_gaze(encode_gaze(synthesize_keypoints({0, 0}, rng)), model),
            GazeLabel::eye_contact);
  EXPECT_EQ(classify_mutual_gaze(encode_gaze(synthesize_keypoints({90, 0}, rng)), model),
            GazeLabel::no_eye_contact);
  EXPECT_EQ(classify_mutual_gaze(encode_gaze(synthesize_keypoints({-90, 0}, rng)), model),
            GazeLabel::no_eye_contact);

  auto held_out = generate_gaze_samples(2000, 999, 0.0);
  int hits = 0;
  for (const auto& s : held_out) hits += classify_mutual_gaze(s.features, model) == s.label;
  EXPECT_GE(hits / 2000.0, 0.97);
}

TEST(GazeTest, ClassificationIsDeterministic) {
  auto a = train_gaze_model(generate_gaze_samples(300, 4));
  auto b = train_gaze_model(generate_gaze_samples(300, 4));
  EXPECT_EQ(a.svm.weights, b.svm.weights);
}

StickerManifest manifest() {
  return StickerManifest::load(std::string(NARRAVINE_DATA_DIR) + "/stickers.json");
}

TEST(ObjectTest, ManifestHasNineStickersInThreeCategories) {
  auto m = manifest();
  ASSERT_EQ(m.entries().size(), 9u);
  std::map<std::string, int> cats;
  for (const auto& e : m.entries()) cats[e.category]++;
  EXPECT_EQ(cats, (std::map<std::string, int>{{"character", 3}, {"object", 3}, {"place", 3}}));
  EXPECT_EQ(m.head_noun("mushroom_house"), "house");
  EXPECT_EQ(StickerManifest().head_noun("purple_cow"), "cow");
}

TEST(ObjectTest, RegisterThenDetect) {
  ClassRegistry reg;
  ObjectDetector det(reg);
  EXPECT_THROW(det.detect(std::string("castle"), 0), NoCubeVisible);
  reg.register_class("castle", {CubeObservation{{}, "castle", 1, 0}});
  auto obs = det.detect(std::string("castle"), 5);
  EXPECT_EQ(obs.class_label, "castle");
  EXPECT_GE(obs.confidence, 0.9);
  EXPECT_EQ(obs.frame_ts, 5);
  EXPECT_THROW(reg.register_class("castle", {obs}), DuplicateLabel);
  EXPECT_THROW(reg.register_class("alien", {}), PreconditionViolation);
  EXPECT_THROW(det.detect(std::nullopt, 0), NoCubeVisible);
}

TEST(ObjectTest, ForcedMisdetectionChangesLabel) {
  ClassRegistry reg;
  register_manifest(reg, manifest());
  ObjectDetector det(reg, {1.0, 0.0, 9});
  for (int i = 0; i < 50; ++i) {
    auto obs = det.detect(std::string("alien"), i);
    EXPECT_NE(obs.class_label, "alien");
    EXPECT_TRUE(reg.contains(obs.class_label));
    EXPECT_LT(obs.confidence, 0.5);
  }
}

TEST(ObjectTest, ConfidenceFallsWithNoise) {
  ClassRegistry reg;
  register_manifest(reg, manifest());
  double prev = 2;
  for (double noise : {0.0, 0.25, 0.5, 1.0}) {
    ObjectDetector det(reg, {0.0, noise, 1});
    double c = det.detect(std::string("koala"), 0).confidence;
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(ObjectTest, PropertyInterleavedRegisterDetect) {
  auto ids = manifest().ids();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    ClassRegistry reg;
    std::set<std::string> oracle;
    ObjectDetector det(reg, {0.3, 0.2, seed});
    for (int step = 0; step < 60; ++step) {
      const auto& id = ids[rng() % ids.size()];
      if (rng() % 3 == 0) {
        if (oracle.count(id)) {
          EXPECT_THROW(reg.register_class(id, {CubeObservation{{}, id, 1, 0}}), DuplicateLabel);
        } else {
          reg.register_class(id, {CubeObservation{{}, id, 1, 0}});
          oracle.insert(id);
        }
        continue;
      }
      auto labels = reg.labels();
      ASSERT_EQ(std::set<std::string>(labels.begin(), labels.end()), oracle);
      try {
        auto obs = det.detect(id, step);
        ASSERT_TRUE(oracle.count(obs.class_label));
        ASSERT_TRUE(oracle.count(id));
      } catch (const NoCubeVisible&) {
        ASSERT_TRUE(!oracle.count(id) || oracle.size() == 1);
      }
    }
  }
}

}  // namespace
}  // namespace narravine::perception
