#pragma once

#include <string>

#include "narravine/perception/face.hpp"
#include "narravine/perception/gaze.hpp"
#include "narravine/perception/objects.hpp"
#include "narravine/portnet/bus.hpp"

namespace narravine::perception {

inline constexpr const char* kFacePort = "/narravine/percept/face";
inline constexpr const char* kGazePort = "/narravine/percept/gaze";
inline constexpr const char* kCubePort = "/narravine/percept/cube";

// Output side of the simulated perception process: one port per channel.
// With a port base the ports bind base+1..base+3, otherwise ephemeral ports.
class PerceptionNode {
 public:
  explicit PerceptionNode(portnet::Bus& bus, std::uint16_t port_base = 0);
  ~PerceptionNode();

  std::size_t publish_face(const FaceDetection& partner, bool fallback);
  std::size_t publish_gaze(GazeLabel label, std::int64_t ts);
  std::size_t publish_cube(const CubeObservation& obs);

 private:
  portnet::Bus& bus_;
};

}  // namespace narravine::perception
