#include "narravine/perception/node.hpp"

namespace narravine::perception {

PerceptionNode::PerceptionNode(portnet::Bus& bus, std::uint16_t port_base) : bus_(bus) {
  std::uint16_t offset = 1;
  for (const char* p : {kFacePort, kGazePort, kCubePort}) {
    bus_.register_port(p, "127.0.0.1", port_base == 0 ? 0 : static_cast<std::uint16_t>(port_base + offset));
    ++offset;
  }
}

PerceptionNode::~PerceptionNode() {
  for (const char* p : {kFacePort, kGazePort, kCubePort}) {
    try {
      bus_.deregister_port(p);
    } catch (...) {
    }
  }
}

std::size_t PerceptionNode::publish_face(const FaceDetection& partner, bool fallback) {
  return bus_.publish(kFacePort, portnet::MessageKind::event,
                      Json{{"track_id", partner.track_id}, {"bbox", partner.bbox}, {"fallback", fallback}});
}

std::size_t PerceptionNode::publish_gaze(GazeLabel label, std::int64_t ts) {
  return bus_.publish(kGazePort, portnet::MessageKind::event, Json{{"label", to_string(label)}, {"ts", ts}});
}

std::size_t PerceptionNode::publish_cube(const CubeObservation& obs) {
  return bus_.publish(kCubePort, portnet::MessageKind::event, Json(obs));
}

}  // namespace narravine::perception
