#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>

#include "narravine/common/json.hpp"

namespace narravine::portnet {

// Largest accepted frame body (the JSON document after the length prefix).
inline constexpr std::size_t kMaxFrameBytes = 1024 * 1024;
inline constexpr std::size_t kLengthPrefixBytes = 4;

enum class MessageKind { event, command, reply, stream };

NLOHMANN_JSON_SERIALIZE_ENUM(MessageKind, {{MessageKind::event, "event"},
                                           {MessageKind::command, "command"},
                                           {MessageKind::reply, "reply"},
                                           {MessageKind::stream, "stream"}})

struct PortMessage {
  std::uint64_t seq = 0;
  std::int64_t sent_at = 0;  // wall-clock ms
  MessageKind kind = MessageKind::event;
  std::string sender;
  Json payload;

  bool operator==(const PortMessage& o) const {
    return seq == o.seq && sent_at == o.sent_at && kind == o.kind && sender == o.sender &&
           payload == o.payload;
  }
};

std::string encode_body(const PortMessage& m);
PortMessage decode_body(std::string_view body);

// 4-byte big-endian body length followed by the UTF-8 JSON body.
std::string encode_frame(const PortMessage& m);

// Incremental frame splitter for a byte stream.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  // Throws MalformedFrame / FrameTooLarge; the stream is unusable afterwards.
  bool next(PortMessage& out);
  std::size_t buffered() const { return buf_.size() - off_; }

 private:
  std::string buf_;
  std::size_t off_ = 0;
};

}  // namespace narravine::portnet
