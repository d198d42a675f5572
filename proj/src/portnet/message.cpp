#include "narravine/portnet/message.hpp"

#include "narravine/portnet/errors.hpp"

namespace narravine::portnet {

std::string encode_body(const PortMessage& m) {
  Json j{{"seq", m.seq}, {"sent_at", m.sent_at}, {"kind", m.kind}, {"sender", m.sender},
         {"payload", m.payload}};
  try {
    return j.dump();
  } catch (const Json::exception& e) {
    throw MalformedFrame(std::string("payload is not valid UTF-8: ") + e.what());
  }
}

PortMessage decode_body(std::string_view body) {
  try {
    auto j = Json::parse(body);
    PortMessage m;
    j.at("seq").get_to(m.seq);
    j.at("sent_at").get_to(m.sent_at);
    j.at("kind").get_to(m.kind);
    j.at("sender").get_to(m.sender);
    m.payload = j.at("payload");
    return m;
  } catch (const Json::exception& e) {
    throw MalformedFrame(std::string("bad frame body: ") + e.what());
  }
}

std::string encode_frame(const PortMessage& m) {
  auto body = encode_body(m);
  if (body.size() > kMaxFrameBytes) {
    throw FrameTooLarge("frame body of " + std::to_string(body.size()) + " bytes exceeds " +
                        std::to_string(kMaxFrameBytes));
  }
  std::string frame;
  frame.reserve(kLengthPrefixBytes + body.size());
  auto n = static_cast<std::uint32_t>(body.size());
  frame.push_back(static_cast<char>((n >> 24) & 0xff));
  frame.push_back(static_cast<char>((n >> 16) & 0xff));
  frame.push_back(static_cast<char>((n >> 8) & 0xff));
  frame.push_back(static_cast<char>(n & 0xff));
  frame.append(body);
  return frame;
}

void FrameDecoder::feed(std::string_view bytes) {
  if (off_ > 0 && off_ == buf_.size()) {
    buf_.clear();
    off_ = 0;
  }
  buf_.append(bytes);
}

bool FrameDecoder::next(PortMessage& out) {
  if (buffered() < kLengthPrefixBytes) return false;
  const auto* p = reinterpret_cast<const unsigned char*>(buf_.data() + off_);
  std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                    (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (n > kMaxFrameBytes) throw FrameTooLarge("incoming frame of " + std::to_string(n) + " bytes");
  if (buffered() < kLengthPrefixBytes + n) return false;
  out = decode_body(std::string_view(buf_).substr(off_ + kLengthPrefixBytes, n));
  off_ += kLengthPrefixBytes + n;
  if (off_ > 64 * 1024 && off_ * 2 > buf_.size()) {
    buf_.erase(0, off_);
    off_ = 0;
  }
  return true;
}

}  // namespace narravine::portnet
