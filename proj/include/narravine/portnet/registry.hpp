#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "narravine/common/json.hpp"

namespace narravine::portnet {

struct PortAddress {
  std::string name;  // "/app/module/channel"
  std::string host;
  std::uint16_t tcp_port = 0;

  bool operator==(const PortAddress&) const = default;
};

void to_json(Json& j, const PortAddress& a);
void from_json(const Json& j, PortAddress& a);

// Throws InvalidPortName unless the name is non-empty, starts with '/' and
// has no whitespace.
void validate_port_name(std::string_view name);

inline constexpr const char* kPortBaseEnv = "NARRAVINE_PORT_BASE";

// Name service. Live registrations shadow the static table, which maps
// well-known names to host + (port base + offset) for processes that do not
// share the supervisor's address space.
class Registry {
 public:
  void add(const PortAddress& addr);
  bool remove(const std::string& name);
  std::optional<PortAddress> lookup(const std::string& name) const;
  std::vector<PortAddress> live_entries() const;

  // {"ports": [{"name": "/narravine/fsm/percept", "host": "127.0.0.1", "offset": 3}, ...]}
  void load_static(const Json& config, std::uint16_t port_base);
  void load_static_file(const std::filesystem::path& path, std::uint16_t port_base);

  Json dump() const;
  void dump_to_file(const std::filesystem::path& path) const;

  static std::optional<std::uint16_t> port_base_from_env();

 private:
  mutable std::mutex mu_;
  std::map<std::string, PortAddress> live_;
  std::map<std::string, PortAddress> static_;
};

}  // namespace narravine::portnet
