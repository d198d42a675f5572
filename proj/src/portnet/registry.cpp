#include "narravine/portnet/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "narravine/common/error.hpp"
#include "narravine/portnet/errors.hpp"

namespace narravine::portnet {

void to_json(Json& j, const PortAddress& a) {
  j = Json{{"name", a.name}, {"host", a.host}, {"tcp_port", a.tcp_port}};
}

void from_json(const Json& j, PortAddress& a) {
  j.at("name").get_to(a.name);
  j.at("host").get_to(a.host);
  j.at("tcp_port").get_to(a.tcp_port);
}

void validate_port_name(std::string_view name) {
  if (name.empty() || name.front() != '/') {
    throw InvalidPortName("port name must start with '/': \"" + std::string(name) + "\"");
  }
  if (std::any_of(name.begin(), name.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; })) {
    throw InvalidPortName("port name contains whitespace: \"" + std::string(name) + "\"");
  }
}

void Registry::add(const PortAddress& addr) {
  validate_port_name(addr.name);
  std::lock_guard lock(mu_);
  if (live_.count(addr.name)) throw DuplicateName("port already registered: " + addr.name);
  for (const auto& [_, other] : live_) {
    if (other.host == addr.host && other.tcp_port == addr.tcp_port) {
      throw DuplicateName("address " + addr.host + ":" + std::to_string(addr.tcp_port) +
                          " already held by " + other.name);
    }
  }
  live_.emplace(addr.name, addr);
}

bool Registry::remove(const std::string& name) {
  std::lock_guard lock(mu_);
  return live_.erase(name) > 0;
}

std::optional<PortAddress> Registry::lookup(const std::string& name) const {
  std::lock_guard lock(mu_);
  if (auto it = live_.find(name); it != live_.end()) return it->second;
  if (auto it = static_.find(name); it != static_.end()) return it->second;
  return std::nullopt;
}

std::vector<PortAddress> Registry::live_entries() const {
  std::lock_guard lock(mu_);
  std::vector<PortAddress> out;
  for (const auto& [_, a] : live_) out.push_back(a);
  return out;
}

void Registry::load_static(const Json& config, std::uint16_t port_base) {
  std::map<std::string, PortAddress> table;
  for (const auto& entry : config.at("ports")) {
    PortAddress a;
    a.name = entry.at("name").get<std::string>();
    validate_port_name(a.name);
    a.host = entry.value("host", "127.0.0.1");
    auto port = static_cast<int>(port_base) + entry.value("offset", 0);
    if (port <= 0 || port > 65535) throw Error("static port out of range for " + a.name);
    a.tcp_port = static_cast<std::uint16_t>(port);
    table[a.name] = a;
  }
  std::lock_guard lock(mu_);
  static_ = std::move(table);
}

void Registry::load_static_file(const std::filesystem::path& path, std::uint16_t port_base) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read static registry " + path.string());
  load_static(Json::parse(in), port_base);
}

Json Registry::dump() const {
  std::lock_guard lock(mu_);
  Json live = Json::array(), stat = Json::array();
  for (const auto& [_, a] : live_) live.push_back(a);
  for (const auto& [_, a] : static_) stat.push_back(a);
  return Json{{"live", live}, {"static", stat}};
}

void Registry::dump_to_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write registry dump " + path.string());
  out << dump().dump(2) << '\n';
}

std::optional<std::uint16_t> Registry::port_base_from_env() {
  const char* v = std::getenv(kPortBaseEnv);
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n <= 0 || n > 65535) return std::nullopt;
  return static_cast<std::uint16_t>(n);
}

}  // namespace narravine::portnet
