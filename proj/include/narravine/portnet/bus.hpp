#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>

#include "narravine/common/clock.hpp"
#include "narravine/portnet/message.hpp"
#include "narravine/portnet/registry.hpp"

namespace narravine::portnet {

struct BusOptions {
  Millis connect_timeout{5000};
  Millis backoff_initial{100};
  int backoff_factor = 2;
  Millis backoff_cap{3000};
  // Delivery callbacks slower than this are reported as contract violations.
  Millis slow_handler_threshold{100};
  Millis send_timeout{2000};
};

// Reconnect delay after the n-th consecutive failed attempt (n starts at 0).
Millis backoff_delay(const BusOptions& opts, int attempt);

using MessageHandler = std::function<void(const PortMessage&)>;
using ConnectionId = std::uint64_t;

// Peer-to-peer named-port bus. Every registered port owns a TCP listener;
// connect(src, dst) opens a one-way link from a local port to a port found
// in the registry. Delivery is at-most-once per link; a dropped link is
// re-established in the background with exponential backoff.
class Bus {
 public:
  explicit Bus(BusOptions opts = {}, std::shared_ptr<Registry> registry = nullptr);
  ~Bus();
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  // port 0 binds an ephemeral port.
  PortAddress register_port(const std::string& name, const std::string& host = "127.0.0.1",
                            std::uint16_t port = 0);
  void deregister_port(const std::string& name);
  bool has_port(const std::string& name) const;

  // Messages arriving on `name` go to the handler, or to the port's mailbox
  // (see receive) while no handler is installed.
  void set_handler(const std::string& name, MessageHandler handler);
  std::optional<PortMessage> receive(const std::string& name, Millis timeout);

  ConnectionId connect(const std::string& src, const std::string& dst);
  void disconnect(ConnectionId id);
  bool is_connected(ConnectionId id) const;
  // Blocks until the link is up again or the timeout passes.
  bool wait_connected(ConnectionId id, Millis timeout) const;

  // Stamps seq/sent_at/sender; returns the number of links written.
  std::size_t publish(const std::string& port, PortMessage msg);
  std::size_t publish(const std::string& port, MessageKind kind, Json payload);

  Registry& registry() { return *registry_; }
  std::shared_ptr<Registry> shared_registry() const { return registry_; }
  std::uint64_t slow_deliveries() const { return slow_deliveries_.load(); }

 private:
  struct Port;
  struct Link;
  struct Inbound;

  void deliver(Port& port, const PortMessage& m);
  void accept_loop(Port& port, std::stop_token st);
  void read_loop(Port& port, Inbound& in, std::stop_token st);
  void link_loop(Link& link, std::stop_token st);
  bool try_open(Link& link, Millis timeout);
  std::shared_ptr<Port> find_port(const std::string& name) const;

  BusOptions opts_;
  std::shared_ptr<Registry> registry_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Port>> ports_;
  std::map<ConnectionId, std::shared_ptr<Link>> links_;
  ConnectionId next_link_id_ = 1;
  std::atomic<std::uint64_t> slow_deliveries_{0};
};

}  // namespace narravine::portnet
