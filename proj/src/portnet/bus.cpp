#include "narravine/portnet/bus.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <list>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "narravine/portnet/errors.hpp"

namespace narravine::portnet {

namespace {

constexpr int kPollSliceMs = 50;

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  UniqueFd(UniqueFd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  UniqueFd& operator=(UniqueFd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~UniqueFd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset(int fd = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
  }

 private:
  int fd_ = -1;
};

std::optional<sockaddr_in> resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    return std::nullopt;
  }
  sockaddr_in sa{};
  std::memcpy(&sa, res->ai_addr, sizeof sa);
  ::freeaddrinfo(res);
  sa.sin_port = htons(port);
  return sa;
}

UniqueFd open_listener(const std::string& host, std::uint16_t port, std::uint16_t& bound) {
  auto sa = resolve(host, port);
  if (!sa) throw BindFailure("cannot resolve host " + host);
  UniqueFd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) throw BindFailure(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&*sa), sizeof *sa) != 0) {
    throw BindFailure("bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (::listen(fd.get(), 64) != 0) {
    throw BindFailure(std::string("listen: ") + std::strerror(errno));
  }
  sockaddr_in actual{};
  socklen_t len = sizeof actual;
  ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&actual), &len);
  bound = ntohs(actual.sin_port);
  return fd;
}

UniqueFd connect_with_timeout(const PortAddress& addr, Millis timeout, Millis send_timeout) {
  auto sa = resolve(addr.host, addr.tcp_port);
  if (!sa) return {};
  UniqueFd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC | SOCK_NONBLOCK, 0));
  if (!fd) return {};
  int rc = ::connect(fd.get(), reinterpret_cast<sockaddr*>(&*sa), sizeof *sa);
  if (rc != 0) {
    if (errno != EINPROGRESS) return {};
    pollfd p{fd.get(), POLLOUT, 0};
    if (::poll(&p, 1, static_cast<int>(timeout.count())) <= 0) return {};
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) return {};
  }
  int flags = ::fcntl(fd.get(), F_GETFL);
  ::fcntl(fd.get(), F_SETFL, flags & ~O_NONBLOCK);
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  timeval tv{};
  tv.tv_sec = send_timeout.count() / 1000;
  tv.tv_usec = (send_timeout.count() % 1000) * 1000;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  return fd;
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

Millis backoff_delay(const BusOptions& opts, int attempt) {
  auto d = opts.backoff_initial.count();
  for (int i = 0; i < attempt && d < opts.backoff_cap.count(); ++i) d *= opts.backoff_factor;
  return Millis(std::min<std::int64_t>(d, opts.backoff_cap.count()));
}

struct Bus::Inbound {
  UniqueFd fd;
  std::atomic<bool> done{false};
  std::jthread reader;
};

struct Bus::Link {
  ConnectionId id = 0;
  std::string src;
  std::string dst;
  mutable std::mutex mu;
  mutable std::condition_variable_any cv;
  UniqueFd fd;          // closed only by the link worker
  bool broken = false;  // set by a failed write; worker tears down and redials
  std::atomic<bool> up{false};
  std::jthread worker;
};

struct Bus::Port {
  PortAddress addr;
  UniqueFd listen_fd;

  std::mutex mu;
  std::list<std::unique_ptr<Inbound>> inbound;
  MessageHandler handler;
  std::condition_variable mail_cv;
  std::deque<PortMessage> mailbox;

  std::mutex publish_mu;  // guards next_seq and links
  std::uint64_t next_seq = 1;
  std::vector<std::shared_ptr<Link>> links;

  std::jthread acceptor;
};

Bus::Bus(BusOptions opts, std::shared_ptr<Registry> registry)
    : opts_(opts), registry_(registry ? std::move(registry) : std::make_shared<Registry>()) {}

Bus::~Bus() {
  std::vector<std::string> names;
  {
    std::lock_guard lock(mu_);
    for (const auto& [name, _] : ports_) names.push_back(name);
  }
  for (const auto& n : names) deregister_port(n);
}

PortAddress Bus::register_port(const std::string& name, const std::string& host,
                               std::uint16_t port) {
  validate_port_name(name);
  {
    std::lock_guard lock(mu_);
    if (ports_.count(name)) throw DuplicateName("port already registered: " + name);
  }
  if (auto existing = registry_->lookup(name); existing) {
    bool is_static_only = true;
    for (const auto& a : registry_->live_entries()) {
      if (a.name == name) is_static_only = false;
    }
    if (!is_static_only) throw DuplicateName("port already registered: " + name);
  }

  auto p = std::make_shared<Port>();
  std::uint16_t bound = 0;
  p->listen_fd = open_listener(host, port, bound);
  p->addr = PortAddress{name, host, bound};
  registry_->add(p->addr);
  {
    std::lock_guard lock(mu_);
    ports_[name] = p;
  }
  p->acceptor = std::jthread([this, raw = p.get()](std::stop_token st) { accept_loop(*raw, st); });
  spdlog::debug("registered {} on {}:{}", name, host, bound);
  return p->addr;
}

void Bus::deregister_port(const std::string& name) {
  std::shared_ptr<Port> p;
  std::vector<std::shared_ptr<Link>> links;
  {
    std::lock_guard lock(mu_);
    auto it = ports_.find(name);
    if (it == ports_.end()) throw UnknownPort("not a local port: " + name);
    p = it->second;
    ports_.erase(it);
    for (auto lit = links_.begin(); lit != links_.end();) {
      if (lit->second->src == name) {
        links.push_back(lit->second);
        lit = links_.erase(lit);
      } else {
        ++lit;
      }
    }
  }
  registry_->remove(name);
  p->acceptor.request_stop();
  if (p->acceptor.joinable()) p->acceptor.join();
  p->listen_fd.reset();
  for (auto& l : links) {
    l->worker.request_stop();
    if (l->worker.joinable()) l->worker.join();
  }
  {
    std::lock_guard pl(p->publish_mu);
    p->links.clear();
  }
  std::list<std::unique_ptr<Inbound>> inbound;
  {
    std::lock_guard lock(p->mu);
    inbound.swap(p->inbound);
  }
  for (auto& in : inbound) {
    in->reader.request_stop();
    if (in->reader.joinable()) in->reader.join();
  }
}

bool Bus::has_port(const std::string& name) const {
  std::lock_guard lock(mu_);
  return ports_.count(name) > 0;
}

std::shared_ptr<Bus::Port> Bus::find_port(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = ports_.find(name);
  if (it == ports_.end()) throw UnknownPort("not a local port: " + name);
  return it->second;
}

void Bus::set_handler(const std::string& name, MessageHandler handler) {
  auto p = find_port(name);
  std::deque<PortMessage> pending;
  {
    std::lock_guard lock(p->mu);
    p->handler = std::move(handler);
    if (p->handler) pending.swap(p->mailbox);
  }
  for (const auto& m : pending) deliver(*p, m);
}

std::optional<PortMessage> Bus::receive(const std::string& name, Millis timeout) {
  auto p = find_port(name);
  std::unique_lock lock(p->mu);
  if (!p->mail_cv.wait_for(lock, timeout, [&] { return !p->mailbox.empty(); })) {
    return std::nullopt;
  }
  auto m = std::move(p->mailbox.front());
  p->mailbox.pop_front();
  return m;
}

void Bus::deliver(Port& port, const PortMessage& m) {
  MessageHandler h;
  {
    std::lock_guard lock(port.mu);
    if (!port.handler) {
      port.mailbox.push_back(m);
      port.mail_cv.notify_all();
      return;
    }
    h = port.handler;
  }
  auto t0 = std::chrono::steady_clock::now();
  h(m);
  auto dt = std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - t0);
  if (dt > opts_.slow_handler_threshold) {
    ++slow_deliveries_;
    spdlog::warn("handler on {} blocked {} ms (limit {} ms)", port.addr.name, dt.count(),
                 opts_.slow_handler_threshold.count());
  }
}

void Bus::accept_loop(Port& port, std::stop_token st) {
  while (!st.stop_requested()) {
    pollfd pfd{port.listen_fd.get(), POLLIN, 0};
    int r = ::poll(&pfd, 1, kPollSliceMs);
    {
      std::lock_guard lock(port.mu);
      for (auto it = port.inbound.begin(); it != port.inbound.end();) {
        if ((*it)->done.load()) {
          if ((*it)->reader.joinable()) (*it)->reader.join();
          it = port.inbound.erase(it);
        } else {
          ++it;
        }
      }
    }
    if (r <= 0 || !(pfd.revents & POLLIN)) continue;
    int cfd = ::accept4(port.listen_fd.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (cfd < 0) continue;
    auto in = std::make_unique<Inbound>();
    in->fd.reset(cfd);
    auto* raw = in.get();
    std::lock_guard lock(port.mu);
    port.inbound.push_back(std::move(in));
    raw->reader = std::jthread([this, &port, raw](std::stop_token rst) { read_loop(port, *raw, rst); });
  }
}

void Bus::read_loop(Port& port, Inbound& in, std::stop_token st) {
  FrameDecoder decoder;
  std::vector<char> buf(64 * 1024);
  while (!st.stop_requested()) {
    pollfd pfd{in.fd.get(), POLLIN, 0};
    int r = ::poll(&pfd, 1, kPollSliceMs);
    if (r <= 0) continue;
    auto n = ::recv(in.fd.get(), buf.data(), buf.size(), 0);
    if (n == 0) break;
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      break;
    }
    decoder.feed(std::string_view(buf.data(), static_cast<std::size_t>(n)));
    try {
      PortMessage m;
      while (decoder.next(m)) deliver(port, m);
    } catch (const Error& e) {
      spdlog::error("dropping connection on {}: {}", port.addr.name, e.what());
      break;
    }
  }
  in.fd.reset();
  in.done = true;
}

bool Bus::try_open(Link& link, Millis timeout) {
  auto addr = registry_->lookup(link.dst);
  if (!addr) return false;
  auto fd = connect_with_timeout(*addr, timeout, opts_.send_timeout);
  if (!fd) return false;
  std::lock_guard lock(link.mu);
  link.fd = std::move(fd);
  link.broken = false;
  link.up = true;
  link.cv.notify_all();
  return true;
}

void Bus::link_loop(Link& link, std::stop_token st) {
  int attempt = 0;
  while (!st.stop_requested()) {
    int fd = -1;
    bool broken = false;
    {
      std::lock_guard lock(link.mu);
      fd = link.fd.get();
      broken = link.broken;
    }
    if (fd >= 0) {
      bool drop = broken;
      if (!drop) {
        pollfd pfd{fd, POLLIN, 0};
        if (::poll(&pfd, 1, kPollSliceMs) > 0) {
          char junk[256];
          auto n = ::recv(fd, junk, sizeof junk, MSG_DONTWAIT);
          drop = n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR);
        }
      }
      if (drop) {
        std::lock_guard lock(link.mu);
        link.fd.reset();
        link.up = false;
        link.cv.notify_all();
        spdlog::info("link {} -> {} lost, reconnecting", link.src, link.dst);
        attempt = 0;
      }
      continue;
    }
    if (try_open(link, std::min(opts_.connect_timeout, Millis(1000)))) {
      spdlog::info("link {} -> {} re-established", link.src, link.dst);
      attempt = 0;
      continue;
    }
    auto delay = backoff_delay(opts_, attempt++);
    std::unique_lock lock(link.mu);
    link.cv.wait_for(lock, st, delay, [] { return false; });
  }
  std::lock_guard lock(link.mu);
  link.fd.reset();
  link.up = false;
  link.cv.notify_all();
}

ConnectionId Bus::connect(const std::string& src, const std::string& dst) {
  auto port = find_port(src);
  if (!registry_->lookup(dst)) throw UnknownPort("no such port: " + dst);

  auto link = std::make_shared<Link>();
  link->src = src;
  link->dst = dst;
  auto deadline = std::chrono::steady_clock::now() + opts_.connect_timeout;
  int attempt = 0;
  while (true) {
    auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      throw ConnectTimeout("could not reach " + dst + " within " +
                           std::to_string(opts_.connect_timeout.count()) + " ms");
    }
    if (try_open(*link, std::min(left, Millis(1000)))) break;
    auto delay = std::min(backoff_delay(opts_, attempt++),
                          std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now()));
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
  }
  {
    std::lock_guard lock(mu_);
    link->id = next_link_id_++;
    links_[link->id] = link;
  }
  {
    std::lock_guard pl(port->publish_mu);
    port->links.push_back(link);
  }
  link->worker = std::jthread([this, raw = link.get()](std::stop_token st) { link_loop(*raw, st); });
  return link->id;
}

void Bus::disconnect(ConnectionId id) {
  std::shared_ptr<Link> link;
  {
    std::lock_guard lock(mu_);
    auto it = links_.find(id);
    if (it == links_.end()) return;
    link = it->second;
    links_.erase(it);
  }
  link->worker.request_stop();
  if (link->worker.joinable()) link->worker.join();
  if (auto p = [&]() -> std::shared_ptr<Port> {
        std::lock_guard lock(mu_);
        auto it = ports_.find(link->src);
        return it == ports_.end() ? nullptr : it->second;
      }()) {
    std::lock_guard pl(p->publish_mu);
    std::erase(p->links, link);
  }
}

bool Bus::is_connected(ConnectionId id) const {
  std::lock_guard lock(mu_);
  auto it = links_.find(id);
  return it != links_.end() && it->second->up.load();
}

bool Bus::wait_connected(ConnectionId id, Millis timeout) const {
  std::shared_ptr<Link> link;
  {
    std::lock_guard lock(mu_);
    auto it = links_.find(id);
    if (it == links_.end()) return false;
    link = it->second;
  }
  std::unique_lock lock(link->mu);
  return link->cv.wait_for(lock, timeout, [&] { return link->up.load() && !link->broken; });
}

std::size_t Bus::publish(const std::string& port_name, PortMessage msg) {
  auto port = find_port(port_name);
  std::lock_guard pl(port->publish_mu);
  msg.seq = port->next_seq;
  msg.sender = port_name;
  msg.sent_at = wall_clock_ms();
  auto frame = encode_frame(msg);
  ++port->next_seq;
  std::size_t delivered = 0;
  for (auto& link : port->links) {
    std::lock_guard lock(link->mu);
    if (!link->fd || link->broken) continue;
    if (write_all(link->fd.get(), frame)) {
      ++delivered;
    } else {
      link->broken = true;
      link->up = false;
      ::shutdown(link->fd.get(), SHUT_RDWR);
      link->cv.notify_all();
    }
  }
  return delivered;
}

std::size_t Bus::publish(const std::string& port, MessageKind kind, Json payload) {
  PortMessage m;
  m.kind = kind;
  m.payload = std::move(payload);
  return publish(port, std::move(m));
}

}  // namespace narravine::portnet
