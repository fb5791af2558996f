// SPDX-License-Identifier: Apache-2.0

#include "plcbench/net/udp_network.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/prctl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>

#include "plcbench/common/error.hpp"

namespace plcbench::net {

namespace {

Instant monotonic_now() {
  return Instant{std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now().time_since_epoch())};
}

timespec to_timespec(Duration d) {
  if (d < Duration::zero()) {
    d = Duration::zero();
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(d);
  timespec ts{};
  ts.tv_sec = static_cast<time_t>(secs.count());
  ts.tv_nsec = static_cast<long>((d - secs).count());
  return ts;
}

sockaddr_in to_sockaddr(const Address& a) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(a.host);
  sa.sin_port = htons(a.port);
  return sa;
}

class UdpTransport final : public Transport {
 public:
  UdpTransport(Address host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) {
      throw StartupError(std::string("socket(): ") + std::strerror(errno));
    }
    auto sa = to_sockaddr(Address{host.host, port});
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
      const int err = errno;
      ::close(fd_);
      throw StartupError("bind " + Address{host.host, port}.to_string() + ": " + std::strerror(err));
    }
    socklen_t len = sizeof sa;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len);
    local_ = Address{ntohl(sa.sin_addr.s_addr), ntohs(sa.sin_port)};
  }

  ~UdpTransport() override { ::close(fd_); }

  UdpTransport(const UdpTransport&) = delete;
  UdpTransport& operator=(const UdpTransport&) = delete;

  [[nodiscard]] Address local_address() const override { return local_; }
  [[nodiscard]] int native_handle() const override { return fd_; }

  void send(const Address& to, ByteView payload) override {
    auto sa = to_sockaddr(to);
    // Loopback sends only fail on local resource problems; ECONNREFUSED from
    // an earlier ICMP is ignored the way UDP clients usually do.
    ::sendto(fd_, payload.data(), payload.size(), 0, reinterpret_cast<sockaddr*>(&sa), sizeof sa);
  }

  std::optional<Datagram> try_receive() override {
    std::array<std::uint8_t, 65536> buf{};
    sockaddr_in from{};
    socklen_t len = sizeof from;
    while (true) {
      const ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), MSG_DONTWAIT,
                                   reinterpret_cast<sockaddr*>(&from), &len);
      if (n >= 0) {
        return Datagram{Address{ntohl(from.sin_addr.s_addr), ntohs(from.sin_port)}, local_,
                        Bytes(buf.begin(), buf.begin() + n), monotonic_now()};
      }
      if (errno == ECONNREFUSED || errno == EINTR) {
        continue;
      }
      return std::nullopt;
    }
  }

  std::optional<Datagram> receive(Instant deadline) override {
    while (true) {
      if (auto d = try_receive()) {
        return d;
      }
      const auto now = monotonic_now();
      if (now >= deadline) {
        return std::nullopt;
      }
      pollfd pfd{fd_, POLLIN, 0};
      const auto ts = to_timespec(deadline - now);
      ::ppoll(&pfd, 1, &ts, nullptr);
    }
  }

 private:
  int fd_ = -1;
  Address local_;
};

}  // namespace

UdpNetwork::UdpNetwork(Address bind_host) : bind_host_(bind_host) {}

UdpNetwork::~UdpNetwork() {
  std::map<Actor*, std::unique_ptr<Runner>> runners;
  {
    std::lock_guard lock(mutex_);
    runners.swap(runners_);
  }
  for (auto& [actor, runner] : runners) {
    runner->stop = true;
    runner->thread.join();
  }
}

Instant UdpNetwork::now() const { return monotonic_now(); }

std::unique_ptr<Transport> UdpNetwork::bind(std::uint16_t port, Service) {
  return std::make_unique<UdpTransport>(bind_host_, port);
}

bool UdpNetwork::wait_until(const std::function<bool()>& ready, Instant deadline) {
  constexpr Duration kPollInterval = std::chrono::microseconds{10};
  while (true) {
    if (ready()) {
      return true;
    }
    const auto now = monotonic_now();
    if (now >= deadline) {
      return ready();
    }
    const auto nap = std::min<Duration>(kPollInterval, deadline - now);
    const auto ts = to_timespec(nap);
    ::nanosleep(&ts, nullptr);
  }
}

void UdpNetwork::attach(Actor& actor, std::vector<Transport*> watched) {
  auto runner = std::make_unique<Runner>();
  std::vector<int> fds;
  for (Transport* t : watched) {
    fds.push_back(t->native_handle());
  }
  Runner* r = runner.get();
  runner->thread = std::thread([r, &actor, fds = std::move(fds)] {
    // Tighter timer slack keeps 1 ms scan periods honest.
    ::prctl(PR_SET_TIMERSLACK, 1UL, 0, 0, 0);
    constexpr Duration kMaxSleep = std::chrono::milliseconds{20};
    std::vector<pollfd> pfds;
    for (int fd : fds) {
      pfds.push_back(pollfd{fd, POLLIN, 0});
    }
    while (!r->stop.load(std::memory_order_relaxed)) {
      const auto next = actor.next_wakeup();
      auto now = monotonic_now();
      Duration wait = next ? std::min<Duration>(*next - now, kMaxSleep) : kMaxSleep;
      bool readable = false;
      if (wait > Duration::zero()) {
        const auto ts = to_timespec(wait);
        for (auto& p : pfds) {
          p.revents = 0;
        }
        const int n = ::ppoll(pfds.data(), pfds.size(), &ts, nullptr);
        readable = n > 0;
      } else if (!pfds.empty()) {
        const timespec zero{};
        readable = ::ppoll(pfds.data(), pfds.size(), &zero, nullptr) > 0;
      }
      if (r->stop.load(std::memory_order_relaxed)) {
        break;
      }
      now = monotonic_now();
      if (readable || (next && now >= *next)) {
        actor.wake(now);
      }
    }
  });
  std::lock_guard lock(mutex_);
  runners_.emplace(&actor, std::move(runner));
}

void UdpNetwork::detach(Actor& actor) {
  std::unique_ptr<Runner> runner;
  {
    std::lock_guard lock(mutex_);
    auto it = runners_.find(&actor);
    if (it == runners_.end()) {
      return;
    }
    runner = std::move(it->second);
    runners_.erase(it);
  }
  runner->stop = true;
  runner->thread.join();
}

}  // namespace plcbench::net
