// Copyright 2026 The glovelearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "glovelearn/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <csignal>
#include <cstring>

#include "glovelearn/errors.hpp"

namespace glovelearn {

MemoryChannel::MemoryChannel(std::size_t capacity_chunks) : chunks_(capacity_chunks) {}

bool MemoryChannel::write(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return !chunks_.closed();
  return chunks_.push(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

void MemoryChannel::close() { chunks_.close(); }

std::size_t MemoryChannel::read(std::span<std::uint8_t> buffer) {
  if (buffer.empty()) return 0;
  while (current_pos_ >= current_.size()) {
    auto next = chunks_.pop();
    if (!next) return 0;
    current_ = std::move(*next);
    current_pos_ = 0;
  }
  const std::size_t n = std::min(buffer.size(), current_.size() - current_pos_);
  std::copy_n(current_.begin() + static_cast<std::ptrdiff_t>(current_pos_), n, buffer.begin());
  current_pos_ += n;
  return n;
}

bool VectorSink::write(std::span<const std::uint8_t> bytes) {
  bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
  return true;
}

std::size_t SpanSource::read(std::span<std::uint8_t> buffer) {
  const std::size_t n = std::min({buffer.size(), chunk_, data_.size() - pos_});
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), n, buffer.begin());
  pos_ += n;
  return n;
}

FdTransport::FdTransport(int fd, bool owned) : fd_(fd), owned_(owned) {}

FdTransport::~FdTransport() { close(); }

void FdTransport::close() {
  if (fd_ >= 0 && owned_) ::close(fd_);
  fd_ = -1;
}

bool FdTransport::write(std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    if (fd_ < 0) return false;
    const ssize_t n = ::write(fd_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

std::size_t FdTransport::read(std::span<std::uint8_t> buffer) {
  while (fd_ >= 0) {
    const ssize_t n = ::read(fd_, buffer.data(), buffer.size());
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno != EINTR) throw TransportError(std::string("read failed: ") + std::strerror(errno));
  }
  return 0;
}

TcpListener::TcpListener(std::uint16_t port) : fd_(::socket(AF_INET, SOCK_STREAM, 0)), port_(port) {
  if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 1) < 0) {
    const std::string msg = std::strerror(errno);
    ::close(fd_);
    throw TransportError("cannot listen on port " + std::to_string(port) + ": " + msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<FdTransport> TcpListener::accept_one() {
  int client = -1;
  do {
    client = ::accept(fd_, nullptr, nullptr);
  } while (client < 0 && errno == EINTR);
  if (client < 0) throw TransportError(std::string("accept: ") + std::strerror(errno));
  return std::make_unique<FdTransport>(client, true);
}

std::unique_ptr<FdTransport> tcp_connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result); rc != 0) {
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) throw TransportError("cannot connect to " + host + ":" + service);
  return std::make_unique<FdTransport>(fd, true);
}

namespace {

std::uint16_t parse_port(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const int port = std::stoi(text, &used);
    if (used == text.size() && port >= 0 && port <= 65535) return static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
  }
  throw UsageError("bad port in transport spec '" + spec + "'");
}

// A TCP sink that owns its listener until the first client connects.
class TcpServerSink : public ByteSink {
 public:
  explicit TcpServerSink(std::uint16_t port) : listener_(port) {}
  bool write(std::span<const std::uint8_t> bytes) override {
    if (!client_) client_ = listener_.accept_one();
    return client_->write(bytes);
  }
  void close() override {
    if (client_) client_->close();
  }

 private:
  TcpListener listener_;
  std::unique_ptr<FdTransport> client_;
};

}  // namespace

std::unique_ptr<ByteSink> open_sink(const std::string& spec) {
  // A vanished reader must surface as a failed write, not SIGPIPE.
  std::signal(SIGPIPE, SIG_IGN);
  if (spec == "pipe") return std::make_unique<FdTransport>(STDOUT_FILENO, false);
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw TransportError("cannot open " + path + ": " + std::strerror(errno));
    return std::make_unique<FdTransport>(fd, true);
  }
  if (spec.rfind("tcp:", 0) == 0) return std::make_unique<TcpServerSink>(parse_port(spec.substr(4), spec));
  throw UsageError("unknown transport '" + spec + "' (expected pipe, file:PATH or tcp:PORT)");
}

std::unique_ptr<ByteSource> open_source(const std::string& spec) {
  if (spec == "pipe") return std::make_unique<FdTransport>(STDIN_FILENO, false);
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw TransportError("cannot open " + path + ": " + std::strerror(errno));
    return std::make_unique<FdTransport>(fd, true);
  }
  if (spec.rfind("tcp:", 0) == 0) {
    const std::string rest = spec.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) return tcp_connect("127.0.0.1", parse_port(rest, spec));
    return tcp_connect(rest.substr(0, colon), parse_port(rest.substr(colon + 1), spec));
  }
  throw UsageError("unknown transport '" + spec + "' (expected pipe, file:PATH or tcp:[HOST:]PORT)");
}

std::vector<std::uint8_t> read_all(ByteSource& source) {
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 4096> buf{};
  while (const std::size_t n = source.read(buf)) out.insert(out.end(), buf.begin(), buf.begin() + n);
  return out;
}

}  // namespace glovelearn
