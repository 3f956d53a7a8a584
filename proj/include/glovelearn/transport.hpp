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

#pragma once

// Ordered byte transports. The codec and the emulator only see these
// interfaces; nothing in the library enumerates serial devices.
//
// Transport specs accepted by open_sink/open_source:
//   pipe              stdout (sink) / stdin (source)
//   file:PATH         regular file, FIFO or character device
//   tcp:PORT          sink: listen on PORT and serve the first client
//   tcp:HOST:PORT     source: connect to HOST:PORT

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "glovelearn/bounded_queue.hpp"

namespace glovelearn {

class ByteSink {
 public:
  virtual ~ByteSink() = default;
  /// Returns false once the peer has gone away; no bytes are written after that.
  virtual bool write(std::span<const std::uint8_t> bytes) = 0;
  virtual void close() {}
};

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  /// Blocks until at least one byte is available. Returns 0 at end of stream.
  virtual std::size_t read(std::span<std::uint8_t> buffer) = 0;
};

/// In-process channel. write() applies backpressure once `capacity_chunks`
/// chunks are queued; read() returns 0 after close() once drained.
class MemoryChannel : public ByteSink, public ByteSource {
 public:
  explicit MemoryChannel(std::size_t capacity_chunks = 1024);

  bool write(std::span<const std::uint8_t> bytes) override;
  void close() override;
  std::size_t read(std::span<std::uint8_t> buffer) override;

 private:
  BoundedQueue<std::vector<std::uint8_t>> chunks_;
  std::vector<std::uint8_t> current_;
  std::size_t current_pos_ = 0;
};

/// Appends everything to a vector. Never closes.
class VectorSink : public ByteSink {
 public:
  bool write(std::span<const std::uint8_t> bytes) override;
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class SpanSource : public ByteSource {
 public:
  /// `chunk` bounds the bytes returned per read() to exercise reassembly.
  explicit SpanSource(std::span<const std::uint8_t> data, std::size_t chunk = 4096)
      : data_(data), chunk_(chunk == 0 ? 1 : chunk) {}
  std::size_t read(std::span<std::uint8_t> buffer) override;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t chunk_;
  std::size_t pos_ = 0;
};

/// Owns a POSIX file descriptor.
class FdTransport : public ByteSink, public ByteSource {
 public:
  FdTransport(int fd, bool owned);
  ~FdTransport() override;
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;

  bool write(std::span<const std::uint8_t> bytes) override;
  std::size_t read(std::span<std::uint8_t> buffer) override;
  void close() override;

 private:
  int fd_;
  bool owned_;
};

/// Listening TCP socket; port 0 picks an ephemeral port.
class TcpListener {
 public:
  explicit TcpListener(std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<FdTransport> accept_one();

 private:
  int fd_;
  std::uint16_t port_;
};

std::unique_ptr<FdTransport> tcp_connect(const std::string& host, std::uint16_t port);

/// Throws UsageError for a malformed spec, TransportError when opening fails.
std::unique_ptr<ByteSink> open_sink(const std::string& spec);
std::unique_ptr<ByteSource> open_source(const std::string& spec);

/// Reads the whole source.
std::vector<std::uint8_t> read_all(ByteSource& source);

}  // namespace glovelearn
