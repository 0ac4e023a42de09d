#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "crosslex/crypto.hpp"

namespace crosslex {

// One request/response exchange type per id. Every protocol here is a
// single round trip; multi-step operations chain several exchanges
// under one session id.
enum class ProtocolId : std::uint16_t {
  ping = 0,
  rekey = 1,    // blind, partial-decrypt, re-encrypt under a target key
  mul = 2,      // product of two blinded operands
  eqz = 3,      // zero test of a multiplicatively blinded difference
  sign = 4,     // sign bit of a blinded, parity-protected difference
  reveal = 5,   // joint decryption of a whitelisted value
};

enum class ItemKind : std::uint8_t {
  ciphertext = 1,
  partial = 2,
  plain = 3,
  key_id = 4,
  uint_be = 5,
  bytes = 6,
  error = 7,
};

// Typed payload inside a frame. Construction and access go through the
// named helpers; accessors throw TransportError on a kind mismatch.
struct Item {
  ItemKind kind = ItemKind::bytes;
  std::string payload;

  static Item ciphertext(const Ciphertext& ct);
  static Item partial(const PartialCiphertext& p);
  static Item plain(const BigNum& v);
  static Item key_id(const std::string& id);
  static Item uint_be(std::uint64_t v);
  static Item bytes(std::string data);
  static Item error(const std::string& code, const std::string& message);

  Ciphertext as_ciphertext() const;
  PartialCiphertext as_partial() const;
  BigNum as_plain() const;
  std::string as_key_id() const;
  std::uint64_t as_uint() const;
  const std::string& as_bytes() const;
  // Returns {code, message}.
  std::pair<std::string, std::string> as_error() const;
};

struct Frame {
  std::uint64_t session_id = 0;
  std::uint16_t protocol_id = 0;
  std::uint16_t step = 0;
  std::vector<Item> items;

  std::string encode() const;
  static Frame decode(const std::string& data);
};

// Hard cap on an encoded frame; anything larger is treated as a framing
// error rather than an allocation request.
inline constexpr std::uint32_t kMaxFrameBytes = 1u << 26;

class FrameHandler {
 public:
  virtual ~FrameHandler() = default;
  virtual Frame handle(const Frame& request) = 0;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual Frame round_trip(const Frame& request) = 0;
};

// Same-process peer. Requests still pass through encode/decode on both
// legs so the wire codec is exercised identically to the socket path.
class LocalTransport : public Transport {
 public:
  explicit LocalTransport(FrameHandler& handler) : handler_(&handler) {}
  Frame round_trip(const Frame& request) override;

 private:
  FrameHandler* handler_;
};

// Blocking client socket speaking length-prefixed frames.
class TcpTransport : public Transport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  Frame round_trip(const Frame& request) override;

 private:
  int fd_ = -1;
};

// Accept loop serving one handler. Connections are handled one at a
// time; each connection carries any number of sequential frames.
class TcpServer {
 public:
  // port 0 binds an ephemeral port, readable via port() afterwards.
  TcpServer(std::uint16_t port, FrameHandler& handler);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  // Blocks until stop() is called from another thread.
  void serve();
  void stop();

 private:
  void handle_connection(int fd);

  int listen_fd_ = -1;
  int wake_read_ = -1;
  int wake_write_ = -1;
  std::uint16_t port_ = 0;
  FrameHandler* handler_;
};

enum class Channel : std::uint8_t {
  cp_to_csp = 0,
  csp_to_cp = 1,
  csp_local = 2,  // plaintext values the helper observes while assisting
};

struct TranscriptEntry {
  Channel channel;
  std::uint64_t session_id = 0;
  std::uint16_t protocol_id = 0;
  std::uint16_t step = 0;
  // Empty for wire frames; "blinded" or "revealed" for local entries.
  std::string label;
  std::vector<Item> items;
};

// Shared observation log for protocol sessions. The security tests
// inspect it: wire entries mirror every frame, local entries record
// what the helper server could read in the clear.
class Transcript {
 public:
  void add_frame(Channel channel, const Frame& frame);
  void add_local(std::uint64_t session_id, std::uint16_t protocol_id,
                 std::uint16_t step, const std::string& label,
                 const BigNum& value);

  std::vector<TranscriptEntry> entries() const;
  std::size_t size() const;
  void clear();
  std::string to_text() const;

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptEntry> entries_;
};

}  // namespace crosslex
