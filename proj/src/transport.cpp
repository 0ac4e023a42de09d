#include "crosslex/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <utility>

#include "crosslex/errors.hpp"

namespace crosslex {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<char>((v >> shift) & 0xff));
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& data) : data_(data) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
  }
  std::uint32_t u32() {
    auto b = take(4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | b[3];
  }
  std::uint64_t u64() {
    std::uint64_t hi = u32();
    return (hi << 32) | u32();
  }
  std::string raw(std::size_t len) {
    if (len > data_.size() - pos_) throw TransportError("truncated frame");
    std::string out = data_.substr(pos_, len);
    pos_ += len;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  const unsigned char* take(std::size_t len) {
    if (len > data_.size() - pos_) throw TransportError("truncated frame");
    const auto* p = reinterpret_cast<const unsigned char*>(data_.data()) + pos_;
    pos_ += len;
    return p;
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

// Splits on the first '\n'; both halves may be empty.
std::pair<std::string, std::string> split_once(const std::string& s) {
  auto nl = s.find('\n');
  if (nl == std::string::npos) throw TransportError("malformed item payload");
  return {s.substr(0, nl), s.substr(nl + 1)};
}

void require_kind(const Item& item, ItemKind want, const char* what) {
  if (item.kind != want)
    throw TransportError(std::string("expected ") + what + " item");
}

}  // namespace

Item Item::ciphertext(const Ciphertext& ct) {
  return {ItemKind::ciphertext,
          ct.key_tag + "\n" + ct.c1.to_hex() + "\n" + ct.c2.to_hex()};
}

Item Item::partial(const PartialCiphertext& p) {
  return {ItemKind::partial, p.value.to_hex()};
}

Item Item::plain(const BigNum& v) { return {ItemKind::plain, v.to_hex()}; }

Item Item::key_id(const std::string& id) { return {ItemKind::key_id, id}; }

Item Item::uint_be(std::uint64_t v) {
  std::string payload;
  put_u64(payload, v);
  return {ItemKind::uint_be, std::move(payload)};
}

Item Item::bytes(std::string data) {
  return {ItemKind::bytes, std::move(data)};
}

Item Item::error(const std::string& code, const std::string& message) {
  return {ItemKind::error, code + "\n" + message};
}

Ciphertext Item::as_ciphertext() const {
  require_kind(*this, ItemKind::ciphertext, "ciphertext");
  auto [tag, rest] = split_once(payload);
  auto [c1, c2] = split_once(rest);
  return {BigNum::from_hex(c1), BigNum::from_hex(c2), tag};
}

PartialCiphertext Item::as_partial() const {
  require_kind(*this, ItemKind::partial, "partial");
  return {BigNum::from_hex(payload)};
}

BigNum Item::as_plain() const {
  require_kind(*this, ItemKind::plain, "plain");
  return BigNum::from_hex(payload);
}

std::string Item::as_key_id() const {
  require_kind(*this, ItemKind::key_id, "key id");
  return payload;
}

std::uint64_t Item::as_uint() const {
  require_kind(*this, ItemKind::uint_be, "uint");
  if (payload.size() != 8) throw TransportError("bad uint payload length");
  std::uint64_t v = 0;
  for (unsigned char c : payload) v = (v << 8) | c;
  return v;
}

const std::string& Item::as_bytes() const {
  require_kind(*this, ItemKind::bytes, "bytes");
  return payload;
}

std::pair<std::string, std::string> Item::as_error() const {
  require_kind(*this, ItemKind::error, "error");
  return split_once(payload);
}

std::string Frame::encode() const {
  std::string out;
  put_u64(out, session_id);
  put_u16(out, protocol_id);
  put_u16(out, step);
  if (items.size() > 0xffff) throw TransportError("too many frame items");
  put_u16(out, static_cast<std::uint16_t>(items.size()));
  for (const Item& item : items) {
    out.push_back(static_cast<char>(item.kind));
    if (item.payload.size() > kMaxFrameBytes)
      throw TransportError("item payload too large");
    put_u32(out, static_cast<std::uint32_t>(item.payload.size()));
    out += item.payload;
  }
  if (out.size() > kMaxFrameBytes) throw TransportError("frame too large");
  return out;
}

Frame Frame::decode(const std::string& data) {
  ByteReader in(data);
  Frame frame;
  frame.session_id = in.u64();
  frame.protocol_id = in.u16();
  frame.step = in.u16();
  std::uint16_t count = in.u16();
  frame.items.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    Item item;
    std::uint8_t kind = in.u8();
    if (kind < 1 || kind > 7) throw TransportError("unknown item kind");
    item.kind = static_cast<ItemKind>(kind);
    std::uint32_t len = in.u32();
    item.payload = in.raw(len);
    frame.items.push_back(std::move(item));
  }
  if (!in.done()) throw TransportError("trailing bytes after frame");
  return frame;
}

Frame LocalTransport::round_trip(const Frame& request) {
  Frame parsed = Frame::decode(request.encode());
  Frame response = handler_->handle(parsed);
  return Frame::decode(response.encode());
}

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

void write_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd, data.data() + sent, data.size() - sent,
                       MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

// Returns false on clean EOF at the first byte, throws on a mid-read cut.
bool read_exact(int fd, char* buf, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    ssize_t n = ::recv(fd, buf + got, len - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("recv");
    }
    if (n == 0) {
      if (got == 0) return false;
      throw TransportError("connection closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

void write_frame(int fd, const Frame& frame) {
  std::string body = frame.encode();
  std::string out;
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out += body;
  write_all(fd, out);
}

// Empty optional on clean EOF before a frame starts.
bool read_frame(int fd, Frame& out) {
  char head[4];
  if (!read_exact(fd, head, 4)) return false;
  std::uint32_t len = 0;
  for (char c : head) len = (len << 8) | static_cast<unsigned char>(c);
  if (len > kMaxFrameBytes) throw TransportError("oversized frame announced");
  std::string body(len, '\0');
  if (len > 0 && !read_exact(fd, body.data(), len))
    throw TransportError("connection closed mid-frame");
  out = Frame::decode(body);
  return true;
}

}  // namespace

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                         &res);
  if (rc != 0)
    throw TransportError("resolve " + host + ": " + gai_strerror(rc));
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw TransportError("connect " + host + ": failed");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  fd_ = fd;
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

Frame TcpTransport::round_trip(const Frame& request) {
  write_frame(fd_, request);
  Frame response;
  if (!read_frame(fd_, response))
    throw TransportError("peer closed before responding");
  return response;
}

TcpServer::TcpServer(std::uint16_t port, FrameHandler& handler)
    : handler_(&handler) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_errno("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
    throw_errno("bind");
  if (::listen(listen_fd_, 8) < 0) throw_errno("listen");
  socklen_t len = sizeof(addr);
  if (::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0)
    throw_errno("getsockname");
  port_ = ntohs(addr.sin_port);
  int pipefd[2];
  if (::pipe(pipefd) < 0) throw_errno("pipe");
  wake_read_ = pipefd[0];
  wake_write_ = pipefd[1];
}

TcpServer::~TcpServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
  if (wake_read_ >= 0) ::close(wake_read_);
  if (wake_write_ >= 0) ::close(wake_write_);
}

void TcpServer::serve() {
  for (;;) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_read_, POLLIN, 0}};
    int rc = ::poll(fds, 2, -1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw_errno("poll");
    }
    if (fds[1].revents & POLLIN) return;
    if (!(fds[0].revents & POLLIN)) continue;
    int conn = ::accept(listen_fd_, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR) continue;
      throw_errno("accept");
    }
    handle_connection(conn);
  }
}

void TcpServer::handle_connection(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  try {
    Frame request;
    while (read_frame(fd, request)) {
      write_frame(fd, handler_->handle(request));
    }
  } catch (const TransportError&) {
    // A broken connection only ends that connection; the server stays up.
  }
  ::close(fd);
}

void TcpServer::stop() {
  char byte = 1;
  while (::write(wake_write_, &byte, 1) < 0 && errno == EINTR) {
  }
}

void Transcript::add_frame(Channel channel, const Frame& frame) {
  TranscriptEntry entry;
  entry.channel = channel;
  entry.session_id = frame.session_id;
  entry.protocol_id = frame.protocol_id;
  entry.step = frame.step;
  entry.items = frame.items;
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(std::move(entry));
}

void Transcript::add_local(std::uint64_t session_id, std::uint16_t protocol_id,
                           std::uint16_t step, const std::string& label,
                           const BigNum& value) {
  TranscriptEntry entry;
  entry.channel = Channel::csp_local;
  entry.session_id = session_id;
  entry.protocol_id = protocol_id;
  entry.step = step;
  entry.label = label;
  entry.items.push_back(Item::plain(value));
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<TranscriptEntry> Transcript::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

std::size_t Transcript::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

void Transcript::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
}

std::string Transcript::to_text() const {
  static const char* kChannelNames[] = {"cp->csp", "csp->cp", "csp-local"};
  std::ostringstream out;
  for (const TranscriptEntry& e : entries()) {
    out << kChannelNames[static_cast<int>(e.channel)] << " session="
        << e.session_id << " protocol=" << e.protocol_id << " step=" << e.step;
    if (!e.label.empty()) out << " label=" << e.label;
    for (const Item& item : e.items)
      out << " item(kind=" << static_cast<int>(item.kind)
          << ", bytes=" << item.payload.size() << ")";
    out << "\n";
  }
  return out.str();
}

}  // namespace crosslex
