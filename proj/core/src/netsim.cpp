#include "pirlab/netsim.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <future>

namespace pirlab::net {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

bool known_kind(std::uint8_t k) { return k >= 0x01 && k <= 0x04; }

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

// Reads exactly n bytes. Returns false on EOF before the first byte.
bool read_exact(int fd, std::uint8_t* buf, std::size_t n, bool eof_ok) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0 && eof_ok) return false;
      throw WireError("connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw WireError(errno_text("recv"));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

const char* to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::kSetup: return "SETUP";
    case FrameKind::kQuery: return "QUERY";
    case FrameKind::kAnswer: return "ANSWER";
    case FrameKind::kError: return "ERROR";
  }
  return "?";
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayload) throw WireError("payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + f.payload.size());
  put_u32(out, static_cast<std::uint32_t>(f.payload.size()));
  out.push_back(static_cast<std::uint8_t>(f.kind));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw WireError("truncated frame header");
  const std::uint32_t len = get_u32(bytes.data());
  if (!known_kind(bytes[4])) throw WireError("unknown frame kind " + std::to_string(bytes[4]));
  if (bytes.size() - kHeaderSize < len) {
    throw WireError("truncated payload: header claims " + std::to_string(len) + " bytes, " +
                    std::to_string(bytes.size() - kHeaderSize) + " present");
  }
  if (bytes.size() - kHeaderSize > len) throw WireError("length mismatch: trailing bytes after payload");
  return Frame{static_cast<FrameKind>(bytes[4]), {bytes.begin() + kHeaderSize, bytes.end()}};
}

Frame error_frame(ErrorCode code, std::string_view text) {
  Frame f{FrameKind::kError, {static_cast<std::uint8_t>(code)}};
  f.payload.insert(f.payload.end(), text.begin(), text.end());
  return f;
}

std::vector<std::uint8_t> encode_setup(const SetupPayload& s) {
  const auto& p = s.params;
  if (p.n_servers > 255 || p.n_messages > 65535 || p.msg_modulus > 256) {
    throw UnsupportedError("parameters exceed the wire limits (N <= 255, K <= 65535, m <= 256)");
  }
  s.messages.check_dimensions(p);
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(p.n_servers));
  put_u16(out, p.n_messages);
  put_u32(out, p.msg_len);
  put_u16(out, p.msg_modulus);
  for (const auto& msg : s.messages) {
    for (auto v : msg.values()) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

SetupPayload decode_setup(std::span<const std::uint8_t> payload) {
  if (payload.size() < 9) throw WireError("SETUP payload shorter than its 9-byte header");
  CodeParams p;
  p.n_servers = payload[0];
  p.n_messages = (std::uint32_t{payload[1]} << 8) | payload[2];
  p.msg_len = get_u32(payload.data() + 3);
  p.msg_modulus = (std::uint32_t{payload[7]} << 8) | payload[8];
  p.ans_modulus = p.msg_modulus;
  const std::uint64_t symbols = std::uint64_t{p.n_messages} * p.msg_len;
  if (payload.size() - 9 != symbols) {
    throw WireError("SETUP carries " + std::to_string(payload.size() - 9) + " symbols, expected K*L = " +
                    std::to_string(symbols));
  }
  p.validate();
  std::vector<Message> msgs;
  for (std::uint32_t k = 0; k < p.n_messages; ++k) {
    std::vector<std::uint32_t> v(payload.begin() + 9 + k * p.msg_len, payload.begin() + 9 + (k + 1) * p.msg_len);
    msgs.emplace_back(std::move(v), p.msg_modulus);
  }
  return SetupPayload{p, MessageSet(std::move(msgs))};
}

std::vector<std::uint8_t> encode_query(const QueryVector& q) {
  std::vector<std::uint8_t> out;
  for (auto d : q.digits()) out.push_back(static_cast<std::uint8_t>(d));
  return out;
}

std::vector<std::uint8_t> encode_answer(const AnswerVector& a) {
  if (a.size() > 255) throw WireError("answer longer than 255 symbols");
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(a.size())};
  for (auto v : a.values()) out.push_back(static_cast<std::uint8_t>(v));
  return out;
}

ServerState::ServerState(std::uint32_t index) : index_(index) {}

ServerState::Phase ServerState::phase() const {
  std::lock_guard lock(mu_);
  return code_ ? Phase::kServing : Phase::kAwaitingSetup;
}

Frame ServerState::handle(const Frame& request) {
  switch (request.kind) {
    case FrameKind::kSetup: return handle_setup(request);
    case FrameKind::kQuery: return handle_query(request);
    default:
      return error_frame(ErrorCode::kUnexpectedKind,
                         std::string("servers accept SETUP and QUERY, got ") + to_string(request.kind));
  }
}

Frame ServerState::handle_setup(const Frame& request) {
  std::lock_guard lock(mu_);
  if (code_) return error_frame(ErrorCode::kAlreadySetUp, "already serving; SETUP is accepted once");
  SetupPayload s;
  try {
    s = decode_setup(request.payload);
  } catch (const Error& e) {
    return error_frame(ErrorCode::kMalformed, e.what());
  }
  const auto& p = s.params;
  if (index_ >= p.n_servers) {
    return error_frame(ErrorCode::kUnsupported, "server index " + std::to_string(index_) + " >= N = " +
                                                    std::to_string(p.n_servers));
  }
  if (p.msg_len != p.n_servers - 1) {
    return error_frame(ErrorCode::kUnsupported, "the N-ary code needs L = N - 1");
  }
  try {
    code_ = nary::NaryCode::make(p.n_servers, p.n_messages, p.msg_modulus);
    s.messages.check_dimensions(p);
  } catch (const Error& e) {
    code_.reset();
    return error_frame(ErrorCode::kUnsupported, e.what());
  }
  messages_ = std::move(s.messages);
  return Frame{FrameKind::kSetup, {}};
}

Frame ServerState::handle_query(const Frame& request) const {
  std::lock_guard lock(mu_);
  if (!code_) return error_frame(ErrorCode::kNotSetUp, "QUERY before SETUP");
  const std::uint32_t N = code_->servers();
  if (request.payload.size() != code_->messages()) {
    return error_frame(ErrorCode::kMalformed, "QUERY must carry K = " + std::to_string(code_->messages()) +
                                                  " digits, got " + std::to_string(request.payload.size()));
  }
  std::vector<std::uint32_t> digits;
  std::uint32_t sum = 0;
  for (auto d : request.payload) {
    if (d >= N) return error_frame(ErrorCode::kInvalidQuery, "digit " + std::to_string(d) + " out of range");
    digits.push_back(d);
    sum = (sum + d) % N;
  }
  if (sum != index_) {
    return error_frame(ErrorCode::kInvalidQuery, "digit sum mod N is " + std::to_string(sum) + ", server index is " +
                                                     std::to_string(index_));
  }
  const QueryVector q(std::move(digits), N);
  return Frame{FrameKind::kAnswer, encode_answer(code_->answer(index_, q, messages_))};
}

std::optional<Frame> read_frame(int fd) {
  std::uint8_t hdr[kHeaderSize];
  if (!read_exact(fd, hdr, kHeaderSize, true)) return std::nullopt;
  const std::uint32_t len = get_u32(hdr);
  if (!known_kind(hdr[4])) throw WireError("unknown frame kind " + std::to_string(hdr[4]));
  if (len > kMaxPayload) throw WireError("payload length " + std::to_string(len) + " over limit");
  Frame f{static_cast<FrameKind>(hdr[4]), std::vector<std::uint8_t>(len)};
  if (len) read_exact(fd, f.payload.data(), len, false);
  return f;
}

void write_frame(int fd, const Frame& f) {
  const auto bytes = encode_frame(f);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t r = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw WireError(errno_text("send"));
    }
    sent += static_cast<std::size_t>(r);
  }
}

TcpServer::TcpServer(std::uint32_t index, std::uint16_t port, const std::string& host) : state_(index) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(errno_text("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    close_fd(listen_fd_);
    throw ContractError("listen address must be an IPv4 literal: " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 64) < 0) {
    const std::string msg = errno_text("bind/listen");
    close_fd(listen_fd_);
    throw Error(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) {
    wait();
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  wait();
  close_fd(listen_fd_);
  std::lock_guard lock(workers_mu_);
  for (auto& w : workers_) ::shutdown(w.fd, SHUT_RDWR);
  for (auto& w : workers_) {
    if (w.thread.joinable()) w.thread.join();
  }
  workers_.clear();
}

void TcpServer::accept_loop() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(workers_mu_);
    // Reap finished connections.
    for (auto it = workers_.begin(); it != workers_.end();) {
      if (*it->done) {
        it->thread.join();
        it = workers_.erase(it);
      } else {
        ++it;
      }
    }
    if (stopping_) {
      ::close(fd);
      return;
    }
    auto done = std::make_shared<std::atomic<bool>>(false);
    workers_.push_back(Worker{std::thread([this, fd, done] {
                                serve_connection(fd);
                                *done = true;
                              }),
                              fd, done});
  }
}

void TcpServer::serve_connection(int fd) {
  try {
    while (auto req = read_frame(fd)) write_frame(fd, state_.handle(*req));
  } catch (const WireError& e) {
    try {
      write_frame(fd, error_frame(ErrorCode::kMalformed, e.what()));
    } catch (const Error&) {
    }
  }
  ::shutdown(fd, SHUT_RDWR);
  ::close(fd);
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw ContractError("endpoint must look like host:port, got '" + std::string(text) + "'");
  }
  unsigned port = 0;
  const auto digits = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || port == 0 || port > 65535) {
    throw ContractError("bad port in endpoint '" + std::string(text) + "'");
  }
  return Endpoint{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::vector<Endpoint> parse_endpoints(std::string_view text) {
  std::vector<Endpoint> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_endpoint(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string to_string(const Endpoint& e) { return e.host + ":" + std::to_string(e.port); }

namespace {

int connect_to(const Endpoint& e, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(e.port);
  if (int rc = ::getaddrinfo(e.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw RetrievalError("cannot resolve " + to_string(e) + ": " + ::gai_strerror(rc));
  }
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw RetrievalError(errno_text("socket"));
  }
  timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  const int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc < 0) {
    const std::string msg = errno_text(("connect " + to_string(e)).c_str());
    ::close(fd);
    throw RetrievalError(msg);
  }
  return fd;
}

std::string error_text(const Frame& f) {
  if (f.payload.empty()) return "server error";
  return "server error " + std::to_string(f.payload[0]) + ": " +
         std::string(f.payload.begin() + 1, f.payload.end());
}

}  // namespace

Client::Client(std::vector<Endpoint> endpoints, int timeout_ms)
    : endpoints_(std::move(endpoints)), timeout_ms_(timeout_ms), fds_(endpoints_.size(), -1) {
  try {
    for (std::size_t n = 0; n < endpoints_.size(); ++n) fds_[n] = connect_to(endpoints_[n], timeout_ms_);
  } catch (...) {
    for (auto& fd : fds_) close_fd(fd);
    throw;
  }
}

Client::~Client() {
  for (auto& fd : fds_) close_fd(fd);
}

Frame Client::exchange(std::size_t n, const Frame& request) {
  try {
    write_frame(fds_[n], request);
    auto resp = read_frame(fds_[n]);
    if (!resp) throw RetrievalError("connection closed");
    return std::move(*resp);
  } catch (const WireError& e) {
    throw RetrievalError(e.what());
  }
}

void Client::setup(const SetupPayload& s) {
  const Frame req{FrameKind::kSetup, encode_setup(s)};
  std::vector<std::future<Frame>> futures;
  for (std::size_t n = 0; n < fds_.size(); ++n) {
    futures.push_back(std::async(std::launch::async, [this, n, &req] { return exchange(n, req); }));
  }
  std::vector<std::string> failures;
  for (std::size_t n = 0; n < futures.size(); ++n) {
    try {
      const Frame resp = futures[n].get();
      if (resp.kind == FrameKind::kError) throw RetrievalError(error_text(resp));
      if (resp.kind != FrameKind::kSetup) throw RetrievalError("unexpected reply to SETUP");
    } catch (const Error& e) {
      failures.push_back("server " + std::to_string(n) + " (" + to_string(endpoints_[n]) + "): " + e.what());
    }
  }
  if (!failures.empty()) throw RetrievalError("setup failed: " + failures.front());
}

Message Client::retrieve(const nary::NaryCode& code, std::uint32_t k, const RandomKey& key) {
  const std::uint32_t N = code.servers();
  if (fds_.size() != N) {
    throw ContractError("need " + std::to_string(N) + " endpoints, have " + std::to_string(fds_.size()));
  }
  std::vector<QueryVector> queries;
  for (std::uint32_t n = 0; n < N; ++n) queries.push_back(code.query_vector(n, k, key));

  std::vector<std::future<AnswerVector>> futures;
  for (std::uint32_t n = 0; n < N; ++n) {
    futures.push_back(std::async(std::launch::async, [&, n] {
      const Frame resp = exchange(n, Frame{FrameKind::kQuery, encode_query(queries[n])});
      if (resp.kind == FrameKind::kError) throw RetrievalError(error_text(resp));
      if (resp.kind != FrameKind::kAnswer || resp.payload.empty()) throw RetrievalError("malformed ANSWER");
      const std::size_t ell = resp.payload[0];
      if (resp.payload.size() != 1 + ell) throw RetrievalError("ANSWER length byte disagrees with payload");
      if (ell != code.answer_length(n, queries[n])) {
        throw RetrievalError("ANSWER has " + std::to_string(ell) + " symbols, expected " +
                             std::to_string(code.answer_length(n, queries[n])));
      }
      std::vector<std::uint32_t> v;
      for (std::size_t i = 0; i < ell; ++i) {
        if (resp.payload[1 + i] >= code.modulus()) throw RetrievalError("ANSWER symbol out of range");
        v.push_back(resp.payload[1 + i]);
      }
      return AnswerVector(std::move(v), code.modulus());
    }));
  }
  std::vector<AnswerVector> answers;
  std::optional<std::string> failure;
  for (std::uint32_t n = 0; n < N; ++n) {
    try {
      answers.push_back(futures[n].get());
    } catch (const Error& e) {
      if (!failure) failure = "server " + std::to_string(n) + " (" + to_string(endpoints_[n]) + "): " + e.what();
    }
  }
  if (failure) throw RetrievalError("retrieval failed: " + *failure);
  return code.reconstruct(answers, k, key);
}

void client_setup(const std::vector<Endpoint>& endpoints, const SetupPayload& s) {
  Client(endpoints).setup(s);
}

Message client_retrieve(const std::vector<Endpoint>& endpoints, const nary::NaryCode& code, std::uint32_t k,
                        const RandomKey& key) {
  return Client(endpoints).retrieve(code, k, key);
}

}  // namespace pirlab::net
