#pragma once

// Length-prefixed binary protocol for running the N-ary code across N server
// processes.
//
// Frame: u32 big-endian payload length, u8 kind, payload.
//   SETUP   N:u8 K:u16 L:u32 m:u16, then K*L symbols (u8, row-major by message)
//           A server acknowledges with an empty SETUP frame.
//   QUERY   K digits (u8)
//   ANSWER  ell:u8, then ell symbols (u8)
//   ERROR   code:u8, then UTF-8 text
//
// Symbols travel as single bytes, so m <= 256 and N <= 255. There is no
// transport security; the privacy studied here concerns query content only.

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pirlab/core.hpp"
#include "pirlab/nary_code.hpp"

namespace pirlab::net {

enum class FrameKind : std::uint8_t { kSetup = 0x01, kQuery = 0x02, kAnswer = 0x03, kError = 0x04 };

const char* to_string(FrameKind kind);

struct Frame {
  FrameKind kind = FrameKind::kError;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

class WireError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kHeaderSize = 5;
// Larger payloads are rejected before allocation.
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

std::vector<std::uint8_t> encode_frame(const Frame& f);
// `bytes` must hold exactly one frame. Throws WireError on truncation, an
// unknown kind or trailing bytes.
Frame decode_frame(std::span<const std::uint8_t> bytes);

enum class ErrorCode : std::uint8_t {
  kNotSetUp = 1,
  kMalformed = 2,
  kInvalidQuery = 3,
  kAlreadySetUp = 4,
  kUnsupported = 5,
  kUnexpectedKind = 6,
};

Frame error_frame(ErrorCode code, std::string_view text);

struct SetupPayload {
  CodeParams params;  // msg_len must equal N - 1
  MessageSet messages;
};

std::vector<std::uint8_t> encode_setup(const SetupPayload& s);
SetupPayload decode_setup(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_query(const QueryVector& q);
std::vector<std::uint8_t> encode_answer(const AnswerVector& a);

// Deterministic state machine of one server. Responses depend only on the
// SETUP payload and the incoming frame.
class ServerState {
 public:
  enum class Phase { kAwaitingSetup, kServing };

  explicit ServerState(std::uint32_t index);

  std::uint32_t index() const { return index_; }
  Phase phase() const;

  Frame handle(const Frame& request);

 private:
  Frame handle_setup(const Frame& request);
  Frame handle_query(const Frame& request) const;

  std::uint32_t index_;
  mutable std::mutex mu_;
  std::optional<nary::NaryCode> code_;
  MessageSet messages_;
};

// Blocking frame I/O on a connected socket. read_frame returns nullopt on a
// clean EOF before the header.
std::optional<Frame> read_frame(int fd);
void write_frame(int fd, const Frame& f);

// Accepts connections on host:port (port 0 picks a free port) and serves each
// on its own thread. Connections may carry any number of frames.
class TcpServer {
 public:
  TcpServer(std::uint32_t index, std::uint16_t port = 0, const std::string& host = "127.0.0.1");
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }
  const ServerState& state() const { return state_; }

  // Blocks until stop() is called from another thread.
  void wait();
  void stop();

 private:
  struct Worker {
    std::thread thread;
    int fd = -1;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void accept_loop();
  void serve_connection(int fd);

  ServerState state_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex workers_mu_;
  std::list<Worker> workers_;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// "host:port"; throws ContractError on bad syntax.
Endpoint parse_endpoint(std::string_view text);
// Comma-separated list.
std::vector<Endpoint> parse_endpoints(std::string_view text);
std::string to_string(const Endpoint& e);

class RetrievalError : public Error {
 public:
  using Error::Error;
};

// Holds one persistent connection per server, in server-index order.
class Client {
 public:
  explicit Client(std::vector<Endpoint> endpoints, int timeout_ms = 5000);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  // Sends SETUP to every server and waits for all acknowledgements.
  void setup(const SetupPayload& s);

  // Queries all servers concurrently and reconstructs W_k. Any connection,
  // protocol or length error aborts the whole retrieval.
  Message retrieve(const nary::NaryCode& code, std::uint32_t k, const RandomKey& key);

 private:
  Frame exchange(std::size_t n, const Frame& request);

  std::vector<Endpoint> endpoints_;
  int timeout_ms_;
  std::vector<int> fds_;
};

void client_setup(const std::vector<Endpoint>& endpoints, const SetupPayload& s);
Message client_retrieve(const std::vector<Endpoint>& endpoints, const nary::NaryCode& code,
                        std::uint32_t k, const RandomKey& key);

}  // namespace pirlab::net
