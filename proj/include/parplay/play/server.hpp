#pragma once

// One-port play server over POSIX sockets. WebSocket upgrades carry the
// session protocol; plain HTTP GETs read session metrics.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "parplay/play/session.hpp"
#include "parplay/play/websocket.hpp"

namespace parplay {

/// Owns live sessions; every method is safe to call from any thread.
class SessionRegistry {
 public:
  std::shared_ptr<Session> create(SessionConfig config) {
    std::lock_guard lock(mu_);
    auto s = std::make_shared<Session>("s" + std::to_string(++counter_), std::move(config));
    sessions_[s->id()] = s;
    return s;
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::vector<std::shared_ptr<Session>> all() const {
    std::lock_guard lock(mu_);
    std::vector<std::shared_ptr<Session>> out;
    for (const auto& [id, s] : sessions_) out.push_back(s);
    return out;
  }

  std::mutex& session_mutex() { return session_mu_; }

 private:
  mutable std::mutex mu_;
  std::mutex session_mu_;  // guards every Session's state
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

inline json session_summary(const Session& s) {
  return json{{"session", s.id()},
              {"robot", to_string(s.config().robot)},
              {"t", s.world().clock},
              {"complete", s.complete()},
              {"metrics", metrics_to_json(s.live_metrics())}};
}

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> headers;  // lower-case names
};

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::optional<HttpRequest> parse_http_request(const std::string& head) {
  std::istringstream in(head);
  HttpRequest req;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream first(line);
  std::string version;
  if (!(first >> req.method >> req.path >> version)) return std::nullopt;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(' '));
    req.headers[lower(line.substr(0, colon))] = value;
  }
  return req;
}

inline std::string http_response(int status, std::string_view reason, const std::string& body,
                                 std::string_view content_type = "application/json") {
  std::ostringstream os;
  os << "HTTP/1.1 " << status << ' ' << reason << "\r\nContent-Type: " << content_type
     << "\r\nContent-Length: " << body.size() << "\r\nAccess-Control-Allow-Origin: *\r\nConnection: close\r\n\r\n"
     << body;
  return os.str();
}

/// Answers the read-only metrics endpoints: /sessions and /sessions/<id>.
inline std::string handle_http(const HttpRequest& req, SessionRegistry& registry) {
  if (req.method != "GET") return http_response(405, "Method Not Allowed", R"({"error":"GET only"})");
  std::string path = req.path.substr(0, req.path.find('?'));
  std::lock_guard lock(registry.session_mutex());
  if (path == "/health") return http_response(200, "OK", R"({"ok":true,"v":1})");
  if (path == "/sessions" || path == "/metrics") {
    json list = json::array();
    for (const auto& s : registry.all()) list.push_back(session_summary(*s));
    return http_response(200, "OK", json{{"v", kProtocolVersion}, {"sessions", list}}.dump());
  }
  constexpr std::string_view prefix = "/sessions/";
  if (path.starts_with(prefix)) {
    std::string id = path.substr(prefix.size());
    if (id.ends_with("/metrics")) id.resize(id.size() - std::string_view("/metrics").size());
    if (auto s = registry.find(id)) {
      json body = session_summary(*s);
      body["v"] = kProtocolVersion;
      return http_response(200, "OK", body.dump());
    }
    return http_response(404, "Not Found", R"({"error":"no such session"})");
  }
  return http_response(404, "Not Found", R"({"error":"unknown path"})");
}

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7777;  // 0 picks a free port
  /// Wall-clock seconds per simulated second; 0 ticks as fast as possible.
  double time_scale = 1.0;
  std::function<void(const std::string& session, const json& event)> on_event;
};

class PlayServer {
 public:
  explicit PlayServer(ServerOptions opts) : opts_(std::move(opts)) {}
  ~PlayServer() { stop(); }

  PlayServer(const PlayServer&) = delete;
  PlayServer& operator=(const PlayServer&) = delete;

  /// Binds and listens; returns the bound port.
  std::uint16_t bind_and_listen() {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (getaddrinfo(opts_.host.c_str(), std::to_string(opts_.port).c_str(), &hints, &res) != 0 || !res)
      throw std::runtime_error("play server: cannot resolve " + opts_.host);
    listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    const int rc = ::bind(listen_fd_, res->ai_addr, res->ai_addrlen);
    freeaddrinfo(res);
    if (listen_fd_ < 0 || rc != 0 || ::listen(listen_fd_, 16) != 0)
      throw std::runtime_error("play server: cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    return port_;
  }

  std::uint16_t port() const { return port_; }
  SessionRegistry& registry() { return registry_; }

  /// Accept loop; returns after stop().
  void serve() {
    if (listen_fd_ < 0) bind_and_listen();
    running_ = true;
    while (running_) {
      pollfd p{listen_fd_, POLLIN, 0};
      if (::poll(&p, 1, 100) <= 0) continue;
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      int yes = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
      std::lock_guard lock(threads_mu_);
      threads_.emplace_back([this, fd] {
        try {
          handle_connection(fd);
        } catch (const std::exception&) {
        }
        ::close(fd);
      });
    }
  }

  void start() {
    if (listen_fd_ < 0) bind_and_listen();
    running_ = true;
    accept_thread_ = std::thread([this] { serve(); });
  }

  /// Async-signal-safe: only flips the flag the loops poll.
  void request_stop() { running_ = false; }

  void stop() {
    running_ = false;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> threads;
    {
      std::lock_guard lock(threads_mu_);
      threads.swap(threads_);
    }
    for (auto& t : threads)
      if (t.joinable()) t.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
  }

 private:
  static bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
      const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
      if (n <= 0) return false;
      data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

  void handle_connection(int fd) {
    std::string head;
    char buf[4096];
    while (head.find("\r\n\r\n") == std::string::npos) {
      pollfd p{fd, POLLIN, 0};
      if (!running_ || ::poll(&p, 1, 5000) <= 0) return;
      const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
      if (n <= 0) return;
      head.append(buf, static_cast<std::size_t>(n));
      if (head.size() > 65536) return;
    }
    const std::size_t end = head.find("\r\n\r\n") + 4;
    std::string rest = head.substr(end);
    head.resize(end);
    const auto req = parse_http_request(head);
    if (!req) {
      send_all(fd, http_response(400, "Bad Request", R"({"error":"malformed request"})"));
      return;
    }
    const auto upgrade = req->headers.find("upgrade");
    if (upgrade == req->headers.end() || lower(upgrade->second) != "websocket") {
      send_all(fd, handle_http(*req, registry_));
      return;
    }
    const auto key = req->headers.find("sec-websocket-key");
    if (key == req->headers.end()) {
      send_all(fd, http_response(400, "Bad Request", R"({"error":"missing Sec-WebSocket-Key"})"));
      return;
    }
    send_all(fd, "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                 "Sec-WebSocket-Accept: " + ws::accept_key(key->second) + "\r\n\r\n");
    run_websocket(fd, std::move(rest));
  }

  void run_websocket(int fd, std::string pending) {
    ws::FrameParser parser;
    ws::MessageAssembler assembler;
    parser.feed(pending);
    std::shared_ptr<Session> session;
    std::optional<SessionConfig> last_config;
    auto send_json = [&](const json& j) { return send_all(fd, ws::encode_frame(ws::Opcode::Text, j.dump())); };
    auto send_events = [&](const std::vector<SessionEvent>& events) {
      for (const SessionEvent& e : events) {
        const json j = event_to_json(e, session->id());
        if (opts_.on_event) opts_.on_event(session->id(), j);
        if (!send_json(j)) return false;
      }
      return true;
    };
    auto start_session = [&](SessionConfig cfg) {
      std::lock_guard lock(registry_.session_mutex());
      last_config = cfg;
      session = registry_.create(std::move(cfg));
      return send_events({session->initial_state()});
    };
    auto handle_message = [&](const std::string& text) {
      json msg;
      try {
        msg = json::parse(text);
        const std::string type = msg.at("type").get<std::string>();
        if (type == "start") return start_session(session_config_from_json(msg.value("config", json::object())));
        if (type == "reset") {
          if (!last_config) throw std::invalid_argument("reset before start");
          return start_session(*last_config);
        }
        if (type == "input") {
          if (!session) throw std::invalid_argument("input before start");
          InputCommand cmd;
          const json& d = msg.at("direction");
          if (!d.is_null()) cmd.direction = d.get<int>();
          cmd.ts = msg.value("ts", 0.0);
          std::lock_guard lock(registry_.session_mutex());
          session->apply_input(cmd);
          return true;
        }
        throw std::invalid_argument("unknown message type '" + type + "'");
      } catch (const std::exception& e) {
        return send_json(json{{"type", "error"}, {"v", kProtocolVersion}, {"payload", {{"message", e.what()}}}});
      }
    };

    using clock = std::chrono::steady_clock;
    auto next_tick = clock::now();
    char buf[4096];
    while (running_) {
      int timeout_ms = 50;
      if (session && !session->complete() && opts_.time_scale > 0.0) {
        const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(next_tick - clock::now()).count();
        timeout_ms = static_cast<int>(std::clamp<long long>(wait, 0, 50));
      } else if (session && !session->complete()) {
        timeout_ms = 0;
      }
      pollfd p{fd, POLLIN, 0};
      if (::poll(&p, 1, timeout_ms) > 0) {
        const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) return;
        parser.feed({buf, static_cast<std::size_t>(n)});
        while (auto frame = parser.next()) {
          auto msg = assembler.push(std::move(*frame));
          if (!msg) continue;
          switch (msg->opcode) {
            case ws::Opcode::Close: send_all(fd, ws::encode_frame(ws::Opcode::Close, "")); return;
            case ws::Opcode::Ping: send_all(fd, ws::encode_frame(ws::Opcode::Pong, msg->payload)); break;
            case ws::Opcode::Text:
            case ws::Opcode::Binary:
              if (!handle_message(msg->payload)) return;
              next_tick = std::max(next_tick, clock::now());
              break;
            default: break;
          }
        }
      }
      if (!session || session->complete() || clock::now() < next_tick) continue;
      std::vector<SessionEvent> events;
      {
        std::lock_guard lock(registry_.session_mutex());
        events = session->tick();
      }
      if (!send_events(events)) return;
      next_tick += std::chrono::duration_cast<clock::duration>(
          std::chrono::duration<double>(session->config().loop.dt_exec * opts_.time_scale));
    }
  }

  ServerOptions opts_;
  SessionRegistry registry_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex threads_mu_;
  std::vector<std::thread> threads_;
};

}  // namespace parplay
