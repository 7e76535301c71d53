// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <deque>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "linetrace/cli/teleop.hpp"

namespace linetrace::cli {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

constexpr std::size_t kMaxQueuedFrames = 4;

const char* kFallbackPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>linetrace teleop</title></head>"
    "<body><p>The teleoperation UI is not bundled with this server. Connect a WebSocket client to "
    "<code>/teleop</code>.</p></body></html>";

class Server;

class WsConn : public std::enable_shared_from_this<WsConn> {
 public:
  WsConn(tcp::socket&& socket, Server& server) : ws_(std::move(socket)), server_(server) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsConn::on_accept, shared_from_this()));
  }

  /// Frames are dropped instead of queued behind a slow client.
  void send(std::string msg, bool droppable = false) {
    if (closing_) return;
    if (droppable && outbox_.size() > kMaxQueuedFrames) return;
    outbox_.push_back(std::move(msg));
    if (outbox_.size() == 1) do_write();
  }

  void close_after_send() { close_pending_ = true; }

  void read() { ws_.async_read(buf_, beast::bind_front_handler(&WsConn::on_read, shared_from_this())); }

  void close() {
    if (closing_) return;
    closing_ = true;
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
  }

 private:
  void on_accept(beast::error_code ec);
  void on_read(beast::error_code ec, std::size_t);
  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), beast::bind_front_handler(&WsConn::on_write, shared_from_this()));
  }
  void on_write(beast::error_code ec, std::size_t);

  websocket::stream<beast::tcp_stream> ws_;
  Server& server_;
  beast::flat_buffer buf_;
  std::deque<std::string> outbox_;
  bool close_pending_ = false;
  bool closing_ = false;
};

class HttpConn : public std::enable_shared_from_this<HttpConn> {
 public:
  HttpConn(tcp::socket&& socket, Server& server) : stream_(std::move(socket)), server_(server) {}
  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buf_, req_, beast::bind_front_handler(&HttpConn::on_read, shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t);
  void respond(http::status status, std::string body, const std::string& type) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "linetrace");
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  Server& server_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
};

class Server {
 public:
  Server(net::io_context& ioc, TeleopSession& session, const ServeOptions& options, std::ostream& log)
      : ioc_(ioc), acceptor_(ioc), timer_(ioc), session_(session), options_(options), log_(log) {}

  std::uint16_t listen() {
    const tcp::endpoint ep(net::ip::make_address(options_.address), options_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    accept();
    return acceptor_.local_endpoint().port();
  }

  void stop() {
    beast::error_code ignored;
    acceptor_.close(ignored);
    timer_.cancel();
    if (active_) {
      active_->close();
      finish_session();
    }
  }

  const std::filesystem::path& static_dir() const { return options_.static_dir; }

  void on_ws_open(const std::shared_ptr<WsConn>& conn) {
    if (active_ || !session_.connect()) {
      conn->send(TeleopSession::error_message("busy"));
      conn->close_after_send();
      log_ << "teleop: refused a second client (busy)\n";
      return;
    }
    active_ = conn;
    log_ << "teleop: " << session_.session_id() << " connected\n";
    conn->send(session_.hello());
    conn->read();
    next_tick_ = std::chrono::steady_clock::now();
    schedule_tick();
  }

  void on_ws_message(WsConn* conn, const std::string& text) {
    if (active_.get() != conn) return;
    if (auto err = session_.handle(text)) active_->send(*err);
  }

  void on_ws_closed(WsConn* conn) {
    if (active_.get() != conn) return;
    timer_.cancel();
    finish_session();
  }

 private:
  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<HttpConn>(std::move(socket), *this)->start();
      accept();
    });
  }

  // Absolute deadlines keep the cadence from drifting with frame cost.
  void schedule_tick() {
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(session_.config().camera.frame_period()));
    timer_.expires_at(next_tick_);
    timer_.async_wait([this, period](beast::error_code ec) {
      if (ec || !active_) return;
      auto t = session_.tick(true);
      active_->send(std::move(t.message), true);
      next_tick_ += period;
      const auto now = std::chrono::steady_clock::now();
      if (next_tick_ + period < now) next_tick_ = now;  // fell behind; do not burst
      schedule_tick();
    });
  }

  void finish_session() {
    const std::string id = session_.session_id();
    active_.reset();
    dataset::DemoSet demos = session_.disconnect();
    log_ << "teleop: " << id << " ended, " << demos.size() << " recorded frames\n";
    if (demos.empty()) return;
    const auto path = options_.out_dir / ("teleop_" + id + ".csv");
    try {
      std::filesystem::create_directories(options_.out_dir);
      dataset::write_csv(demos, path);
      log_ << "teleop: wrote " << path.string() << "\n";
    } catch (const std::exception& e) {
      log_ << "teleop: could not write " << path.string() << ": " << e.what() << "\n";
    }
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  net::steady_timer timer_;
  TeleopSession& session_;
  ServeOptions options_;
  std::ostream& log_;
  std::shared_ptr<WsConn> active_;
  std::chrono::steady_clock::time_point next_tick_;
};

void WsConn::on_accept(beast::error_code ec) {
  if (ec) return;
  server_.on_ws_open(shared_from_this());
}

void WsConn::on_read(beast::error_code ec, std::size_t) {
  if (ec) {
    server_.on_ws_closed(this);
    return;
  }
  const std::string text = beast::buffers_to_string(buf_.data());
  buf_.consume(buf_.size());
  server_.on_ws_message(this, text);
  read();
}

void WsConn::on_write(beast::error_code ec, std::size_t) {
  if (ec) {
    server_.on_ws_closed(this);
    return;
  }
  outbox_.pop_front();
  if (!outbox_.empty()) do_write();
  else if (close_pending_) close();
}

std::string content_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

void HttpConn::on_read(beast::error_code ec, std::size_t) {
  if (ec) return;
  const std::string target(req_.target());
  if (websocket::is_upgrade(req_)) {
    if (target != "/teleop") {
      respond(http::status::not_found, "no websocket endpoint at " + target + "\n", "text/plain");
      return;
    }
    beast::get_lowest_layer(stream_).expires_never();
    std::make_shared<WsConn>(stream_.release_socket(), server_)->start(std::move(req_));
    return;
  }
  if (req_.method() != http::verb::get) {
    respond(http::status::method_not_allowed, "GET only\n", "text/plain");
    return;
  }
  std::string rel = target == "/" ? "index.html" : target.substr(1);
  if (rel.find("..") != std::string::npos) {
    respond(http::status::bad_request, "bad path\n", "text/plain");
    return;
  }
  if (!server_.static_dir().empty()) {
    const auto path = server_.static_dir() / rel;
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      respond(http::status::ok, ss.str(), content_type(path));
      return;
    }
  }
  if (rel == "index.html") respond(http::status::ok, kFallbackPage, "text/html");
  else respond(http::status::not_found, "not found\n", "text/plain");
}

}  // namespace

void serve_teleop(TeleopSession& session, const ServeOptions& options, std::ostream& log) {
  net::io_context ioc(1);
  Server server(ioc, session, options, log);
  const std::uint16_t port = server.listen();
  log << "teleop: listening on ws://" << options.address << ":" << port << "/teleop\n";
  if (options.on_listening) options.on_listening(port);

  net::signal_set signals(ioc, SIGINT, SIGTERM);
  signals.async_wait([&](beast::error_code, int) {
    server.stop();
    ioc.stop();
  });
  net::steady_timer deadline(ioc);
  if (options.duration > 0.0) {
    deadline.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(options.duration)));
    deadline.async_wait([&](beast::error_code ec) {
      if (ec) return;
      server.stop();
      ioc.stop();
    });
  }
  ioc.run();
}

}  // namespace linetrace::cli
