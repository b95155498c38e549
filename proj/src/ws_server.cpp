#include "otmerge/ws_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <csignal>
#include <deque>
#include <future>
#include <map>

#include "otmerge/wire.hpp"

namespace otm {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Session;

}  // namespace

struct WsServer::Impl {
  explicit Impl(Hub h) : hub(std::move(h)), acceptor(ioc) {}

  void accept();
  void dispatch(std::vector<Outgoing> out);
  void on_frame(ConnId conn, const std::string& frame) { dispatch(hub.handle_frame(conn, frame)); }
  void on_closed(ConnId conn) {
    sessions.erase(conn);
    hub.disconnect(conn);
  }

  asio::io_context ioc{1};
  Hub hub;
  tcp::acceptor acceptor;
  std::map<ConnId, std::shared_ptr<Session>> sessions;
  ConnId next_conn = 1;
};

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, WsServer::Impl& server, ConnId id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  void start() {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void send(std::string frame, bool close_after) {
    if (closing_) return;
    queue_.push_back(std::move(frame));
    if (close_after) closing_ = true;
    if (queue_.size() == 1) write_next();
  }

  void shutdown() {
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

 private:
  void on_request(beast::error_code ec) {
    if (ec) return finish();
    if (!websocket::is_upgrade(request_) || request_.target() != "/ws") {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "collaboration endpoint is /ws\n";
      res->prepare_payload();
      http::async_write(ws_.next_layer(), *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
        self->shutdown();
        self->finish();
      });
      return;
    }
    ws_.text(true);
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec2) {
      if (ec2) return self->finish();
      self->read_next();
    });
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      std::string frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.on_frame(self->id_, frame);
      if (!self->closing_) self->read_next();
    });
  }

  void write_next() {
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->queue_.pop_front();
      if (!self->queue_.empty()) return self->write_next();
      if (self->closing_) {
        self->ws_.async_close(websocket::close_code::policy_error,
                              [self](beast::error_code) { self->finish(); });
      }
    });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    server_.on_closed(id_);
  }

  websocket::stream<tcp::socket> ws_;
  WsServer::Impl& server_;
  ConnId id_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::string> queue_;
  bool closing_ = false;
  bool finished_ = false;
};

}  // namespace

void WsServer::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec == asio::error::operation_aborted) return;
    if (!ec) {
      const ConnId id = next_conn++;
      auto session = std::make_shared<Session>(std::move(socket), *this, id);
      sessions.emplace(id, session);
      session->start();
    }
    accept();
  });
}

void WsServer::Impl::dispatch(std::vector<Outgoing> out) {
  for (Outgoing& o : out) {
    auto it = sessions.find(o.conn);
    if (it == sessions.end()) continue;
    // Keep the session alive even if sending triggers its removal.
    std::shared_ptr<Session> s = it->second;
    s->send(wire::encode(o.msg), o.close_after);
  }
}

WsServer::WsServer(Hub hub, std::uint16_t port, const std::string& address)
    : impl_(std::make_unique<Impl>(std::move(hub))) {
  const tcp::endpoint endpoint(asio::ip::make_address(address), port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
  impl_->accept();
}

WsServer::~WsServer() { stop(); }

std::uint16_t WsServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WsServer::run() { impl_->ioc.run(); }

void WsServer::run_until_interrupted() {
  asio::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([this](beast::error_code ec, int) {
    if (ec) return;
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
    for (auto& [id, s] : impl_->sessions) s->shutdown();
    impl_->ioc.stop();
  });
  impl_->ioc.run();
}

void WsServer::start() {
  thread_ = std::thread([this] { impl_->ioc.run(); });
}

void WsServer::stop() {
  if (!impl_->ioc.stopped()) {
    asio::post(impl_->ioc, [this] {
      beast::error_code ec;
      impl_->acceptor.close(ec);
      for (auto& [id, s] : impl_->sessions) s->shutdown();
      impl_->ioc.stop();
    });
  }
  if (thread_.joinable()) thread_.join();
}

void WsServer::inspect(const std::function<void(const Hub&)>& fn) {
  if (impl_->ioc.stopped() || !thread_.joinable()) {
    fn(impl_->hub);
    return;
  }
  std::promise<void> done;
  asio::post(impl_->ioc, [&] {
    fn(impl_->hub);
    done.set_value();
  });
  done.get_future().wait();
}

Doc WsServer::doc() {
  Doc out;
  inspect([&](const Hub& h) { out = h.doc(); });
  return out;
}

}  // namespace otm
