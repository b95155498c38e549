#include "otmerge/ws_client.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <stdexcept>
#include <thread>

#include "otmerge/wire.hpp"

namespace otm {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct WsConnection::Impl : std::enable_shared_from_this<Impl> {
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  beast::flat_buffer buffer;
  std::deque<std::string> writes;
  std::thread io_thread;

  mutable std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> frames;
  bool gone = false;

  void read_next() {
    ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      std::lock_guard<std::mutex> lock(self->mu);
      if (ec) {
        self->gone = true;
        self->cv.notify_all();
        return;
      }
      self->frames.push_back(beast::buffers_to_string(self->buffer.data()));
      self->buffer.consume(self->buffer.size());
      self->cv.notify_all();
      asio::post(self->ioc, [self] { self->read_next(); });
    });
  }

  void write_next() {
    ws.async_write(asio::buffer(writes.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        std::lock_guard<std::mutex> lock(self->mu);
        self->gone = true;
        self->cv.notify_all();
        return;
      }
      self->writes.pop_front();
      if (!self->writes.empty()) self->write_next();
    });
  }
};

WsConnection::WsConnection(const std::string& host, std::uint16_t port, const std::string& path)
    : impl_(std::make_shared<Impl>()) {
  tcp::resolver resolver(impl_->ioc);
  auto results = resolver.resolve(host, std::to_string(port));
  asio::connect(impl_->ws.next_layer(), results.begin(), results.end());
  impl_->ws.next_layer().set_option(tcp::no_delay(true));
  impl_->ws.handshake(host + ":" + std::to_string(port), path);
  impl_->ws.text(true);
  impl_->read_next();
  impl_->io_thread = std::thread([impl = impl_] { impl->ioc.run(); });
}

WsConnection::~WsConnection() {
  close();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
}

void WsConnection::send(std::string frame) {
  asio::post(impl_->ioc, [impl = impl_, frame = std::move(frame)]() mutable {
    impl->writes.push_back(std::move(frame));
    if (impl->writes.size() == 1) impl->write_next();
  });
}

std::string WsConnection::receive(std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(impl_->mu);
  if (!impl_->cv.wait_for(lock, timeout, [&] { return !impl_->frames.empty() || impl_->gone; })) {
    throw std::runtime_error("timed out waiting for a frame");
  }
  if (impl_->frames.empty()) throw std::runtime_error("connection closed");
  std::string f = std::move(impl_->frames.front());
  impl_->frames.pop_front();
  return f;
}

std::optional<std::string> WsConnection::try_receive() {
  std::lock_guard<std::mutex> lock(impl_->mu);
  if (impl_->frames.empty()) return std::nullopt;
  std::string f = std::move(impl_->frames.front());
  impl_->frames.pop_front();
  return f;
}

bool WsConnection::closed() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->gone;
}

void WsConnection::close() {
  asio::post(impl_->ioc, [impl = impl_] {
    beast::error_code ec;
    impl->ws.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    impl->ws.next_layer().close(ec);
  });
}

// ---------------------------------------------------------------------------

ScriptedClient::ScriptedClient(const std::string& host, std::uint16_t port, ClientId id, Delivery delivery)
    : conn_(host, port), replica_(std::move(id), delivery) {}

void ScriptedClient::join() {
  conn_.send(wire::encode(replica_.join_request()));
  wire::Msg first = wire::decode(conn_.receive());
  replica_.receive(first);
}

void ScriptedClient::fill(bool block) {
  auto take = [&](std::string frame) {
    wire::Msg m = wire::decode(frame);
    if (replica_.is_reply(m)) ++replies_queued_;
    inbox_.push_back(std::move(m));
  };
  if (block) take(conn_.receive());
  while (auto f = conn_.try_receive()) take(std::move(*f));
}

void ScriptedClient::await_replies() {
  fill(false);
  while (replies_queued_ < replica_.outstanding()) fill(true);
}

std::size_t ScriptedClient::pump() {
  fill(false);
  std::size_t n = 0;
  while (!inbox_.empty()) {
    wire::Msg m = std::move(inbox_.front());
    inbox_.pop_front();
    if (replica_.is_reply(m)) --replies_queued_;
    replica_.receive(m);
    ++n;
  }
  return n;
}

void ScriptedClient::flush() {
  conn_.send(wire::encode(replica_.put_request()));
  await_replies();
}

void ScriptedClient::get() {
  conn_.send(wire::encode(replica_.get_request()));
  await_replies();
  pump();
}

}  // namespace otm
