// SPDX-License-Identifier: Apache-2.0
#include "vf5/server.hpp"

#include <csignal>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "vf5/error.hpp"
#include "vf5/session.hpp"

namespace vf5 {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::uint16_t default_port() {
    if (const char* env = std::getenv("VF5_PORT")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 65535) return static_cast<std::uint16_t>(v);
    }
    return kDefaultPort;
}

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, std::shared_ptr<const FieldSet> fields, const std::filesystem::path& work_dir)
        : ws_(std::move(socket)), session_(std::move(fields), SessionOptions{work_dir}) {}

    void start() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(64 * 1024 * 1024);
        ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        read();
    }

    void read() {
        buffer_.clear();
        ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) return;
        if (ws_.got_text()) {
            outbox_ = {};
            for (auto& m : session_.handle_json(beast::buffers_to_string(buffer_.data()))) outbox_.push_back(std::move(m));
        } else {
            outbox_.push_back(to_wire(ErrorEvent{0, ErrorCode::InvalidParams, "control frames must be text"}));
        }
        write_next();
    }

    void write_next() {
        if (outbox_.empty()) {
            read();
            return;
        }
        const WireMessage& m = outbox_.front();
        ws_.binary(m.binary);
        auto buf = m.binary ? asio::buffer(m.bytes) : asio::buffer(m.text);
        ws_.async_write(buf, beast::bind_front_handler(&Connection::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) return;
        outbox_.pop_front();
        write_next();
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    Session session_;
    std::deque<WireMessage> outbox_;
};

}  // namespace

struct Server::Impl {
    std::shared_ptr<const FieldSet> fields;
    ServerOptions options;
    asio::io_context ioc;
    tcp::acceptor acceptor{ioc};
    asio::signal_set signals{ioc};
    std::vector<std::thread> threads;
    std::uint16_t port = 0;
    bool started = false;

    void accept() {
        acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            try {
                std::make_shared<Connection>(std::move(socket), fields, options.work_dir)->start();
            } catch (const std::exception& e) {
                std::cerr << "vf5: dropping connection: " << e.what() << '\n';
            }
            accept();
        });
    }
};

Server::Server(std::shared_ptr<const FieldSet> fields, ServerOptions options) : impl_(std::make_unique<Impl>()) {
    if (!fields) throw Error(ErrorCode::InvalidArgument, "server needs a dataset");
    impl_->fields = std::move(fields);
    impl_->options = std::move(options);
    if (impl_->options.threads < 1) impl_->options.threads = 1;
}

Server::~Server() { stop(); }

void Server::start() {
    if (impl_->started) return;
    beast::error_code ec;
    const auto addr = asio::ip::make_address(impl_->options.address, ec);
    if (ec) throw Error(ErrorCode::IoError, "bad listen address " + impl_->options.address);
    const tcp::endpoint ep{addr, impl_->options.port};
    auto& acc = impl_->acceptor;
    acc.open(ep.protocol(), ec);
    if (!ec) acc.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acc.bind(ep, ec);
    if (!ec) acc.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot listen on " + impl_->options.address + ":" +
                                            std::to_string(impl_->options.port) + ": " + ec.message());
    }
    impl_->port = acc.local_endpoint().port();
    impl_->started = true;
    impl_->accept();
    if (impl_->options.handle_signals) {
        impl_->signals.add(SIGINT);
        impl_->signals.add(SIGTERM);
        impl_->signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
    }
    for (int i = 0; i < impl_->options.threads; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
}

std::uint16_t Server::port() const { return impl_->port; }

void Server::wait() {
    for (auto& t : impl_->threads)
        if (t.joinable()) t.join();
}

void Server::stop() {
    if (!impl_ || !impl_->started) return;
    impl_->ioc.stop();
    wait();
    // Pending handlers own the connections; dropping the io_context closes
    // their sockets so clients see the server go away.
    auto fresh = std::make_unique<Impl>();
    fresh->fields = std::move(impl_->fields);
    fresh->options = std::move(impl_->options);
    impl_ = std::move(fresh);
}

}  // namespace vf5
