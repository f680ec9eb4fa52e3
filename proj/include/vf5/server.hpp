// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "vf5/field.hpp"

namespace vf5 {

inline constexpr std::uint16_t kDefaultPort = 8765;

/// VF5_PORT when set to a valid port number, kDefaultPort otherwise.
std::uint16_t default_port();

struct ServerOptions {
    std::string address = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks an ephemeral port
    int threads = 2;
    std::filesystem::path work_dir = ".";
    /// SIGINT and SIGTERM stop the server.
    bool handle_signals = false;
};

/// Websocket endpoint. Each connection owns one Session; text frames are
/// control messages, binary frames carry geometry. Commands on one connection
/// run in order.
class Server {
public:
    Server(std::shared_ptr<const FieldSet> fields, ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts the worker threads. Throws IoError when binding fails.
    void start();
    /// Bound port; valid after start().
    std::uint16_t port() const;
    /// Blocks until the server stops (a handled signal). Do not call
    /// concurrently with stop().
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vf5
