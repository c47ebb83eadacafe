#pragma once

#include <memory>
#include <string>
#include <thread>

#include "fedprov/backend.hpp"

namespace httplib {
class Server;
}

namespace fedprov {

/// Serves any Backend over the v3-style REST subset so integration tests and
/// external deployments can talk to the in-memory mock exactly as they would
/// to a real identity service.
class BackendServer {
public:
    explicit BackendServer(Backend& backend, std::string bearer_token = "");
    ~BackendServer();

    /// Binds to host:port (port 0 picks a free port) and serves on a
    /// background thread. Returns the bound port.
    int start(const std::string& host, int port);

    /// Blocking variant for CLI use.
    bool listen(const std::string& host, int port);

    void stop();
    int port() const { return port_; }

private:
    void install_routes();

    Backend& backend_;
    std::string token_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace fedprov
