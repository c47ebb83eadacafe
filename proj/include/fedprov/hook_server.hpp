#pragma once

#include <memory>
#include <string>
#include <thread>

#include "fedprov/hook_core.hpp"

namespace httplib {
class Server;
}

namespace fedprov {

/// HTTP front of the session-hook service.
///
///   GET  <hook_path>?return=<url>   attributes in X-Fed-Attr-* headers
///   POST <hook_path>/consent        form fields decision, return_url, csrf_token
///
/// The middleware deployment on the same host maps its environment variables
/// onto the X-Fed-Attr-* entries; the harness speaks this form natively.
class HookServer {
public:
    explicit HookServer(HookCore& core, const ServiceConfig& config);
    ~HookServer();

    int start(const std::string& host, int port);  // background thread, returns bound port
    bool listen();                                 // blocking, uses config listen address
    void stop();
    int port() const { return port_; }

private:
    void install_routes();

    HookCore& core_;
    const ServiceConfig& config_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace fedprov
