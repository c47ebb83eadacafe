#include "fedprov/hook_server.hpp"

#include <httplib.h>

#include "fedprov/error.hpp"

namespace fedprov {

namespace {

void apply(const HookResponse& core_res, httplib::Response& res) {
    res.status = core_res.status;
    if (core_res.is_redirect()) {
        // Byte-for-byte: the middleware resumes the login only at the exact
        // URL it handed us.
        res.set_header("Location", core_res.location);
        return;
    }
    res.set_content(core_res.body, core_res.content_type);
}

}  // namespace

HookServer::HookServer(HookCore& core, const ServiceConfig& config)
    : core_(core), config_(config), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

HookServer::~HookServer() {
    stop();
}

void HookServer::install_routes() {
    auto& srv = *server_;

    srv.Get(config_.hook_path, [this](const httplib::Request& req, httplib::Response& res) {
        HookRequest hook_request;
        if (req.has_param("return")) hook_request.return_url = req.get_param_value("return");
        std::vector<std::pair<std::string, std::string>> entries(req.headers.begin(),
                                                                 req.headers.end());
        hook_request.attributes = attributes_from_entries(entries);
        apply(core_.handle_session_hook(hook_request), res);
    });

    srv.Post(config_.hook_path + "/consent", [this](const httplib::Request& req, httplib::Response& res) {
        ConsentForm form;
        form.decision = req.get_param_value("decision");
        form.return_url = req.get_param_value("return_url");
        form.csrf_token = req.get_param_value("csrf_token");
        apply(core_.handle_consent_decision(form), res);
    });

    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(message, "text/plain");
    });
}

int HookServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else {
        if (!server_->bind_to_port(host, port))
            raise(Errc::ConfigError, "cannot bind " + host + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

bool HookServer::listen() {
    port_ = config_.listen_port;
    return server_->listen(config_.listen_host, config_.listen_port);
}

void HookServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace fedprov
