#pragma once
// HTTP + WebSocket front end for PlaygroundService.
//
// GET /ws upgrades to a WebSocket; every text frame is one client message and
// gets exactly one reply frame. Any other GET serves a file from the static
// directory (or a small built-in page when none is configured).

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>

#include "curvesel/harness.hpp"
#include "curvesel/io.hpp"
#include "curvesel/service.hpp"

namespace curvesel::serve {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

inline constexpr const char* kFallbackPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>curvesel playground</title></head>"
    "<body><h1>curvesel playground service</h1>"
    "<p>Connect a WebSocket client to <code>/ws</code> and send JSON messages "
    "(<code>new_session</code>, <code>set_pose</code>, <code>event</code>, <code>set_paradigm</code>).</p>"
    "</body></html>\n";

inline std::string mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket socket, PlaygroundService& service) : ws_(std::move(socket)), service_(service) {}

    void start(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (!ec) {
                self->read();
            }
        });
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                return;
            }
            self->reply_ = self->service_.handle_text(beast::buffers_to_string(self->buffer_.data()));
            self->buffer_.consume(self->buffer_.size());
            self->ws_.text(true);
            self->ws_.async_write(asio::buffer(self->reply_), [self](beast::error_code wec, std::size_t) {
                if (!wec) {
                    self->read();
                }
            });
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    PlaygroundService& service_;
    beast::flat_buffer buffer_;
    std::string reply_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, PlaygroundService& service, std::string static_dir)
        : stream_(std::move(socket)), service_(service), static_dir_(std::move(static_dir)) {}

    void start() { read(); }

private:
    void read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (!ec) {
                self->dispatch();
            }
        });
    }

    void dispatch() {
        if (websocket::is_upgrade(req_)) {
            if (req_.target() == "/ws") {
                stream_.expires_never();
                std::make_shared<WsSession>(stream_.release_socket(), service_)->start(std::move(req_));
                return;
            }
            respond(http::status::not_found, "text/plain", "no such endpoint\n");
            return;
        }
        if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
            respond(http::status::bad_request, "text/plain", "unsupported method\n");
            return;
        }
        std::string target(req_.target());
        if (const auto q = target.find('?'); q != std::string::npos) {
            target.resize(q);
        }
        if (target.empty() || target.back() == '/') {
            target += "index.html";
        }
        if (target.find("..") != std::string::npos) {
            respond(http::status::bad_request, "text/plain", "bad path\n");
            return;
        }
        if (static_dir_.empty()) {
            if (target == "/index.html") {
                respond(http::status::ok, "text/html", kFallbackPage);
            } else {
                respond(http::status::not_found, "text/plain", "not found\n");
            }
            return;
        }
        const std::filesystem::path path = std::filesystem::path(static_dir_) / target.substr(1);
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            respond(http::status::not_found, "text/plain", "not found\n");
            return;
        }
        respond(http::status::ok, mime_type(path), read_file(path.string()));
    }

    void respond(http::status status, const std::string& type, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
        res->set(http::field::server, "curvesel");
        res->set(http::field::content_type, type);
        res->keep_alive(req_.keep_alive());
        res->body() = std::move(body);
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec || !res->keep_alive()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->read();
        });
    }

    beast::tcp_stream stream_;
    PlaygroundService& service_;
    std::string static_dir_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

/// Owns the listening socket; run() blocks until stop().
class PlaygroundServer {
public:
    PlaygroundServer(ServiceConfig config, std::string static_dir)
        : service_(std::move(config)), static_dir_(std::move(static_dir)), acceptor_(ioc_) {}

    /// Binds 127.0.0.1:port (0 = ephemeral). False if the port is taken.
    bool bind(std::uint16_t port, beast::error_code& ec) {
        const tcp::endpoint ep(asio::ip::make_address("127.0.0.1"), port);
        acceptor_.open(ep.protocol(), ec);
        if (ec) return false;
        acceptor_.bind(ep, ec);
        if (ec) return false;
        acceptor_.listen(asio::socket_base::max_listen_connections, ec);
        return !ec;
    }

    std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

    void run(std::size_t threads = 2) {
        accept();
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < threads; ++i) {
            pool.emplace_back([this] { ioc_.run(); });
        }
        ioc_.run();
    }

    void stop() {
        asio::post(ioc_, [this] {
            beast::error_code ignored;
            acceptor_.close(ignored);
            ioc_.stop();
        });
    }

    asio::io_context& context() { return ioc_; }
    PlaygroundService& service() { return service_; }

private:
    void accept() {
        acceptor_.async_accept(asio::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            std::make_shared<HttpSession>(std::move(socket), service_, static_dir_)->start();
            accept();
        });
    }

    PlaygroundService service_;
    std::string static_dir_;
    asio::io_context ioc_;
    tcp::acceptor acceptor_;
};

/// Validates the config before binding; exits 0 on SIGINT / SIGTERM.
inline int cmd_serve(const std::string& config_path, std::optional<std::uint16_t> port_override,
                     std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    try {
        rc = load_run_config(config_path);
        apply_seed_override(rc, seed);
        validate(rc.block.scene);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    const std::uint16_t port = port_override.value_or(rc.port);
    PlaygroundServer server(service_config_from(rc.block), rc.static_dir);
    beast::error_code ec;
    if (!server.bind(port, ec)) {
        err << "cannot bind 127.0.0.1:" << port << ": " << ec.message() << '\n';
        return kExitPortBusy;
    }
    asio::signal_set signals(server.context(), SIGINT, SIGTERM);
    signals.async_wait([&](beast::error_code, int) {
        server.service().close_all();
        server.stop();
    });
    out << "serving on http://127.0.0.1:" << server.port() << " (WebSocket at /ws)" << std::endl;
    server.run();
    out << "shut down; sessions closed" << std::endl;
    return kExitOk;
}

}  // namespace curvesel::serve
