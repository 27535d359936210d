#pragma once

#include <functional>
#include <memory>
#include <string>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "aps/error.hpp"
#include "aps/query.hpp"
#include "aps/workspace.hpp"

namespace aps {

/// HTTP/JSON facade over a Workspace. All endpoints live under /api/v1; errors
/// are `{code, message}` bodies.
class Service {
public:
    explicit Service(std::shared_ptr<Workspace> ws) : ws_(std::move(ws)) { mount(); }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    httplib::Server& server() { return server_; }
    Workspace& workspace() { return *ws_; }

    /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port) {
        const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (bound < 0) fail(errc::bind_failure, fmt::format("cannot bind {}:{}", host, port));
        return bound;
    }

    /// Blocks serving requests until stop().
    void run() { server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    using Handler = std::function<Rendered(const Snapshot&, const QueryParams&)>;

    static QueryParams params(const httplib::Request& req) {
        QueryParams q;
        for (const auto& [k, v] : req.params) q.set(k, v);
        return q;
    }

    static void send_error(httplib::Response& res, const Error& e) {
        res.status = http_status_for(e.code());
        res.set_content(render::error_json(e), "application/json");
    }

    template <typename Fn>
    static void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const nlohmann::json::exception& e) {
            send_error(res, Error(std::string(errc::invalid_argument), fmt::format("bad JSON body: {}", e.what())));
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(render::dump({{"code", "internal"}, {"message", e.what()}}), "application/json");
        }
    }

    void get(const std::string& path, Handler handler) {
        server_.Get(path, [this, handler, path](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto snap = ws_->snapshot();
                const Rendered out = handler(*snap, params(req));
                res.set_content(out.body, out.content_type());
                if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
                    res.set_header("Content-Disposition", "attachment; filename=\"metadata.csv\"");
            });
        });
    }

    void mount() {
        get("/api/v1/datasets", render::datasets);
        get("/api/v1/algorithms", render::algorithms);
        get("/api/v1/aps/projection", render::projection);
        get("/api/v1/aps/difficulty", render::difficulty);
        get("/api/v1/aps/distances", render::distances);
        get("/api/v1/aps/select", render::select);
        get("/api/v1/compare", render::compare);
        get("/api/v1/export/metadata.csv", [](const Snapshot& s, const QueryParams& q) {
            return render::export_metadata(s, q);
        });
        get("/api/v1/selections", [](const Snapshot& s, const QueryParams&) { return render::selections(s); });
        server_.Get(R"(/api/v1/selections/([A-Za-z0-9_.\-]+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            const auto out = render::selection(*ws_->snapshot(), req.matches[1].str());
                            res.set_content(out.body, out.content_type());
                        });
                    });

        server_.Post("/api/v1/ingest/results", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto q = params(req);
                const auto name = q.require("name");
                ws_->ingest_results(name, req.body);
                const auto& stored = ws_->snapshot()->registry().result_sets.at(name);
                res.status = 201;
                res.set_content(render::dump({{"name", name}, {"records", stored.results.size()}}), "application/json");
            });
        });

        server_.Post("/api/v1/ingest/dataset", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto q = params(req);
                const auto k = q.integer("prune_k", 5);
                const auto threshold = q.integer("coldstart_threshold", 10);
                if (k < 1 || k > 1'000'000) fail(errc::invalid_argument, "prune_k must be >= 1");
                if (threshold < 1 || threshold > 1'000'000'000) fail(errc::invalid_argument, "coldstart_threshold must be >= 1");
                const auto meta = ws_->ingest_dataset(q.require("name"), req.body, PruneConfig{static_cast<int>(k)},
                                                      static_cast<int>(threshold));
                res.status = 201;
                res.set_content(render::dump(nlohmann::json(meta)), "application/json");
            });
        });

        server_.Post("/api/v1/selections", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = nlohmann::json::parse(req.body);
                Selection sel;
                sel.name = body.at("name").get<std::string>();
                sel.dataset_ids = body.at("dataset_ids").get<std::vector<std::string>>();
                if (body.contains("note") && !body["note"].is_null()) sel.note = body["note"].get<std::string>();
                const bool overwrite = body.value("overwrite", false) || params(req).get("overwrite") == "true";
                const auto saved = ws_->save_selection(std::move(sel), overwrite);
                res.status = 201;
                res.set_content(render::dump(nlohmann::json(saved)), "application/json");
            });
        });

        server_.Delete(R"(/api/v1/selections/([A-Za-z0-9_.\-]+))",
                       [this](const httplib::Request& req, httplib::Response& res) {
                           guarded(res, [&] {
                               ws_->delete_selection(req.matches[1].str());
                               res.status = 204;
                           });
                       });

        server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            const char* code = res.status == 404 ? "not_found" : "bad_request";
            res.set_content(render::dump({{"code", code}, {"message", httplib::status_message(res.status)}}),
                            "application/json");
            return httplib::Server::HandlerResponse::Handled;
        });
    }

    std::shared_ptr<Workspace> ws_;
    httplib::Server server_;
};

} // namespace aps
