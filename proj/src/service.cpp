#include "climbtrace/service.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <httplib.h>

#include "climbtrace/error.hpp"
#include "climbtrace/graph.hpp"
#include "climbtrace/report.hpp"

namespace climbtrace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr int kDetailGraphHeight = 200;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownClimb: return 404;
    case ErrorCode::MalformedClimbFile:
    case ErrorCode::UnsupportedSchemaVersion: return 409;
    case ErrorCode::StorageReadFailure:
    case ErrorCode::StorageWriteFailure: return 500;
    default: return 400;
    }
}

void send_error(httplib::Response& res, const Error& e) {
    send_json(res, status_for(e.code()),
              {{"error", std::string(to_string(e.code()))}, {"message", e.what()}});
}

json parse_body(const httplib::Request& req) {
    try {
        json body = json::parse(req.body);
        if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "body must be an object");
        return body;
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument, "body is not valid JSON");
    }
}

bool is_loopback_origin(const std::string& origin) {
    for (const char* prefix : {"http://localhost", "http://127.0.0.1", "http://[::1]"}) {
        if (origin.starts_with(prefix)) {
            const char next = origin.size() > std::strlen(prefix) ? origin[std::strlen(prefix)] : '\0';
            if (next == '\0' || next == ':' || next == '/') return true;
        }
    }
    return false;
}

bool is_plain_filename(const std::string& name) {
    return !name.empty() && name.front() != '.' && name.find('/') == std::string::npos &&
           name.find('\\') == std::string::npos;
}

std::string video_content_type(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".mp4" || ext == ".m4v") return "video/mp4";
    if (ext == ".webm") return "video/webm";
    if (ext == ".mov") return "video/quicktime";
    if (ext == ".mkv") return "video/x-matroska";
    return "application/octet-stream";
}

// Wraps a handler so library errors become JSON error responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const std::exception& e) {
            send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
        }
    };
}

}  // namespace

struct ReviewService::Impl {
    ClimbStore& store;
    ServiceOptions options;
    httplib::Server server;

    Impl(ClimbStore& s, ServiceOptions o) : store(s), options(std::move(o)) {
        // No SO_REUSEPORT: a port already in use must fail to bind.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
                       sizeof(yes));
        });
        routes();
    }

    void routes() {
        server.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
            const std::string origin = req.get_header_value("Origin");
            if (!origin.empty() && is_loopback_origin(origin)) {
                res.set_header("Access-Control-Allow-Origin", origin);
                res.set_header("Vary", "Origin");
                res.set_header("Access-Control-Expose-Headers", "Content-Range, Accept-Ranges");
            }
        });
        server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.status = 204;
            res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type, Range");
        });

        server.Get("/climbs", guarded([this](const httplib::Request&, httplib::Response& res) {
            json list = json::array();
            for (const ClimbRecord& r : *store.snapshot()) list.push_back(summary_json(r));
            send_json(res, 200, list);
        }));

        server.Get(R"(/climbs/([^/]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const ClimbRecord record = store.get(req.matches[1].str());
                       const GraphSpec graph =
                           layout(record.trace, GraphMode::Detail, {1, kDetailGraphHeight});
                       send_json(res, 200,
                                 {{"record", record_json(record)},
                                  {"summary", summary_json(record)},
                                  {"report", report_json(analyze(record))},
                                  {"graph", to_json(graph)}});
                   }));

        server.Post("/climbs", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const ImportResult result = store.import_climb(req.body);
            send_json(res, result.created ? 201 : 200, summary_json(result.record));
        }));

        server.Post(R"(/climbs/([^/]+)/crop)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        if (!body.contains("at_s") || !body["at_s"].is_number()) {
                            throw Error(ErrorCode::InvalidArgument, "at_s must be a number");
                        }
                        const std::string previous = store.resolve(req.matches[1].str());
                        const ClimbRecord record = store.crop(previous, body["at_s"].get<double>());
                        json out = summary_json(record);
                        out["previous_id"] = previous;
                        send_json(res, 200, out);
                    }));

        server.Patch(R"(/climbs/([^/]+))",
                     guarded([this](const httplib::Request& req, httplib::Response& res) {
                         const json body = parse_body(req);
                         if (!body.contains("title") || !body["title"].is_string()) {
                             throw Error(ErrorCode::InvalidArgument, "title must be a string");
                         }
                         const ClimbRecord record =
                             store.rename(req.matches[1].str(), body["title"].get<std::string>());
                         send_json(res, 200, summary_json(record));
                     }));

        server.Delete(R"(/climbs/([^/]+))",
                      guarded([this](const httplib::Request& req, httplib::Response& res) {
                          store.remove(req.matches[1].str());
                          res.status = 204;
                      }));

        server.Post(R"(/climbs/([^/]+)/video)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        if (!body.contains("filename") || !body["filename"].is_string() ||
                            !is_plain_filename(body["filename"].get<std::string>())) {
                            throw Error(ErrorCode::InvalidArgument,
                                        "filename must be a plain file name");
                        }
                        if (!body.contains("fps") || !body["fps"].is_number()) {
                            throw Error(ErrorCode::InvalidArgument, "fps must be a number");
                        }
                        std::optional<std::int64_t> offset;
                        if (body.contains("offset_ms") && !body["offset_ms"].is_null()) {
                            if (!body["offset_ms"].is_number_integer()) {
                                throw Error(ErrorCode::InvalidArgument,
                                            "offset_ms must be an integer");
                            }
                            offset = body["offset_ms"].get<std::int64_t>();
                        }
                        const ClimbRecord record =
                            attach_video(store, req.matches[1].str(),
                                         body["filename"].get<std::string>(),
                                         body["fps"].get<double>(), offset);
                        json out = video_json(*record.video);
                        out["id"] = record.id;
                        send_json(res, 200, out);
                    }));

        server.Get(R"(/videos/([^/]+))",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const std::string name = req.matches[1].str();
                       const fs::path path = store.dir() / name;
                       std::error_code ec;
                       if (!is_plain_filename(name) || !fs::is_regular_file(path, ec)) {
                           send_json(res, 404, {{"error", "NotFound"}, {"message", name}});
                           return;
                       }
                       const auto size = static_cast<std::size_t>(fs::file_size(path, ec));
                       res.set_header("Accept-Ranges", "bytes");
                       res.set_content_provider(
                           size, video_content_type(path),
                           [path](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                               std::ifstream in(path, std::ios::binary);
                               in.seekg(static_cast<std::streamoff>(offset));
                               std::vector<char> buf(std::min<std::size_t>(length, 1 << 16));
                               in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
                               const auto got = static_cast<std::size_t>(in.gcount());
                               if (got == 0) return false;
                               sink.write(buf.data(), got);
                               return true;
                           });
                   }));

        if (options.ui_dir) server.set_mount_point("/", options.ui_dir->string());
    }
};

ReviewService::ReviewService(ClimbStore& store, ServiceOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

ReviewService::~ReviewService() { stop(); }

int ReviewService::bind() {
    const auto& opts = impl_->options;
    if (opts.port == 0) {
        port_ = impl_->server.bind_to_any_port(opts.host);
        if (port_ <= 0) {
            throw Error(ErrorCode::InvalidArgument, "cannot bind " + opts.host);
        }
    } else {
        if (!impl_->server.bind_to_port(opts.host, opts.port)) {
            throw Error(ErrorCode::InvalidArgument,
                        "cannot bind " + opts.host + ":" + std::to_string(opts.port));
        }
        port_ = opts.port;
    }
    return port_;
}

void ReviewService::run() { impl_->server.listen_after_bind(); }

void ReviewService::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace climbtrace
