#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "climbtrace/store.hpp"

namespace climbtrace {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    // Static files for the browser UI, served at "/" when set.
    std::optional<std::filesystem::path> ui_dir;
};

/// Local JSON-over-HTTP API over a ClimbStore.
///
///   GET    /climbs                 summaries, newest first
///   GET    /climbs/{id}            record + report + detail graph
///   POST   /climbs                 import an exported climb file
///   POST   /climbs/{id}/crop       {"at_s": seconds}
///   PATCH  /climbs/{id}            {"title": text}
///   DELETE /climbs/{id}
///   POST   /climbs/{id}/video      {"filename", "fps", "offset_ms"?}
///   GET    /videos/{filename}      video bytes from the store directory
class ReviewService {
public:
    ReviewService(ClimbStore& store, ServiceOptions options);
    ~ReviewService();

    ReviewService(const ReviewService&) = delete;
    ReviewService& operator=(const ReviewService&) = delete;

    // Binds the listening socket; throws Error(InvalidArgument) when the
    // address is unavailable. Returns the bound port.
    int bind();
    // Serves until stop() is called. bind() must have succeeded.
    void run();
    void stop();
    int port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace climbtrace
