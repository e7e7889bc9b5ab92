#pragma once

#include <memory>
#include <string>

#include "quintel/engine.hpp"

namespace quintel::app {

/// JSON rendering of a source profile, shared by the CLI and the service.
std::string profile_json(const sources::SourceProfile& profile);

/// HTTP front end over a shared Engine. Writes (POST /reports, POST /feedback)
/// are serialized through one writer lock; queries run under a shared lock on
/// the same state snapshot the CLI sees.
class Service {
public:
    explicit Service(Engine& engine);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves until stop(); returns false if the bind fails.
    bool listen(const std::string& host, int port);

    /// Test hook: bind to an ephemeral port, return it (-1 on failure).
    int bind_any(const std::string& host);
    bool listen_after_bind();

    void stop();
    bool is_running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace quintel::app
