#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "clutter/simworld.hpp"
#include "json.hpp"

namespace clutter::mcp {

inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;

/// One connection: a scene plus the id monotonicity watermark.
struct Session {
    world::SceneState scene;
    std::optional<std::int64_t> last_id;
};

/// Process one newline-framed JSON message and return the response line
/// (including the trailing newline). Never throws; protocol violations
/// become JSON-RPC error responses.
std::string handle_message(Session& session, const std::string& line);

struct ServeOptions {
    std::string transport = "stdio";  // "stdio" or "tcp"
    int port = 7077;
    std::string snapshot_path;        // final scene written here on close
};

/// Scene snapshot: scenario-shaped JSON plus hand state.
nlohmann::json scene_snapshot(const world::SceneState& scene);

/// Run until EOF (stdio) or until the listening socket is closed (tcp).
/// Each connection gets an independent session seeded from `initial`.
void serve(const world::SceneState& initial, const ServeOptions& options);

}  // namespace clutter::mcp
