#include "clutter/mcpserv.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include "clutter/skills.hpp"

namespace clutter::mcp {

namespace {

std::string error_response(const nlohmann::json& id, int code, const std::string& message) {
    nlohmann::json res = {{"id", id}, {"error", {{"code", code}, {"message", message}}}};
    return res.dump() + "\n";
}

std::string result_response(const nlohmann::json& id, nlohmann::json result) {
    nlohmann::json res = {{"id", id}, {"result", std::move(result)}};
    return res.dump() + "\n";
}

}  // namespace

std::string handle_message(Session& session, const std::string& line) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        return error_response(nullptr, kParseError, std::string("parse error: ") + e.what());
    }
    if (!doc.is_object())
        return error_response(nullptr, kInvalidRequest, "request must be an object");

    nlohmann::json id = doc.value("id", nlohmann::json{});
    if (!id.is_number_integer())
        return error_response(nullptr, kInvalidRequest, "missing integer id");
    std::int64_t id_value = id.get<std::int64_t>();
    if (session.last_id && id_value <= *session.last_id)
        return error_response(id, kInvalidRequest, "ids must be strictly increasing");
    session.last_id = id_value;

    if (!doc.contains("method") || !doc["method"].is_string())
        return error_response(id, kInvalidRequest, "missing method");
    std::string method = doc["method"].get<std::string>();

    if (method == "tools/list")
        return result_response(id, {{"tools", skills::tool_manifest()}});

    if (method != "tools/call")
        return error_response(id, kMethodNotFound, "unknown method: " + method);

    nlohmann::json params = doc.value("params", nlohmann::json::object());
    if (!params.is_object() || !params.contains("name") || !params["name"].is_string())
        return error_response(id, kInvalidParams, "params must carry a tool name");
    std::string name = params["name"].get<std::string>();
    nlohmann::json arguments = params.value("arguments", nlohmann::json::object());

    auto names = skills::tool_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        return error_response(id, kMethodNotFound, "unknown tool: " + name);
    if (auto err = skills::validate_args(name, arguments))
        return error_response(id, kInvalidParams, *err);

    try {
        auto outcome = skills::execute(session.scene, {name, arguments});
        session.scene = std::move(outcome.scene);
        return result_response(id, outcome.result.to_json());
    } catch (const std::exception& e) {
        // defensive: execute() validated already, so this is unexpected
        return error_response(id, kInvalidParams, e.what());
    }
}

nlohmann::json scene_snapshot(const world::SceneState& scene) {
    nlohmann::json target, obstacles = nlohmann::json::array();
    for (const auto& o : scene.objects) {
        nlohmann::json entry = {{"name", o.id},
                                {"x", o.pose.position.x},
                                {"y", o.pose.position.y},
                                {"theta", o.pose.yaw}};
        if (o.is_target)
            target = entry;
        else
            obstacles.push_back(entry);
    }
    nlohmann::json joints = nlohmann::json::array();
    for (double q : scene.hand.finger_joints) joints.push_back(q);
    return {{"schema_version", "1"},
            {"seed", 0},
            {"level", static_cast<int>(obstacles.size()) / 2},
            {"target", target},
            {"obstacles", obstacles},
            {"hand",
             {{"x", scene.hand.tcp_pose.position.x},
              {"y", scene.hand.tcp_pose.position.y},
              {"z", scene.hand.tcp_pose.position.z},
              {"roll", scene.hand.tcp_pose.roll},
              {"pitch", scene.hand.tcp_pose.pitch},
              {"yaw", scene.hand.tcp_pose.yaw},
              {"joints", joints}}}};
}

namespace {

void persist_snapshot(const world::SceneState& scene, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << scene_snapshot(scene).dump(2) << "\n";
}

void serve_stdio(const world::SceneState& initial, const ServeOptions& options) {
    Session session{initial, std::nullopt};
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        std::cout << handle_message(session, line) << std::flush;
    }
    persist_snapshot(session.scene, options.snapshot_path);
}

void serve_connection(int fd, world::SceneState initial, std::string snapshot_path) {
    Session session{std::move(initial), std::nullopt};
    std::string buffer;
    char chunk[4096];
    for (;;) {
        ssize_t n = ::read(fd, chunk, sizeof chunk);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (line.empty()) continue;
            std::string response = handle_message(session, line);
            if (::write(fd, response.data(), response.size()) < 0) break;
        }
    }
    ::close(fd);
    persist_snapshot(session.scene, snapshot_path);
}

void serve_tcp(const world::SceneState& initial, const ServeOptions& options) {
    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw std::runtime_error("serve: socket() failed");
    int yes = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(options.port));
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(listener);
        throw std::runtime_error("serve: bind() failed on port " + std::to_string(options.port));
    }
    if (::listen(listener, 8) < 0) {
        ::close(listener);
        throw std::runtime_error("serve: listen() failed");
    }
    std::vector<std::thread> workers;
    for (;;) {
        int fd = ::accept(listener, nullptr, nullptr);
        if (fd < 0) break;
        workers.emplace_back(serve_connection, fd, initial, options.snapshot_path);
    }
    for (auto& w : workers) w.join();
    ::close(listener);
}

}  // namespace

void serve(const world::SceneState& initial, const ServeOptions& options) {
    if (options.transport == "stdio")
        serve_stdio(initial, options);
    else if (options.transport == "tcp")
        serve_tcp(initial, options);
    else
        throw std::invalid_argument("serve: unknown transport " + options.transport);
}

}  // namespace clutter::mcp
