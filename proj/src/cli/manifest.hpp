#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynmix/params.hpp"

namespace dynmix::cli {

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

// Record written next to every output file; see docs/run-manifest.schema.json.
struct RunManifest {
    std::vector<std::string> argv;
    std::string command;
    std::optional<ModelParams> params;
    std::uint64_t seed = 0;
    std::string version;
    std::chrono::system_clock::time_point started;
    std::chrono::system_clock::time_point finished;
    struct Output {
        std::string path;
        std::string sha256;
    };
    std::vector<Output> outputs;
    nlohmann::json metadata = nlohmann::json::object();

    // Hashes `path` and appends it to outputs.
    void add_output(const std::string& path);

    nlohmann::json to_json() const;
    void write(const std::string& path) const;
};

std::string manifest_path_for(const std::string& output_path);

std::string artifact_version();

} // namespace dynmix::cli
