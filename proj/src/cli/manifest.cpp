#include "manifest.hpp"

#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "dynmix/error.hpp"

#ifndef DYNMIX_VERSION
#define DYNMIX_VERSION "unknown"
#endif

namespace dynmix::cli {

namespace {

std::string iso8601(std::chrono::system_clock::time_point tp) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count() % 1000;
    const std::time_t secs = std::chrono::system_clock::to_time_t(tp);
    std::tm utc{};
    gmtime_r(&secs, &utc);
    std::ostringstream os;
    os << std::put_time(&utc, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
    return os.str();
}

std::string shell_join(const std::vector<std::string>& argv) {
    std::string out;
    for (const auto& a : argv) {
        if (!out.empty()) out += ' ';
        if (!a.empty() && a.find_first_of(" \t'\"\\$`*?") == std::string::npos) {
            out += a;
            continue;
        }
        out += '\'';
        for (char c : a) {
            if (c == '\'') {
                out += "'\\''";
            } else {
                out += c;
            }
        }
        out += '\'';
    }
    return out;
}

} // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path + " for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 initialisation failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

void RunManifest::add_output(const std::string& path) { outputs.push_back({path, sha256_file(path)}); }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["schema"] = "dynmix.run-manifest/1";
    j["command_line"] = shell_join(argv);
    j["argv"] = argv;
    j["command"] = command;
    if (params) {
        j["params"] = {{"theta", params->theta()},
                       {"lambda", params->lambda()},
                       {"omega", params->omega()},
                       {"n", params->n().str()}};
    } else {
        j["params"] = nullptr;
    }
    j["seed"] = seed;
    j["version"] = version;
    j["started_at"] = iso8601(started);
    j["finished_at"] = iso8601(finished);
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}});
    j["metadata"] = metadata;
    return j;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << to_json().dump(2) << '\n';
    if (!out) throw Error("write to " + path + " failed");
}

std::string manifest_path_for(const std::string& output_path) { return output_path + ".manifest.json"; }

std::string artifact_version() { return DYNMIX_VERSION; }

} // namespace dynmix::cli
