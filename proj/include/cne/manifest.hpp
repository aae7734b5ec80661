#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cne {

// FNV-1a over file bytes; used to tie priors/embeddings to their input files.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize t = 0; t < in.gcount(); ++t) {
            h ^= static_cast<unsigned char>(buf[t]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// One manifest per run: command, resolved parameters, input digests, seed,
// duration, output paths. Reruns with identical inputs reproduce outputs.
class RunManifest {
public:
    explicit RunManifest(std::string command) : start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["inputs"] = nlohmann::json::object();
        doc_["params"] = nlohmann::json::object();
        doc_["outputs"] = nlohmann::json::array();
    }

    void input(const std::string& name, const std::string& path) {
        doc_["inputs"][name] = {{"path", path}, {"digest", file_digest(path)}};
    }
    template <typename T>
    void param(const std::string& name, const T& value) {
        doc_["params"][name] = value;
    }
    void output(const std::string& path) { doc_["outputs"].push_back(path); }

    void write(const std::string& path) {
        auto elapsed = std::chrono::steady_clock::now() - start_;
        doc_["duration_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write manifest: " + path);
        out << doc_.dump(2) << '\n';
    }

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace cne
