#pragma once

// Content-addressed judge-response cache. One file per key under a two-level
// directory fan-out; writes go through a temp file and an atomic rename so
// concurrent readers never see a partial entry and interrupted runs leave no
// damage. Reruns over an already-scored corpus become free.

#include <filesystem>
#include <optional>
#include <string>

#include "consult/detail/io.hpp"
#include "consult/errors.hpp"

namespace consult {

class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::optional<std::string> get(const std::string& key) const {
        const auto path = path_for(key);
        std::error_code ec;
        if (!std::filesystem::exists(path, ec)) return std::nullopt;
        return detail::read_file(path);
    }

    void put(const std::string& key, std::string_view value) const {
        detail::write_file_atomic(path_for(key), value);
    }

    std::size_t entry_count() const {
        std::size_t n = 0;
        std::error_code ec;
        for (auto it = std::filesystem::recursive_directory_iterator(dir_, ec);
             it != std::filesystem::recursive_directory_iterator(); ++it)
            if (it->is_regular_file()) ++n;
        return n;
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path path_for(const std::string& key) const {
        if (key.size() < 3) throw Error("cache key too short: " + key);
        return dir_ / key.substr(0, 2) / (key.substr(2) + ".txt");
    }

    std::filesystem::path dir_;
};

}  // namespace consult
