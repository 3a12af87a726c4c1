#pragma once

/**
 * @file run_dir.hpp
 * @brief Per-run output directory, file index and manifest.
 *
 * A run lives in `<root>/<hash8>-<UTC timestamp>[-k]/`. Every file inside is
 * named `<hash8>_<name>` and written through a temporary file plus rename.
 * A `PARTIAL` marker exists from creation until finish() writes the manifest,
 * so an aborted run is recognisable on disk.
 */

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "frnse/error.hpp"
#include "frnse/io/config.hpp"
#include "frnse/io/csv.hpp"
#include "frnse/io/snapshot.hpp"

namespace frnse {

inline constexpr const char* version = "1.0.0";

namespace io {

namespace fs = std::filesystem;

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp, bool compact)
{
    const std::time_t tt = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%SZ" : "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes via `<path>.tmp` and rename, so readers never see a torn file.
inline void write_atomic(const fs::path& path, const std::string& content)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Resolution order: explicit flag, config [output] dir, $FRNSE_OUT, "runs".
inline fs::path output_root(const std::string& flag, const ExperimentConfig& cfg)
{
    if (!flag.empty())
        return flag;
    if (!cfg.output_dir.empty())
        return cfg.output_dir;
    if (const char* env = std::getenv("FRNSE_OUT"); env && *env)
        return env;
    return "runs";
}

struct ExperimentStatus {
    std::string name;
    std::string status;  ///< "pass", "fail", "error", "completed", ...
    std::string detail;
};

class RunDir {
public:
    RunDir(const fs::path& root, const ExperimentConfig& cfg, std::string command)
        : cfg_(cfg), command_(std::move(command)), hash_(hash_hex(config_hash(cfg))),
          start_(std::chrono::system_clock::now())
    {
        std::error_code ec;
        fs::create_directories(root, ec);
        if (ec)
            throw IoError("cannot create output root " + root.string() + ": " + ec.message());
        const std::string base = hash_.substr(0, 8) + "-" + utc_timestamp(start_, true);
        // create_directory reports whether it made the directory, which keeps
        // two runs started in the same second apart.
        for (int k = 0;; ++k) {
            fs::path p = root / (k == 0 ? base : base + "-" + std::to_string(k));
            if (fs::create_directory(p, ec)) {
                dir_ = p;
                break;
            }
            if (ec)
                throw IoError("cannot create run directory " + p.string() + ": " + ec.message());
        }
        write_atomic(dir_ / "PARTIAL", "run started " + utc_timestamp(start_, false) + "\n");
    }

    const fs::path& path() const { return dir_; }
    const std::string& hash() const { return hash_; }
    std::string prefix() const { return hash_.substr(0, 8); }
    const std::vector<std::string>& files() const { return files_; }

    fs::path file_path(const std::string& name) const { return dir_ / (prefix() + "_" + name); }

    std::string write_text(const std::string& name, const std::string& content)
    {
        const auto p = file_path(name);
        write_atomic(p, content);
        files_.push_back(p.filename().string());
        return p.string();
    }

    std::string write_table(const Table& t) { return write_text(t.name + ".csv", to_csv(t)); }

    std::string write_snapshot(const std::string& name, const Field& f, double t)
    {
        std::ostringstream buf(std::ios::binary);
        write_field(buf, f, t);
        return write_text(name + ".field", buf.str());
    }

    void record(ExperimentStatus s) { statuses_.push_back(std::move(s)); }
    void record_error(const std::string& where, const std::string& what) { errors_.push_back({where, what}); }

    /// Writes the manifest and clears the PARTIAL marker.
    void finish(int exit_code)
    {
        using nlohmann::ordered_json;
        ordered_json m;
        m["artifact"] = "frnse";
        m["version"] = version;
        m["command"] = command_;
        m["config_hash"] = hash_;
        m["config"] = serialize(cfg_);
        m["start"] = utc_timestamp(start_, false);
        m["end"] = utc_timestamp(std::chrono::system_clock::now(), false);
        m["exit_code"] = exit_code;
        m["experiments"] = ordered_json::array();
        for (const auto& s : statuses_)
            m["experiments"].push_back({{"name", s.name}, {"status", s.status}, {"detail", s.detail}});
        m["errors"] = ordered_json::array();
        for (const auto& [where, what] : errors_)
            m["errors"].push_back({{"where", where}, {"message", what}});
        m["files"] = files_;
        const auto p = file_path("manifest.json");
        write_atomic(p, m.dump(2) + "\n");
        std::error_code ec;
        fs::remove(dir_ / "PARTIAL", ec);
        finished_ = true;
    }

    bool finished() const { return finished_; }

private:
    ExperimentConfig cfg_;
    std::string command_;
    std::string hash_;
    std::chrono::system_clock::time_point start_;
    fs::path dir_;
    std::vector<std::string> files_;
    std::vector<ExperimentStatus> statuses_;
    std::vector<std::pair<std::string, std::string>> errors_;
    bool finished_ = false;
};

} // namespace io
} // namespace frnse
