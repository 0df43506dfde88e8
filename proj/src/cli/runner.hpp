#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wave_sim/experiment.hpp"

namespace b5::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "1.0.0";

// Config rejected before any computation; the message starts with the key path.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOutput {
    std::string command;
    // Summary JSON, also stored in the manifest.
    std::string summary;
    // Artifact paths in write order; the manifest comes last.
    std::vector<std::string> artifacts;
};

extern const std::vector<std::string> kCommands;

// Parses, validates and runs one config. Artifacts are named after the command
// inside out_dir, which is created when missing.
RunOutput run_config_text(const std::string& config_text, const std::string& out_dir, int threads,
                          const ProgressFn& progress = {});
RunOutput run_config_file(const std::string& path, const std::string& out_dir, int threads,
                          const ProgressFn& progress = {});

// Schema check only: returns the fully resolved config (defaults filled in).
std::string resolve_config_text(const std::string& config_text);

}  // namespace b5::cli
