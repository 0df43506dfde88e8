#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "blowup5d/blowup5d.h"

namespace {

enum Exit { kOk = 0, kUsage = 2, kValidation = 3, kNumerical = 4, kIo = 5, kInternal = 6 };

int exit_code(int status) {
    switch (status) {
        case B5_OK: return kOk;
        case B5_ERR_INVALID_ARGUMENT: return kUsage;
        case B5_ERR_VALIDATION: return kValidation;
        case B5_ERR_NUMERICAL: return kNumerical;
        case B5_ERR_IO: return kIo;
        default: return kInternal;
    }
}

void print_progress(const char* message, void*) {
    std::fprintf(stderr, "%s\n", message);
    std::fflush(stderr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial blow-up experiments for the focusing energy-critical wave equation in five dimensions"};
    std::string config, out = "out";
    int threads = 1;
    bool verbose = false, check = false, version = false;
    app.add_option("--config", config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", out, "Output directory for artifacts")->capture_default_str();
    app.add_option("--threads", threads, "Concurrent shooting trials")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--verbose", verbose, "Progress messages on stderr");
    app.add_flag("--check", check, "Validate the config and print it with defaults filled in");
    app.add_flag("--version", version, "Print library and schema versions");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    if (version) {
        std::printf("blowup5d %s (config schema %d)\n", b5_version(), b5_config_schema_version());
        return kOk;
    }
    if (config.empty()) {
        std::fprintf(stderr, "error: --config is required\n");
        return kUsage;
    }

    b5_result* res = nullptr;
    const int st = check ? b5_validate_file(config.c_str(), &res)
                         : b5_run_file(config.c_str(), out.c_str(), threads, verbose ? print_progress : nullptr,
                                       nullptr, &res);
    if (st != B5_OK) {
        std::fprintf(stderr, "error (%s): %s\n", b5_status_string(st), b5_last_error());
        return exit_code(st);
    }
    std::printf("%s\n", b5_result_summary(res));
    if (verbose)
        for (size_t i = 0; i < b5_result_artifact_count(res); ++i)
            std::fprintf(stderr, "wrote %s\n", b5_result_artifact(res, i));
    b5_result_destroy(res);
    return kOk;
}
