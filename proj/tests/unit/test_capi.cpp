#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blowup5d/blowup5d.h"

namespace fs = std::filesystem;

namespace {

const double kPi = 3.14159265358979323846;

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / ("capi_scratch_" + name);
    fs::remove_all(p);
    return p;
}

const char* kBenchmark = R"({"schema_version": 1, "command": "benchmark-linear",
                             "params": {"t_lo": 0.1, "t_hi": 0.3, "samples": 11}})";

void count_messages(const char*, void* user) { ++*static_cast<int*>(user); }

}  // namespace

TEST_CASE("versions and status strings") {
    CHECK(std::strlen(b5_version()) > 0);
    CHECK(b5_config_schema_version() == 1);
    for (int s = B5_OK; s <= B5_ERR_INTERNAL; ++s) CHECK(std::strlen(b5_status_string(s)) > 0);
    CHECK(std::string(b5_status_string(99)) == "unknown status");
}

TEST_CASE("null arguments are rejected") {
    CHECK(b5_profiles_create(nullptr, nullptr) == B5_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(b5_last_error()) > 0);
    double x = 0.0;
    CHECK(b5_profiles_kappa(nullptr, &x) == B5_ERR_INVALID_ARGUMENT);
    CHECK(b5_virial_weight(5.0, 1.0, 0, nullptr) == B5_ERR_INVALID_ARGUMENT);
    b5_result* r = nullptr;
    CHECK(b5_run(nullptr, "x", 1, nullptr, nullptr, &r) == B5_ERR_INVALID_ARGUMENT);
    CHECK(b5_run(kBenchmark, "x", 0, nullptr, nullptr, &r) == B5_ERR_INVALID_ARGUMENT);
    CHECK(r == nullptr);
    b5_profiles_destroy(nullptr);
    b5_result_destroy(nullptr);
    CHECK(b5_result_artifact_count(nullptr) == 0);
    CHECK(b5_result_artifact(nullptr, 0) == nullptr);
}

TEST_CASE("profile handle") {
    const fs::path dir = scratch("profiles");
    fs::create_directories(dir);
    const std::string cache = (dir / "profiles.cache").string();
    const std::string opts = "{\"cache\": \"" + cache + "\"}";
    b5_profiles* p = nullptr;
    REQUIRE(b5_profiles_create(opts.c_str(), &p) == B5_OK);
    REQUIRE(p != nullptr);
    CHECK(fs::exists(cache));
    double kappa = 0.0, e0 = 0.0;
    CHECK(b5_profiles_kappa(p, &kappa) == B5_OK);
    CHECK(b5_profiles_e0(p, &e0) == B5_OK);
    CHECK(std::abs(kappa / (128.0 / (105.0 * kPi)) - 1.0) < 1e-6);
    CHECK(e0 == doctest::Approx(0.618077).epsilon(1e-5));

    double v = 0.0;
    CHECK(b5_profiles_sample(p, B5_FIELD_W, 0.0, &v) == B5_OK);
    CHECK(v == doctest::Approx(1.0));
    CHECK(b5_profiles_sample(p, B5_FIELD_Z, 4.0, &v) == B5_OK);
    CHECK(v == 0.0);
    CHECK(b5_profiles_sample(p, B5_FIELD_Y, 1.0, &v) == B5_OK);
    CHECK(v > 0.0);
    CHECK(b5_profiles_sample(p, 17, 1.0, &v) == B5_ERR_INVALID_ARGUMENT);
    CHECK(b5_profiles_sample(p, B5_FIELD_A, -1.0, &v) == B5_ERR_INVALID_ARGUMENT);

    // Second handle loads the cache and agrees exactly.
    b5_profiles* q = nullptr;
    REQUIRE(b5_profiles_create(opts.c_str(), &q) == B5_OK);
    double kappa2 = 0.0;
    b5_profiles_kappa(q, &kappa2);
    CHECK(kappa2 == kappa);
    b5_profiles_destroy(q);
    b5_profiles_destroy(p);

    CHECK(b5_profiles_create("{\"cells\": 3}", &p) == B5_ERR_VALIDATION);
    CHECK(std::string(b5_last_error()).rfind("cells:", 0) == 0);
    CHECK(b5_profiles_create("{\"colour\": 3}", &p) == B5_ERR_VALIDATION);
    CHECK(b5_profiles_create("not json", &p) == B5_ERR_VALIDATION);
    CHECK(p == nullptr);
    fs::remove_all(dir);
}

TEST_CASE("virial weight entry point") {
    const double R = 20.0;
    double v = 0.0;
    for (double r : {30.0, 55.0, 400.0}) {
        REQUIRE(b5_virial_weight(R, r, 5, &v) == B5_OK);
        CHECK(v == doctest::Approx(-15.0 * R / (r * r * r)).epsilon(1e-12));
    }
    CHECK(b5_virial_weight(R, 3.0, 0, &v) == B5_OK);
    CHECK(v == doctest::Approx(4.5));
    CHECK(b5_virial_weight(R, 3.0, 6, &v) == B5_ERR_INVALID_ARGUMENT);
    CHECK(b5_virial_weight(-1.0, 3.0, 0, &v) == B5_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config runs write deterministic artifacts") {
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    b5_result* ra = nullptr;
    b5_result* rb = nullptr;
    REQUIRE(b5_run(kBenchmark, a.string().c_str(), 1, nullptr, nullptr, &ra) == B5_OK);
    REQUIRE(b5_run(kBenchmark, b.string().c_str(), 2, nullptr, nullptr, &rb) == B5_OK);
    REQUIRE(b5_result_artifact_count(ra) == 3);
    CHECK(std::string(b5_result_summary(ra)).find("\"q_hat\"") != std::string::npos);
    for (size_t i = 0; i < b5_result_artifact_count(ra); ++i) {
        const fs::path pa = b5_result_artifact(ra, i), pb = b5_result_artifact(rb, i);
        CHECK(pa.filename() == pb.filename());
        CHECK(fs::exists(pa));
        CHECK(slurp(pa.string()) == slurp(pb.string()));
    }
    CHECK(fs::path(b5_result_artifact(ra, 2)).filename() == "manifest.json");
    CHECK(b5_result_artifact(ra, 3) == nullptr);
    const std::string manifest = slurp((a / "manifest.json").string());
    CHECK(manifest.find("\"schema_version\": 1") != std::string::npos);
    CHECK(manifest.find("\"cfl\": 0.5") != std::string::npos);
    b5_result_destroy(ra);
    b5_result_destroy(rb);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("validation failures name the offending key") {
    struct Case {
        const char* config;
        const char* path;
    };
    const std::vector<Case> cases = {
        {R"({"schema_version": 1, "command": "benchmark-linear", "params": {"beta": 2}})", "params.beta:"},
        {R"({"schema_version": 1, "command": "fly"})", "command:"},
        {R"({"command": "profiles"})", "schema_version:"},
        {R"({"schema_version": 2, "command": "profiles"})", "schema_version:"},
        {R"({"schema_version": 1, "command": "modulation", "params": {"mode": {"kind": "degenerate", "nu": -1}}})",
         "params.mode.nu:"},
        {R"({"schema_version": 1, "command": "simulate", "params": {"t1": 0.6}})", "params.t1:"},
        {R"({"schema_version": 1, "command": "profiles", "extra": 1})", "extra:"},
        {R"({"schema_version": 1, "command": "coercivity", "params": {"modes": [100, "x"]}})", "params.modes[1]:"},
        {R"([1, 2])", "<root>:"},
    };
    const fs::path dir = scratch("invalid");
    for (const auto& c : cases) {
        b5_result* r = nullptr;
        CHECK(b5_run(c.config, dir.string().c_str(), 1, nullptr, nullptr, &r) == B5_ERR_VALIDATION);
        CHECK(r == nullptr);
        INFO(std::string(b5_last_error()));
        CHECK(std::string(b5_last_error()).rfind(c.path, 0) == 0);
    }
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("numerical failures have their own status") {
    const char* cfg = R"({"schema_version": 1, "command": "modulation",
                          "params": {"t1": 0.3, "t0": 0.5, "forcing": 1e6}})";
    const fs::path dir = scratch("numerical");
    b5_result* r = nullptr;
    CHECK(b5_run(cfg, dir.string().c_str(), 1, nullptr, nullptr, &r) == B5_ERR_NUMERICAL);
    INFO(std::string(b5_last_error()));
    CHECK(std::string(b5_last_error()).rfind("shooting:", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("file entry points and progress") {
    const fs::path dir = scratch("files");
    fs::create_directories(dir);
    const std::string cfg = (dir / "config.json").string();
    {
        std::ofstream f(cfg);
        f << R"({"schema_version": 1, "command": "modulation", "params": {"t1": 0.3, "t0": 0.5}})";
    }
    b5_result* r = nullptr;
    REQUIRE(b5_validate_file(cfg.c_str(), &r) == B5_OK);
    const std::string resolved = b5_result_summary(r);
    CHECK(resolved.find("\"tol\": 1e-12") != std::string::npos);
    CHECK(resolved.find("\"ustar_center\": 5.0") != std::string::npos);
    CHECK(b5_result_artifact_count(r) == 0);
    b5_result_destroy(r);

    int messages = 0;
    REQUIRE(b5_run_file(cfg.c_str(), (dir / "out").string().c_str(), 1, count_messages, &messages, &r) == B5_OK);
    CHECK(messages > 0);
    CHECK(fs::exists(dir / "out" / "modulation.csv"));
    CHECK(fs::exists(dir / "out" / "modulation.json"));
    CHECK(std::string(b5_result_summary(r)).find("\"trapped\": true") != std::string::npos);
    b5_result_destroy(r);

    CHECK(b5_run_file((dir / "missing.json").string().c_str(), dir.string().c_str(), 1, nullptr, nullptr, &r) ==
          B5_ERR_IO);
    CHECK(b5_validate_file((dir / "missing.json").string().c_str(), &r) == B5_ERR_IO);
    fs::remove_all(dir);
}
