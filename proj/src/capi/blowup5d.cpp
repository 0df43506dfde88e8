#include "blowup5d/blowup5d.h"

#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "cli/runner.hpp"
#include "functionals/functionals.hpp"
#include "json.hpp"
#include "profiles/profiles.hpp"

struct b5_profiles {
    b5::ProfilePtr set;
};

struct b5_result {
    std::string summary;
    std::vector<std::string> artifacts;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const std::string& msg) {
    g_last_error = msg;
    return status;
}

// Maps exceptions from the core onto status codes; invalid_argument maps to `invalid`.
template <class F>
int guarded(F&& f, int invalid = B5_ERR_INVALID_ARGUMENT) {
    g_last_error.clear();
    try {
        f();
        return B5_OK;
    } catch (const b5::cli::ValidationError& e) {
        return fail(B5_ERR_VALIDATION, e.what());
    } catch (const b5::cli::IoError& e) {
        return fail(B5_ERR_IO, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(B5_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(invalid, e.what());
    } catch (const std::bad_alloc&) {
        return fail(B5_ERR_INTERNAL, "out of memory");
    } catch (const std::logic_error& e) {
        return fail(B5_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail(B5_ERR_NUMERICAL, e.what());
    } catch (...) {
        return fail(B5_ERR_INTERNAL, "unknown exception");
    }
}

b5::ProfileOptions profile_options(const char* text, std::string& cache) {
    b5::ProfileOptions opt;
    if (!text || !*text) return opt;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw b5::cli::ValidationError("<root>", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw b5::cli::ValidationError("<root>", "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const auto& v = it.value();
        if (k == "cache") {
            if (!v.is_string()) throw b5::cli::ValidationError(k, "must be a string");
            cache = v.get<std::string>();
            continue;
        }
        if (k == "cells") {
            if (!v.is_number_integer() || v.get<long>() < 64) throw b5::cli::ValidationError(k, "must be an integer >= 64");
            opt.grid.cells = v.get<int>();
            continue;
        }
        if (!v.is_number() || !(v.get<double>() > 0.0)) throw b5::cli::ValidationError(k, "must be a positive number");
        const double x = v.get<double>();
        if (k == "r_max") opt.grid.r_max = x;
        else if (k == "core_step") opt.grid.core_step = x;
        else if (k == "eigen_radius") opt.eigen_radius = x;
        else if (k == "z_radius") opt.z_radius = x;
        else throw b5::cli::ValidationError(k, "unknown key");
    }
    return opt;
}

int run_common(bool from_file, const char* config, const char* out_dir, int threads, b5_progress_fn progress,
               void* user, b5_result** out) {
    if (!config || !out_dir || !out) return fail(B5_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    if (threads < 1) return fail(B5_ERR_INVALID_ARGUMENT, "threads must be >= 1");
    return guarded([&] {
        b5::ProgressFn fn;
        if (progress) fn = [progress, user](const std::string& s) { progress(s.c_str(), user); };
        const auto r = from_file ? b5::cli::run_config_file(config, out_dir, threads, fn)
                                 : b5::cli::run_config_text(config, out_dir, threads, fn);
        *out = new b5_result{r.summary, r.artifacts};
    }, B5_ERR_VALIDATION);
}

}  // namespace

extern "C" {

const char* b5_version(void) { return b5::cli::kLibraryVersion; }

int b5_config_schema_version(void) { return b5::cli::kSchemaVersion; }

const char* b5_status_string(int status) {
    switch (status) {
        case B5_OK: return "ok";
        case B5_ERR_INVALID_ARGUMENT: return "invalid argument";
        case B5_ERR_VALIDATION: return "config validation failed";
        case B5_ERR_NUMERICAL: return "numerical failure";
        case B5_ERR_IO: return "i/o failure";
        case B5_ERR_INTERNAL: return "internal error";
        default: return "unknown status";
    }
}

const char* b5_last_error(void) { return g_last_error.c_str(); }

int b5_profiles_create(const char* options_json, b5_profiles** out) {
    if (!out) return fail(B5_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = nullptr;
    return guarded([&] {
        std::string cache;
        const auto opt = profile_options(options_json, cache);
        *out = new b5_profiles{b5::ProfileSet::cached(cache, opt)};
    });
}

void b5_profiles_destroy(b5_profiles* p) { delete p; }

int b5_profiles_kappa(const b5_profiles* p, double* out) {
    if (!p || !out) return fail(B5_ERR_INVALID_ARGUMENT, "null argument");
    *out = p->set->kappa();
    return B5_OK;
}

int b5_profiles_e0(const b5_profiles* p, double* out) {
    if (!p || !out) return fail(B5_ERR_INVALID_ARGUMENT, "null argument");
    *out = p->set->e0();
    return B5_OK;
}

int b5_profiles_sample(const b5_profiles* p, int field, double rho, double* out) {
    if (!p || !out) return fail(B5_ERR_INVALID_ARGUMENT, "null argument");
    if (!(rho >= 0.0)) return fail(B5_ERR_INVALID_ARGUMENT, "rho must be >= 0");
    const b5::ProfileSet& s = *p->set;
    switch (field) {
        case B5_FIELD_W: *out = b5::bubble::W(rho); break;
        case B5_FIELD_LW: *out = b5::bubble::LW(rho); break;
        case B5_FIELD_A: *out = s.A_at(rho).value; break;
        case B5_FIELD_B: *out = s.B_at(rho).value; break;
        case B5_FIELD_Y: *out = s.Y_at(rho); break;
        case B5_FIELD_Z: *out = s.Z_at(rho); break;
        default: return fail(B5_ERR_INVALID_ARGUMENT, "unknown field");
    }
    return B5_OK;
}

int b5_virial_weight(double R, double r, int order, double* out) {
    if (!out) return fail(B5_ERR_INVALID_ARGUMENT, "null argument");
    if (order < 0 || order > 5) return fail(B5_ERR_INVALID_ARGUMENT, "order must be in [0, 5]");
    return guarded([&] { *out = b5::VirialWeight(R).eval(r, static_cast<b5::WeightOrder>(order)); });
}

int b5_run(const char* config_json, const char* out_dir, int threads, b5_progress_fn progress, void* user,
           b5_result** out) {
    return run_common(false, config_json, out_dir, threads, progress, user, out);
}

int b5_run_file(const char* config_path, const char* out_dir, int threads, b5_progress_fn progress, void* user,
                b5_result** out) {
    return run_common(true, config_path, out_dir, threads, progress, user, out);
}

int b5_validate_file(const char* config_path, b5_result** out) {
    if (!config_path || !out) return fail(B5_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream f(config_path, std::ios::binary);
        if (!f) throw b5::cli::IoError(std::string("cannot read config ") + config_path);
        std::ostringstream s;
        s << f.rdbuf();
        *out = new b5_result{b5::cli::resolve_config_text(s.str()), {}};
    }, B5_ERR_VALIDATION);
}

const char* b5_result_summary(const b5_result* r) { return r ? r->summary.c_str() : ""; }

size_t b5_result_artifact_count(const b5_result* r) { return r ? r->artifacts.size() : 0; }

const char* b5_result_artifact(const b5_result* r, size_t index) {
    if (!r || index >= r->artifacts.size()) return nullptr;
    return r->artifacts[index].c_str();
}

void b5_result_destroy(b5_result* r) { delete r; }

}  // extern "C"
