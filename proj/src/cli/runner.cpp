#include "cli/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace b5::cli {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"profiles",    "modulation",       "ansatz-scan",
                                            "coercivity", "benchmark-linear", "simulate"};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
    double lo = -kInf, hi = kInf;
    bool lo_open = false, hi_open = false;
    std::string describe() const {
        std::ostringstream s;
        s.precision(17);
        if (lo > -kInf) s << (lo_open ? "> " : ">= ") << lo;
        if (lo > -kInf && hi < kInf) s << " and ";
        if (hi < kInf) s << (hi_open ? "< " : "<= ") << hi;
        return s.str();
    }
    bool contains(double v) const {
        if (!std::isfinite(v)) return false;
        if (lo_open ? !(v > lo) : !(v >= lo)) return false;
        if (hi_open ? !(v < hi) : !(v <= hi)) return false;
        return true;
    }
};

Range positive() { return {0.0, kInf, true, false}; }
Range at_least(double v) { return {v, kInf, false, false}; }
Range above(double v) { return {v, kInf, true, false}; }
Range open_interval(double a, double b) { return {a, b, true, true}; }
Range any() { return {}; }

// Typed reader over one JSON object: records resolved values and rejects unknown keys.
class Obj {
public:
    Obj(const json* j, std::string path, Obj* parent = nullptr, std::string key = {})
        : j_(j), path_(std::move(path)), parent_(parent), key_(std::move(key)) {
        if (j_ && !j_->is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "must be an object");
    }

    const ordered_json& resolved() const { return out_; }

    std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const json* find(const std::string& k) {
        used_.insert(k);
        if (!j_) return nullptr;
        auto it = j_->find(k);
        return it == j_->end() ? nullptr : &*it;
    }

    double num(const std::string& k, double def, Range r) {
        const json* v = find(k);
        double x = def;
        if (v) {
            if (!v->is_number()) throw ValidationError(key_path(k), "must be a number");
            x = v->get<double>();
        }
        if (!r.contains(x)) throw ValidationError(key_path(k), "must be " + r.describe());
        out_[k] = x;
        return x;
    }

    long integer(const std::string& k, long def, long lo, long hi) {
        const json* v = find(k);
        long x = def;
        if (v) {
            if (!v->is_number_integer()) throw ValidationError(key_path(k), "must be an integer");
            x = v->get<long>();
        }
        if (x < lo || x > hi)
            throw ValidationError(key_path(k), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out_[k] = x;
        return x;
    }

    std::string str(const std::string& k, const std::string& def) {
        const json* v = find(k);
        std::string x = def;
        if (v) {
            if (!v->is_string()) throw ValidationError(key_path(k), "must be a string");
            x = v->get<std::string>();
        }
        out_[k] = x;
        return x;
    }

    std::string choice(const std::string& k, const std::string& def, const std::vector<std::string>& allowed) {
        const std::string x = str(k, def);
        for (const auto& a : allowed)
            if (a == x) return x;
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ValidationError(key_path(k), "must be one of {" + list + "}, got \"" + x + "\"");
    }

    std::vector<double> nums(const std::string& k, const std::vector<double>& def, Range r, std::size_t min_len) {
        const json* v = find(k);
        std::vector<double> x = def;
        if (v) {
            if (!v->is_array()) throw ValidationError(key_path(k), "must be an array of numbers");
            x.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number())
                    throw ValidationError(key_path(k) + "[" + std::to_string(i) + "]", "must be a number");
                x.push_back((*v)[i].get<double>());
            }
        }
        if (x.size() < min_len)
            throw ValidationError(key_path(k), "needs at least " + std::to_string(min_len) + " entries");
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!r.contains(x[i]))
                throw ValidationError(key_path(k) + "[" + std::to_string(i) + "]", "must be " + r.describe());
        out_[k] = x;
        return x;
    }

    std::vector<int> ints(const std::string& k, const std::vector<int>& def, int lo, int hi, std::size_t min_len) {
        const json* v = find(k);
        std::vector<int> x = def;
        if (v) {
            if (!v->is_array()) throw ValidationError(key_path(k), "must be an array of integers");
            x.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number_integer())
                    throw ValidationError(key_path(k) + "[" + std::to_string(i) + "]", "must be an integer");
                x.push_back((*v)[i].get<int>());
            }
        }
        if (x.size() < min_len)
            throw ValidationError(key_path(k), "needs at least " + std::to_string(min_len) + " entries");
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < lo || x[i] > hi)
                throw ValidationError(key_path(k) + "[" + std::to_string(i) + "]",
                                      "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        out_[k] = x;
        return x;
    }

    std::vector<std::string> choices(const std::string& k, const std::vector<std::string>& def,
                                     const std::vector<std::string>& allowed) {
        const json* v = find(k);
        std::vector<std::string> x = def;
        if (v) {
            if (!v->is_array() || v->empty()) throw ValidationError(key_path(k), "must be a non-empty array of strings");
            x.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                const std::string p = key_path(k) + "[" + std::to_string(i) + "]";
                if (!(*v)[i].is_string()) throw ValidationError(p, "must be a string");
                const auto s = (*v)[i].get<std::string>();
                bool ok = false;
                for (const auto& a : allowed) ok = ok || a == s;
                if (!ok) throw ValidationError(p, "unknown value \"" + s + "\"");
                x.push_back(s);
            }
        }
        out_[k] = x;
        return x;
    }

    // Sub-object; a missing key reads as an empty object.
    Obj child(const std::string& k) {
        const json* v = find(k);
        return Obj(v, key_path(k), this, k);
    }

    // Rejects unknown keys and hands the resolved object to the parent.
    void done() {
        if (j_)
            for (auto it = j_->begin(); it != j_->end(); ++it)
                if (!used_.count(it.key())) throw ValidationError(key_path(it.key()), "unknown key");
        if (parent_) parent_->out_[key_] = out_;
    }

private:
    const json* j_;
    std::string path_;
    Obj* parent_;
    std::string key_;
    ordered_json out_ = ordered_json::object();
    std::set<std::string> used_;
};

RegimeMode read_mode(Obj o) {
    const std::string kind = o.choice("kind", "non_degenerate", {"non_degenerate", "degenerate"});
    RegimeMode m;
    if (kind == "non_degenerate") {
        m = RegimeMode::non_degenerate(o.num("ustar_center", 5.0, positive()));
    } else {
        m = RegimeMode::degenerate(o.num("nu", 9.0, positive()));
    }
    o.done();
    return m;
}

UstarSpec read_ustar(Obj o) {
    UstarSpec u;
    o.choice("family", "gaussian", {"gaussian"});
    u.rho = o.num("rho", 1.0, positive());
    u.width = o.num("width", 1.0, positive());
    o.done();
    return u;
}

struct Context {
    std::filesystem::path out;
    ProfileOptions popt;
    std::string cache;
    unsigned long long seed = 0;
    int threads = 1;
    ProgressFn progress;
    std::vector<std::string> artifacts;

    ProfilePtr profiles() {
        if (!prof) {
            say("building profiles");
            prof = ProfileSet::cached(cache, popt);
        }
        return prof;
    }
    std::string path(const std::string& name) {
        const std::string p = (out / name).string();
        artifacts.push_back(p);
        return p;
    }
    void say(const std::string& s) const {
        if (progress) progress(s);
    }

private:
    ProfilePtr prof;
};

using Exec = std::function<ordered_json(Context&)>;

struct Plan {
    std::string command;
    ordered_json resolved;
    Context ctx;
    Exec exec;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

double slope_between(const RadialField& v, double a, double b) {
    const auto& g = v.grid();
    std::vector<double> x, y;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.r(i) >= a && g.r(i) <= b) {
            x.push_back(g.r(i));
            y.push_back(std::abs(v[i]));
        }
    if (x.size() < 2) return std::nan("");
    return loglog_slope(x, y);
}

double relative_residual(const RadialField& lhs, const RadialField& rhs, double r_cut) {
    RadialField d = lhs - rhs, ref = rhs;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (lhs.grid().r(i) > r_cut) d[i] = ref[i] = 0.0;
    return norm(d, NormKind::L2) / norm(ref, NormKind::L2);
}

// ---- commands ----

Exec plan_profiles(Obj p) {
    auto windows = p.nums("slope_windows", {50.0, 500.0, 1e3, 1e4}, positive(), 2);
    if (windows.size() % 2) throw ValidationError(p.key_path("slope_windows"), "needs pairs [lo, hi, ...]");
    for (std::size_t i = 0; i < windows.size(); i += 2)
        if (!(windows[i] < windows[i + 1]))
            throw ValidationError(p.key_path("slope_windows") + "[" + std::to_string(i) + "]", "lo must be < hi");
    const double csv_r_max = p.num("csv_r_max", 100.0, positive());
    p.done();
    return [=](Context& c) {
        const auto prof = c.profiles();
        const ProfileSet& P = *prof;
        ordered_json s;
        s["kappa"] = P.kappa();
        s["kappa_exact"] = kKappaExact;
        s["kappa_rel_error"] = std::abs(P.kappa() / kKappaExact - 1.0);
        s["e0"] = P.e0();
        s["far_coeff_A"] = P.far_coeff_A();
        s["far_coeff_B"] = P.far_coeff_B();
        const auto lw = P.LW();
        const auto rhs_a = P.kappa() * lw + nonlinearity(P.W(), NonlinOrder::df);
        const auto rhs_b = -1.0 * P.L0LW();
        s["residual_A"] = relative_residual(apply_L(P.A(), 1.0), rhs_a, 1e3);
        s["residual_B"] = relative_residual(apply_L(P.B(), 1.0), rhs_b, 1e3);
        s["z_dot_A"] = inner_product(P.Z(), P.A());
        s["z_dot_B"] = inner_product(P.Z(), P.B());
        s["y_dot_LW"] = inner_product(P.LW(), P.Y()) / norm(P.LW(), NormKind::L2);
        ordered_json sl = ordered_json::array();
        for (std::size_t i = 0; i < windows.size(); i += 2) {
            const double a = windows[i], b = windows[i + 1];
            sl.push_back({{"r_lo", a},
                          {"r_hi", b},
                          {"A", slope_between(P.A(), a, b)},
                          {"dA", slope_between(P.dA(), a, b)},
                          {"d2A", slope_between(P.d2A(), a, b)},
                          {"B", slope_between(P.B(), a, b)},
                          {"dB", slope_between(P.dB(), a, b)},
                          {"d2B", slope_between(P.d2B(), a, b)}});
        }
        s["slopes"] = sl;

        std::ostringstream csv;
        csv << "r,W,LW,A,B,Y,Z\n";
        const auto& g = *P.grid();
        char buf[512];
        for (std::size_t i = 0; i < g.size() && g.r(i) <= csv_r_max; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.r(i), P.W()[i], lw[i],
                          P.A()[i], P.B()[i], P.Y()[i], P.Z()[i]);
            csv << buf;
        }
        write_text(c.path("profiles.csv"), csv.str());
        write_text(c.path("profiles.json"), s.dump(2) + "\n");
        return s;
    };
}

Exec plan_modulation(Obj p) {
    const RegimeMode mode = read_mode(p.child("mode"));
    const double t1 = p.num("t1", 0.3, positive());
    const double t0 = p.num("t0", 0.5, positive());
    if (!(t1 < t0)) throw ValidationError(p.key_path("t1"), "must be < t0");
    const double tol = p.num("tol", 1e-12, positive());
    const double forcing = p.num("forcing", 0.0, any());
    p.done();
    return [=](Context& c) {
        const auto prof = c.profiles();
        ModModel m;
        m.mode = mode;
        m.kappa = prof->kappa();
        m.e0 = prof->e0();
        if (forcing != 0.0) m.forcing = [forcing](double) { return forcing; };
        const ShootResult r = shoot_unstable(t1, t0, m, tol);
        const AppPoint app = app_trajectory(t1, mode, m.kappa);
        ModOptions keep;
        keep.stop_on_exit = false;
        const ModTrajectory tr = integrate_mod({t1, app.lambda, app.b, 0.0, r.a}, t0, m, keep);
        write_trajectory_csv(c.path("modulation.csv"), tr, mode, m.kappa);
        ordered_json s;
        s["a"] = r.a;
        s["bracket"] = {r.lo, r.hi};
        s["trapped"] = r.trapped;
        s["iterations"] = r.iterations;
        s["gamma"] = mode.gamma();
        s["exited"] = tr.exited;
        s["warnings"] = mode.warnings();
        ordered_json t = ordered_json::array();
        for (const auto& x : r.transcript)
            t.push_back({{"a", x.a}, {"face", face_name(x.face)}, {"exit_time", x.exit_time}});
        s["transcript"] = t;
        write_text(c.path("modulation.json"), s.dump(2) + "\n");
        return s;
    };
}

Exec plan_ansatz_scan(Obj p) {
    const RegimeMode mode = read_mode(p.child("mode"));
    const UstarSpec us = read_ustar(p.child("ustar"));
    const double t_min = p.num("t_min", 0.01, positive());
    const double t_max = p.num("t_max", 0.1, positive());
    if (!(t_min < t_max)) throw ValidationError(p.key_path("t_min"), "must be < t_max");
    const long count = p.integer("count", 9, 2, 1000);
    AnsatzOptions ao;
    ao.cells = static_cast<int>(p.integer("cells", ao.cells, 64, 1 << 20));
    ao.lambda_guard = p.num("lambda_guard", ao.lambda_guard, open_interval(0.0, 1.0));
    p.done();
    return [=](Context& c) {
        const auto prof = c.profiles();
        c.say("evolving background");
        auto bg = Background::evolve(mode, us, t_max * 1.01, prof->kappa());
        const Ansatz an(prof, bg, ao);
        std::vector<double> ts;
        for (long k = 0; k < count; ++k)
            ts.push_back(t_min * std::pow(t_max / t_min, static_cast<double>(k) / (count - 1)));
        const ResidualScan scan = residual_scan(an, ts);
        write_residual_csv(c.path("ansatz_scan.csv"), scan);
        ordered_json s;
        s["gamma"] = mode.gamma();
        s["slope_P0_H1"] = scan.slope_P0;
        s["slope_P1_L2"] = scan.slope_P1;
        s["slope_psi0_H1"] = scan.slope_psi0;
        s["slope_psi1_L2"] = scan.slope_psi1;
        s["slope_extraction_L2"] = scan.slope_extraction;
        bool valid = true;
        for (const auto& r : scan.rows) valid = valid && r.valid;
        s["all_valid"] = valid;
        s["warnings"] = mode.warnings();
        write_text(c.path("ansatz_scan.json"), s.dump(2) + "\n");
        return s;
    };
}

Constraints constraints_from(const std::string& s) {
    if (s == "none") return Constraints::None;
    if (s == "Y") return Constraints::Y;
    return Constraints::YZ;
}

Exec plan_coercivity(Obj p) {
    const auto cons = p.choices("constraints", {"none", "Y_and_Z"}, {"none", "Y", "Y_and_Z"});
    const auto modes = p.ints("modes", {100, 200}, 2, 2000, 1);
    ModalOptions base;
    base.radius = p.num("radius", base.radius, positive());
    base.cells = static_cast<int>(p.integer("cells", base.cells, 100, 1 << 20));
    base.lambda = p.num("lambda", base.lambda, positive());
    Obj po = p.child("pohozaev");
    const long fields = po.integer("fields", 20, 0, 100000);
    const auto lambdas = po.nums("lambdas", {1.0, 0.1}, positive(), 0);
    const auto radii = po.nums("radii", {5.0, 20.0}, positive(), 0);
    po.done();
    Obj hc = p.child("h_coercivity");
    const auto bs = hc.nums("b", {0.0, 1e-3}, at_least(0.0), 0);
    const double hR = hc.num("R", 20.0, positive());
    hc.done();
    p.done();
    return [=](Context& c) {
        const auto prof = c.profiles();
        ordered_json s;
        ordered_json reps = ordered_json::array();
        for (const auto& name : cons) {
            c.say("coercivity " + name);
            const auto rep = coercivity_report(*prof, constraints_from(name), modes, base);
            reps.push_back(ordered_json::parse(coercivity_report_json(rep, base)));
        }
        s["reports"] = reps;
        if (fields > 0) {
            std::mt19937_64 rng(c.seed);
            ordered_json po_out = ordered_json::array();
            for (double lam : lambdas) {
                auto g = RadialGrid::make(pohozaev_grid_spec(lam));
                for (double R : radii) {
                    double worst = 0.0;
                    for (long k = 0; k < fields; ++k)
                        worst = std::max(worst,
                                         pohozaev_check(random_smooth_field(g, R * lam, rng), lam, R).residual);
                    po_out.push_back({{"lambda", lam}, {"R", R}, {"fields", fields}, {"max_residual", worst}});
                }
            }
            s["pohozaev"] = po_out;
        }
        ordered_json h = ordered_json::array();
        for (double b : bs) {
            ModalOptions o = base;
            o.modes = modes.back();
            const auto r = h_coercivity(*prof, base.lambda, b, hR, o);
            h.push_back({{"lambda", r.lambda}, {"b", r.b}, {"R", r.R}, {"c_H", r.c_H}});
        }
        s["h_coercivity"] = h;
        write_text(c.path("coercivity.json"), s.dump(2) + "\n");
        return s;
    };
}

Exec plan_benchmark_linear(Obj p) {
    FlatPowerConfig f;
    f.p = p.num("p", f.p, any());
    f.beta = p.num("beta", f.beta, above(2.5));
    f.rho = p.num("rho", f.rho, positive());
    f.t_lo = p.num("t_lo", f.t_lo, positive());
    f.t_hi = p.num("t_hi", f.t_hi, positive());
    if (!(f.t_lo < f.t_hi)) throw ValidationError(p.key_path("t_lo"), "must be < t_hi");
    f.samples = static_cast<int>(p.integer("samples", f.samples, 2, 100000));
    Obj g = p.child("grid");
    f.grid.cells = static_cast<int>(g.integer("cells", f.grid.cells, 16, 1 << 22));
    f.grid.r_max = g.num("r_max", f.grid.r_max, at_least(0.0));
    f.grid.core_step = g.num("core_step", f.grid.core_step, positive());
    g.done();
    f.cfl = p.num("cfl", f.cfl, open_interval(0.0, 1.0));
    p.done();
    return [=](Context& c) {
        const FlatPowerResult r = flat_power_benchmark(f);
        std::ostringstream csv;
        csv << "t,center_ratio\n";
        char buf[128];
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.times[i], r.center_ratio[i]);
            csv << buf;
        }
        write_text(c.path("benchmark_linear.csv"), csv.str());
        ordered_json s;
        s["q_expected"] = r.q_expected;
        s["q_hat"] = r.q_hat;
        s["rel_error"] = r.rel_error;
        s["x2_coeff"] = r.x2_coeff;
        s["x2_bound"] = r.x2_bound;
        write_text(c.path("benchmark_linear.json"), s.dump(2) + "\n");
        return s;
    };
}

Exec plan_simulate(Obj p) {
    BlowupConfig b;
    b.mode = read_mode(p.child("mode"));
    b.ustar = read_ustar(p.child("ustar"));
    b.t1 = p.num("t1", b.t1, positive());
    b.t0 = p.num("t0", b.t0, positive());
    if (!(b.t1 < b.t0)) throw ValidationError(p.key_path("t1"), "must be < t0");
    b.R = p.num("R", b.R, positive());
    b.nodes_per_lambda = static_cast<int>(p.integer("nodes_per_lambda", b.nodes_per_lambda, 4, 100000));
    b.outer_ds = p.num("outer_ds", b.outer_ds, open_interval(0.0, 1.0));
    b.r_margin = p.num("r_margin", b.r_margin, at_least(0.0));
    b.cfl = p.num("cfl", b.cfl, open_interval(0.0, 1.0));
    b.segment_growth = p.num("segment_growth", b.segment_growth, positive());
    b.observe_growth = p.num("observe_growth", b.observe_growth, positive());
    if (b.observe_growth > b.segment_growth)
        throw ValidationError(p.key_path("observe_growth"), "must be <= segment_growth");
    b.accept_fraction = p.num("accept_fraction", b.accept_fraction, open_interval(0.0, 1.0));
    b.max_bisections = static_cast<int>(p.integer("max_bisections", b.max_bisections, 1, 200));
    b.shoot_fanout = static_cast<int>(p.integer("shoot_fanout", b.shoot_fanout, 1, 64));
    b.regrid_factor = p.num("regrid_factor", b.regrid_factor, above(1.0));
    b.background_cells = static_cast<int>(p.integer("background_cells", b.background_cells, 64, 1 << 20));
    p.done();
    return [=](Context& c) {
        const auto prof = c.profiles();
        const BlowupReport rep = run_blowup_experiment(prof, b, c.progress, c.threads);
        write_blowup_csv(c.path("blowup.csv"), rep);
        const std::string manifest = blowup_manifest_json(b, rep);
        write_text(c.path("blowup_run.json"), manifest + "\n");
        ordered_json s = ordered_json::parse(manifest)["result"];
        s["warnings"] = b.mode.warnings();
        return s;
    };
}

Plan make_plan(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("<root>", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("<root>", "must be an object");
    Plan plan;
    Obj root(&j, "");
    if (!root.find("schema_version")) throw ValidationError("schema_version", "is required");
    root.integer("schema_version", kSchemaVersion, kSchemaVersion, kSchemaVersion);
    if (!root.find("command")) throw ValidationError("command", "is required");
    plan.command = root.choice("command", "", kCommands);
    plan.ctx.seed = static_cast<unsigned long long>(root.integer("seed", 1, 0, std::numeric_limits<long>::max()));

    Obj pr = root.child("profiles");
    plan.ctx.popt.grid.cells = static_cast<int>(pr.integer("cells", plan.ctx.popt.grid.cells, 64, 1 << 22));
    plan.ctx.popt.grid.r_max = pr.num("r_max", plan.ctx.popt.grid.r_max, positive());
    plan.ctx.popt.grid.core_step = pr.num("core_step", plan.ctx.popt.grid.core_step, positive());
    plan.ctx.popt.eigen_radius = pr.num("eigen_radius", plan.ctx.popt.eigen_radius, positive());
    plan.ctx.popt.z_radius = pr.num("z_radius", plan.ctx.popt.z_radius, positive());
    plan.ctx.cache = pr.str("cache", "");
    pr.done();

    Obj params = root.child("params");
    if (plan.command == "profiles") plan.exec = plan_profiles(std::move(params));
    else if (plan.command == "modulation") plan.exec = plan_modulation(std::move(params));
    else if (plan.command == "ansatz-scan") plan.exec = plan_ansatz_scan(std::move(params));
    else if (plan.command == "coercivity") plan.exec = plan_coercivity(std::move(params));
    else if (plan.command == "benchmark-linear") plan.exec = plan_benchmark_linear(std::move(params));
    else plan.exec = plan_simulate(std::move(params));
    root.done();
    plan.resolved = root.resolved();
    return plan;
}

}  // namespace

std::string resolve_config_text(const std::string& config_text) { return make_plan(config_text).resolved.dump(2); }

RunOutput run_config_text(const std::string& config_text, const std::string& out_dir, int threads,
                          const ProgressFn& progress) {
    Plan plan = make_plan(config_text);
    if (threads < 1) throw ValidationError("--threads", "must be >= 1");
    if (out_dir.empty()) throw ValidationError("--out", "output directory is required");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    plan.ctx.out = out_dir;
    plan.ctx.threads = threads;
    plan.ctx.progress = progress;
    const ordered_json summary = plan.exec(plan.ctx);

    ordered_json m;
    m["schema_version"] = kSchemaVersion;
    m["library_version"] = kLibraryVersion;
    m["command"] = plan.command;
    m["config"] = plan.resolved;
    ordered_json names = ordered_json::array();
    for (const auto& a : plan.ctx.artifacts) names.push_back(std::filesystem::path(a).filename().string());
    m["artifacts"] = names;
    m["summary"] = summary;
    RunOutput out;
    out.command = plan.command;
    out.summary = summary.dump(2);
    out.artifacts = plan.ctx.artifacts;
    const std::string mpath = (std::filesystem::path(out_dir) / "manifest.json").string();
    write_text(mpath, m.dump(2) + "\n");
    out.artifacts.push_back(mpath);
    return out;
}

RunOutput run_config_file(const std::string& path, const std::string& out_dir, int threads,
                          const ProgressFn& progress) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read config " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return run_config_text(s.str(), out_dir, threads, progress);
}

}  // namespace b5::cli
