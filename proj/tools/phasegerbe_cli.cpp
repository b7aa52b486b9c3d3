// Command-line driver: eigensolves, phase-space lifts and residual sweeps,
// cocycle tables over Cech covers, gauge checks, WKB comparisons, orbit
// areas and classical flows. Reports are deterministic JSON (sorted keys,
// no timestamps); wall time goes to stderr only.

#include <chrono>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasegerbe/phasegerbe.hpp"

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "phasegerbe 0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value configuration: file lines (with # comments) overridden by
/// repeated --set key=value flags. Every key a command reads is recorded
/// with its resolved value so the report can echo the full configuration,
/// defaults included; unknown keys are rejected by name.
class Config {
public:
    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r\n");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r\n");
                return s.substr(a, b - a + 1);
            };
            if (strip(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
            const std::string key = strip(line.substr(0, eq));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            values_[key] = strip(line.substr(eq + 1));
        }
    }

    void set_override(const std::string& kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got: " + kv);
        values_[kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        const auto it = values_.find(key);
        const std::string v = it == values_.end() ? fallback : it->second;
        resolved_[key] = v;
        return v;
    }

    double get_double(const std::string& key, double fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            resolved_[key] = fallback;
            return fallback;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            resolved_[key] = v;
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not a number: " + it->second);
        }
    }

    int get_int(const std::string& key, int fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            resolved_[key] = fallback;
            return fallback;
        }
        try {
            std::size_t used = 0;
            const int v = std::stoi(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            resolved_[key] = v;
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not an integer: " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            resolved_[key] = fallback;
            return fallback;
        }
        if (it->second == "true" || it->second == "1") {
            resolved_[key] = true;
            return true;
        }
        if (it->second == "false" || it->second == "0") {
            resolved_[key] = false;
            return false;
        }
        throw ConfigError("config key '" + key + "': expected true/false: " + it->second);
    }

    std::vector<double> get_double_list(const std::string& key, const std::string& fallback) {
        const std::string raw = get_string(key, fallback);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': bad list entry: " + item);
            }
        }
        return out;
    }

    /// Reject keys nobody consumed: catches typos before results go out.
    void reject_unknown() const {
        for (const auto& [k, v] : values_)
            if (!resolved_.contains(k)) throw ConfigError("unknown config key: " + k);
    }

    const json& resolved() const { return resolved_; }

private:
    std::map<std::string, std::string> values_;
    json resolved_ = json::object();
};

pg::HamiltonianSpec hamiltonian_from(Config& cfg) {
    const double mass = cfg.get_double("mass", 1.0);
    const double hbar = cfg.get_double("hbar", 1.0);
    const std::vector<double> pot = cfg.get_double_list("potential", "0,0,0.5");
    return pg::HamiltonianSpec(mass, pot, hbar);
}

pg::Grid2D grid_from(Config& cfg) {
    pg::PhaseSpaceDomain dom(cfg.get_double("q_min", -8.0), cfg.get_double("q_max", 8.0),
                             cfg.get_double("p_min", -8.0), cfg.get_double("p_max", 8.0),
                             cfg.get_double("hbar", 1.0));
    return pg::Grid2D(dom, cfg.get_int("nq", 512), cfg.get_int("np", 512));
}

json report_shell(const std::string& command, const Config& cfg) {
    json r;
    r["schema_version"] = 1;
    r["version"] = kVersion;
    r["command"] = command;
    r["config"] = cfg.resolved();
    return r;
}

void emit(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file: " + out_path);
        out << payload;
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json poly_json(const pg::BivariatePolynomial& f) {
    json terms = json::array();
    for (const auto& t : f.terms()) terms.push_back({{"j", t.j}, {"k", t.k}, {"c", t.c}});
    return json{{"expr", f.to_string()}, {"terms", terms}};
}

std::vector<std::string> split_list(const std::string& raw, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = item.find_last_not_of(" \t");
        out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

// ---------------------------------------------------------------- commands

int cmd_solve(Config& cfg, const std::string& out_path, const std::string& format) {
    const pg::HamiltonianSpec H = hamiltonian_from(cfg);
    const double a = cfg.get_double("box_min", -10.0);
    const double b = cfg.get_double("box_max", 10.0);
    const int n = cfg.get_int("box_n", 2000);
    const int k = cfg.get_int("k_states", 6);
    cfg.reject_unknown();

    pg::EigenSolution sol;
    if (k > 0) sol = pg::solve_eigen(H, a, b, n, k);
    if (format == "csv") {
        std::ostringstream csv;
        csv << "q";
        for (int j = 0; j < k; ++j) csv << ",psi" << j;
        csv << "\n";
        const int rows = k > 0 ? static_cast<int>(sol.states[0].q.size()) : 0;
        for (int i = 0; i < rows; ++i) {
            csv << fmt(sol.states[0].q[i]);
            for (int j = 0; j < k; ++j) csv << "," << fmt(sol.states[j].values[i].real());
            csv << "\n";
        }
        emit(out_path, csv.str());
        return 0;
    }
    json r = report_shell("solve", cfg);
    r["results"]["energies"] = sol.energies;
    r["results"]["grid"] = {{"q_min", a}, {"q_max", b}, {"n", n}};
    r["results"]["warnings"] = sol.warnings;
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_residual(Config& cfg, const std::string& out_path, const std::string& format) {
    if (format == "csv") throw ConfigError("residual: only json output is supported");
    const pg::HamiltonianSpec H = hamiltonian_from(cfg);
    const pg::Grid2D grid = grid_from(cfg);
    const int state = cfg.get_int("state", 0);
    const double margin = cfg.get_double("margin_fraction", 0.1);
    const int order = cfg.get_int("stencil_order", 4);
    const std::string f_raw = cfg.get_string("f_list", "0 | 0.5*q*p | q*p");
    cfg.reject_unknown();

    const pg::EigenSolution sol = pg::solve_eigen(H, grid.domain().q_min, grid.domain().q_max,
                                                  grid.nq(), state + 1);
    const pg::Wavefunction1D& psi = sol.states[state];
    const double E = sol.energies[state];

    json entries = json::array();
    for (const std::string& text : split_list(f_raw, '|')) {
        json entry;
        entry["f"] = text;
        try {
            const pg::BivariatePolynomial f = pg::parse_polynomial(text);
            const pg::ConnectionPrime conn = pg::connection_from_generating(f, H.hbar);
            const pg::ProbabilityDistribution2D dist = pg::lift(psi, f, grid);
            entry["E"] = E;
            entry["residual"] = pg::schrodinger_residual(conn, H, dist, E, margin, order);
        } catch (const std::exception& e) {
            entry["error"] = e.what(); // per-entry isolation: the sweep goes on
        }
        entries.push_back(entry);
    }
    json r = report_shell("residual", cfg);
    r["results"]["entries"] = entries;
    r["results"]["grid"] = {{"nq", grid.nq()}, {"np", grid.np()}};
    r["results"]["margins"] = margin;
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_lift(Config& cfg, const std::string& out_path, const std::string& format) {
    const pg::HamiltonianSpec H = hamiltonian_from(cfg);
    const pg::Grid2D grid = grid_from(cfg);
    const int state = cfg.get_int("state", 0);
    const std::string f_text = cfg.get_string("f", "0.5*q*p");
    cfg.reject_unknown();

    const pg::BivariatePolynomial f = pg::parse_polynomial(f_text);
    const pg::EigenSolution sol = pg::solve_eigen(H, grid.domain().q_min, grid.domain().q_max,
                                                  grid.nq(), state + 1);
    const pg::ProbabilityDistribution2D dist = pg::lift(sol.states[state], f, grid);

    if (format == "csv") {
        std::ostringstream csv;
        csv << "q,p,abs_psi,arg_psi\n";
        for (int i = 0; i < grid.nq(); ++i)
            for (int j = 0; j < grid.np(); ++j)
                csv << fmt(grid.q(i)) << "," << fmt(grid.p(j)) << ","
                    << fmt(std::abs(dist.values(i, j))) << ","
                    << fmt(std::arg(dist.values(i, j))) << "\n";
        emit(out_path, csv.str());
        return 0;
    }
    double mod_min = 1e300, mod_max = 0.0;
    for (int i = 0; i < grid.nq(); ++i)
        for (int j = 0; j < grid.np(); ++j) {
            const double m = std::abs(dist.values(i, j));
            mod_min = std::min(mod_min, m);
            mod_max = std::max(mod_max, m);
        }
    json r = report_shell("lift", cfg);
    r["results"]["f"] = poly_json(f);
    r["results"]["E"] = sol.energies[state];
    r["results"]["grid"] = {{"nq", grid.nq()}, {"np", grid.np()}};
    r["results"]["modulus_min"] = mod_min;
    r["results"]["modulus_max"] = mod_max;
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_cocycle(Config& cfg, const std::string& out_path, const std::string& format,
                std::uint64_t seed) {
    if (format == "csv") throw ConfigError("cocycle: only json output is supported");
    const double hbar = cfg.get_double("hbar", 1.0);
    pg::PhaseSpaceDomain dom(cfg.get_double("q_min", -8.0), cfg.get_double("q_max", 8.0),
                             cfg.get_double("p_min", -8.0), cfg.get_double("p_max", 8.0), hbar);
    const int nx = cfg.get_int("cover_nx", 3);
    const int ny = cfg.get_int("cover_ny", 3);
    const double frac = cfg.get_double("overlap_fraction", 0.25);
    const std::string rule_name = cfg.get_string("point_rule", "seeded");
    cfg.reject_unknown();
    if (rule_name != "seeded" && rule_name != "center")
        throw ConfigError("config key 'point_rule': expected seeded or center");
    const pg::PointRule rule = rule_name == "center" ? pg::PointRule::center : pg::PointRule::seeded;

    const pg::CechCover cover = pg::build_cover(dom, nx, ny, frac);
    const pg::OverlapIndex pairs = pg::enumerate_overlaps(cover, 2);
    const pg::OverlapIndex triples = pg::enumerate_overlaps(cover, 3);
    const pg::OverlapIndex quads = pg::enumerate_overlaps(cover, 4);

    json patches = json::array();
    for (const pg::Patch& p : cover.patches)
        patches.push_back({{"index", p.index},
                           {"q_lo", p.bounds.q_lo},
                           {"q_hi", p.bounds.q_hi},
                           {"p_lo", p.bounds.p_lo},
                           {"p_hi", p.bounds.p_hi}});

    json table = json::array();
    for (std::size_t t = 0; t < triples.entries.size(); ++t) {
        const pg::Overlap& o = triples.entries[t];
        const pg::Point2 x = pg::sample_point(
            o.rect, pg::detail::splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (t + 1))), rule);
        std::vector<pg::Point2> reps;
        for (int idx : o.indices)
            reps.push_back(pg::sample_point(
                cover.patches[idx].bounds,
                pg::detail::splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (idx + 1))), rule));
        const double area = pg::signed_polygon_area(reps);
        const double phase = -area / hbar;
        const pg::Complex g = std::exp(pg::Complex(0.0, phase));
        table.push_back({{"indices", o.indices},
                         {"point", {{"q", x.q}, {"p", x.p}}},
                         {"phase", phase},
                         {"g_re", g.real()},
                         {"g_im", g.imag()}});
    }

    auto tuples_of = [](const pg::OverlapIndex& idx) {
        json out = json::array();
        for (const pg::Overlap& o : idx.entries) out.push_back(o.indices);
        return out;
    };
    json r = report_shell("cocycle", cfg);
    r["config"]["seed"] = seed;
    r["results"]["patches"] = patches;
    r["results"]["pair_overlaps"] = tuples_of(pairs);
    r["results"]["triple_overlaps"] = tuples_of(triples);
    r["results"]["quadruple_overlaps"] = tuples_of(quads);
    r["results"]["triples"] = table;
    if (triples.entries.empty()) r["results"]["note"] = "no triple overlaps";
    if (!quads.entries.empty())
        r["results"]["max_quadruple_deviation"] =
            pg::verify_cocycle_condition(cover, rule, seed, hbar).max_deviation;
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_gauge(Config& cfg, const std::string& out_path, const std::string& format) {
    if (format == "csv") throw ConfigError("gauge: only json output is supported");
    const std::string f_text = cfg.get_string("f", "0.5*q*p");
    cfg.reject_unknown();
    const pg::BivariatePolynomial f = pg::parse_polynomial(f_text);

    const pg::Separability sep = pg::delta0_solvable(f);
    const pg::GaugeParameter1 phi = pg::phi_for_equivalence(f);
    const pg::EquivalenceCertificate cert = pg::verify_delta1_equivalence(f);

    json r = report_shell("gauge", cfg);
    r["results"]["f"] = poly_json(f);
    r["results"]["delta0_solvable"] = sep.solvable;
    if (sep.solvable)
        r["results"]["decomposition"] = {{"g_of_q", poly_json(sep.g_of_q)},
                                         {"h_of_p", poly_json(sep.h_of_p)}};
    r["results"]["phi_components"] = {{"phi_q", poly_json(phi.phi_q)},
                                      {"phi_p", poly_json(phi.phi_p)}};
    r["results"]["equivalence_certificate"] = cert.exact ? "exact" : "failed";
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_wkb(Config& cfg, const std::string& out_path, const std::string& format) {
    if (format == "csv") throw ConfigError("wkb: only json output is supported");
    const pg::HamiltonianSpec H = hamiltonian_from(cfg);
    const int state = cfg.get_int("state", 10);
    const double a = cfg.get_double("box_min", -10.0);
    const double b = cfg.get_double("box_max", 10.0);
    const int n = cfg.get_int("box_n", 2000);
    const double interior = cfg.get_double("interior_fraction", 0.6);
    cfg.reject_unknown();

    const pg::EigenSolution sol = pg::solve_eigen(H, a, b, n, state + 1);
    const double E = sol.energies[state];
    const pg::WkbResult wkb = pg::wkb_wavefunction(H, E, sol.states[state].q);
    const pg::WkbComparison cmp = pg::compare_wkb_envelope(H, sol.states[state], E, interior);

    json r = report_shell("wkb", cfg);
    r["results"]["E"] = E;
    r["results"]["allowed"] = {{"q_left", wkb.q_left}, {"q_right", wkb.q_right}};
    r["results"]["intervals"] = cmp.intervals;
    r["results"]["max_envelope_error"] = cmp.max_rel_interval_error;
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_orbit(Config& cfg, const std::string& out_path, const std::string& format) {
    const pg::HamiltonianSpec H = hamiltonian_from(cfg);
    const std::vector<double> energies = cfg.get_double_list("energies", "1,2,3,4,5");
    const bool compare = cfg.get_bool("compare_eigen", false);
    const double a = cfg.get_double("box_min", -10.0);
    const double b = cfg.get_double("box_max", 10.0);
    const int n = cfg.get_int("box_n", 2000);
    cfg.reject_unknown();

    std::optional<pg::EigenSolution> sol;
    if (compare) sol = pg::solve_eigen(H, a, b, n, 20);

    json table = json::array();
    std::ostringstream csv;
    csv << "E,area,bohr_sommerfeld" << (compare ? ",eigencount" : "") << "\n";
    for (double E : energies) {
        const double area = pg::closed_orbit_area(H, E);
        const int count = pg::bohr_sommerfeld_count(H, E);
        json row = {{"E", E}, {"area", area}, {"bohr_sommerfeld", count}};
        csv << fmt(E) << "," << fmt(area) << "," << count;
        if (compare) {
            int ec = 0;
            for (double en : sol->energies)
                if (en <= E) ++ec;
            row["eigencount"] = ec;
            csv << "," << ec;
        }
        csv << "\n";
        table.push_back(row);
    }
    if (format == "csv") {
        emit(out_path, csv.str());
        return 0;
    }
    json r = report_shell("orbit", cfg);
    r["results"]["table"] = table;
    emit(out_path, r.dump(2));
    return 0;
}

int cmd_flow(Config& cfg, const std::string& out_path, const std::string& format) {
    const pg::HamiltonianSpec H = hamiltonian_from(cfg);
    const double q0 = cfg.get_double("q0", 0.0);
    const double p0 = cfg.get_double("p0", 1.0);
    const double duration = cfg.get_double("duration", 1.0);
    const double dt = cfg.get_double("dt", 1e-3);
    pg::FlowOptions opts;
    opts.drift_tolerance = cfg.get_double("drift_tolerance", 1e-6);
    cfg.reject_unknown();

    const pg::Trajectory traj = pg::hamilton_flow(H, {q0, p0}, duration, dt, opts);
    if (format == "csv") {
        std::ostringstream csv;
        csv << "t,q,p\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            csv << fmt(traj.times[i]) << "," << fmt(traj.points[i].q) << ","
                << fmt(traj.points[i].p) << "\n";
        emit(out_path, csv.str());
        return 0;
    }
    json r = report_shell("flow", cfg);
    r["results"]["samples"] = traj.times.size();
    r["results"]["energy"] = traj.energy;
    r["results"]["max_energy_drift"] = traj.max_energy_drift;
    r["results"]["end"] = {{"q", traj.points.back().q}, {"p", traj.points.back().p}};
    emit(out_path, r.dump(2));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-space gerbe toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "json";
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "flat key=value configuration file");
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", seed, "seed for deterministic point sampling");
    app.add_option("--threads", threads, "worker threads (results are independent of n)")
        ->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "override config entries, key=value")->take_all();

    for (const char* name : {"solve", "residual", "lift", "cocycle", "gauge", "wkb", "orbit", "flow"})
        app.add_subcommand(name)->fallthrough(); // global flags may follow the command

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const auto started = std::chrono::steady_clock::now();
    int rc = 0;
    try {
        Config cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const std::string& kv : overrides) cfg.set_override(kv);

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "solve")
            rc = cmd_solve(cfg, out_path, format);
        else if (cmd == "residual")
            rc = cmd_residual(cfg, out_path, format);
        else if (cmd == "lift")
            rc = cmd_lift(cfg, out_path, format);
        else if (cmd == "cocycle")
            rc = cmd_cocycle(cfg, out_path, format, seed);
        else if (cmd == "gauge")
            rc = cmd_gauge(cfg, out_path, format);
        else if (cmd == "wkb")
            rc = cmd_wkb(cfg, out_path, format);
        else if (cmd == "orbit")
            rc = cmd_orbit(cfg, out_path, format);
        else if (cmd == "flow")
            rc = cmd_flow(cfg, out_path, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const pg::precondition_error& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 3;
    } catch (const pg::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    std::cerr << "wall time: " << elapsed.count() << " s\n";
    return rc;
}
