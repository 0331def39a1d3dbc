#pragma once

// Command layer behind the modeleig executable: flat key/value run
// configurations, density CSV ingestion, report writers and sweeps. Argument
// parsing proper lives in tools/; everything here is testable without a
// process boundary.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "modeleig/bounds.hpp"
#include "modeleig/comparison.hpp"
#include "modeleig/eigensolve.hpp"
#include "modeleig/errors.hpp"
#include "modeleig/modelspace.hpp"
#include "modeleig/physics.hpp"

namespace modeleig::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { json, csv, human };

struct RunConfig {
    std::string command;
    std::map<std::string, std::string> params;
    Format format = Format::json;
    std::optional<double> tol;
    std::optional<std::string> out;
    bool color = false; // human format only
};

/// Keys accepted by each subcommand (besides the global format/tol/out).
inline const std::map<std::string, std::set<std::string>>& command_keys()
{
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model-eigen", {"K", "N", "r0", "method"}},
        {"check-density", {"density", "K", "N", "lo", "hi", "theta-count", "t-count", "cd-tol"}},
        {"compare", {"density", "K", "N", "r0", "theta", "waive-cd", "quad-tol"}},
        {"rigidity", {"density", "K", "N", "r0", "threshold", "waive-cd", "quad-tol"}},
        {"neumann-bound", {"K", "N", "diam", "j", "method"}},
        {"ess-spectrum", {"K", "N"}},
        {"kk-bound", {"D", "d", "Lambda", "sigma", "diam", "j", "method", "grid-points", "profile"}},
        {"sweep", {"param", "start", "stop", "count", "K", "N", "r0", "workers"}},
    };
    return keys;
}

inline const std::set<std::string>& global_keys()
{
    static const std::set<std::string> keys = {"format", "tol", "out"};
    return keys;
}

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// 17 significant digits, as used in CSV output.
inline std::string format_csv_number(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// JSON number, or the strings "inf"/"-inf"/"nan" where JSON has no literal.
inline nlohmann::ordered_json json_number(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

inline nlohmann::ordered_json json_array(const std::vector<double>& v)
{
    auto a = nlohmann::ordered_json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

// ---------------------------------------------------------------------------
// Parameter access
// ---------------------------------------------------------------------------

inline double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw InvalidInputError("parameter '" + key + "' is not a number: '" + text + "'");
    return v;
}

inline long parse_integer(const std::string& key, const std::string& text)
{
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInputError("parameter '" + key + "' is not an integer: '" + text + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw InvalidInputError("parameter '" + key + "' must be true or false: '" + text + "'");
}

class Params {
  public:
    explicit Params(const RunConfig& cfg) : cfg_(cfg) {}

    bool has(const std::string& k) const { return cfg_.params.count(k) != 0; }

    const std::string& text(const std::string& k) const
    {
        auto it = cfg_.params.find(k);
        if (it == cfg_.params.end()) throw InvalidInputError(cfg_.command + ": missing required parameter '" + k + "'");
        return it->second;
    }

    double number(const std::string& k) const
    {
        const double v = parse_double(k, text(k));
        if (!std::isfinite(v)) throw InvalidInputError("parameter '" + k + "' must be finite");
        return v;
    }

    double number(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }

    long integer(const std::string& k) const { return parse_integer(k, text(k)); }
    long integer(const std::string& k, long fallback) const { return has(k) ? integer(k) : fallback; }

    bool flag(const std::string& k) const { return has(k) && parse_bool(k, text(k)); }

  private:
    const RunConfig& cfg_;
};

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

inline Format parse_format(const std::string& s)
{
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    if (s == "human") return Format::human;
    throw InvalidInputError("unknown output format '" + s + "' (expected json, csv or human)");
}

inline const char* to_string(Format f)
{
    switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::human: return "human";
    }
    return "json";
}

/// Apply one key=value pair (from a file or a flag) to the configuration.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "format") {
        cfg.format = parse_format(value);
    } else if (key == "tol") {
        cfg.tol = parse_double(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else {
        const auto& keys = command_keys();
        auto it = keys.find(cfg.command);
        if (it == keys.end()) throw InvalidInputError("unknown command '" + cfg.command + "'");
        if (!it->second.count(key)) throw InvalidInputError("unknown key '" + key + "' for command " + cfg.command);
        cfg.params[key] = value;
    }
}

/// Read a flat `key = value` file ('#' starts a comment). Keys mirror the
/// command-line flags without the leading dashes.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Density CSV
// ---------------------------------------------------------------------------

/// Read a sampled density from CSV with header "theta,h".
inline Density load_density_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open density file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file, expected header 'theta,h'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "theta,h") throw SchemaError(path + ":1: expected header 'theta,h', found '" + line + "'");

    std::vector<double> theta;
    std::vector<double> h;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        if (std::count(line.begin(), line.end(), ',') != 1) {
            throw SchemaError(where + ": expected 2 columns (theta,h)");
        }
        const auto comma = line.find(',');
        double t = 0.0;
        double v = 0.0;
        try {
            t = parse_double("theta", line.substr(0, comma));
            v = parse_double("h", line.substr(comma + 1));
        } catch (const InvalidInputError&) {
            throw SchemaError(where + ": malformed number in '" + line + "'");
        }
        if (!std::isfinite(t)) throw SchemaError(where + ": theta must be finite");
        if (theta.empty() && t != 0.0) throw MonotonicityError(where + ": theta must start at 0");
        if (!theta.empty() && !(t > theta.back())) throw MonotonicityError(where + ": theta not strictly increasing");
        if (!(v >= 0.0) || !std::isfinite(v)) throw NegativeValueError(where + ": density value must be finite and >= 0");
        theta.push_back(t);
        h.push_back(v);
    }
    if (theta.size() < 2) throw SchemaError(path + ": need at least 2 data rows");
    return Density::sampled(std::move(theta), std::move(h));
}

/// Write a sampled density as CSV; values carry 17 significant digits so a
/// reload reproduces every node exactly.
inline void write_density_csv(std::ostream& out, const Density& density)
{
    const auto* s = density.as_sampled();
    if (!s) throw InvalidInputError("only sampled densities can be written as CSV");
    out << "theta,h\n";
    for (std::size_t i = 0; i < s->theta.size(); ++i) {
        out << format_csv_number(s->theta[i]) << ',' << format_csv_number(density.scale() * s->h[i]) << '\n';
    }
}

inline void write_density_csv(const std::string& path, const Density& density)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write density file '" + path + "'");
    write_density_csv(out, density);
}

/// Density argument: a CSV path, or "model:K,N" / "model:K,N,scale".
inline Density resolve_density(const std::string& spec)
{
    if (spec.rfind("model:", 0) == 0) {
        std::vector<double> v;
        std::stringstream ss(spec.substr(6));
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(parse_double("density", item));
        if (v.size() != 2 && v.size() != 3) throw InvalidInputError("density 'model:K,N[,scale]' needs 2 or 3 numbers");
        return Density::model(v[0], v[1], v.size() == 3 ? v[2] : 1.0);
    }
    return load_density_csv(spec);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Report {
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    nlohmann::ordered_json result = nlohmann::ordered_json::object();
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
    /// Sweeps carry a table instead of scalar results.
    std::vector<std::string> table_header;
    std::vector<std::vector<std::string>> table_rows;
};

namespace detail {

inline std::string scalar_text(const nlohmann::ordered_json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_csv_number(v.get<double>());
    if (v.is_null()) return "";
    return v.dump();
}

inline void flatten(const nlohmann::ordered_json& v, const std::string& prefix,
                    std::vector<std::pair<std::string, std::string>>& out)
{
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (v.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ";" : "") + scalar_text(v[i]);
        out.emplace_back(prefix, joined);
    } else {
        out.emplace_back(prefix, scalar_text(v));
    }
}

inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

} // namespace detail

inline void write_report(std::ostream& out, const RunConfig& cfg, const Report& r)
{
    const bool table = !r.table_header.empty();
    if (cfg.format == Format::json) {
        nlohmann::ordered_json doc;
        doc["command"] = cfg.command;
        doc["inputs"] = r.inputs;
        if (table) {
            auto rows = nlohmann::ordered_json::array();
            for (const auto& row : r.table_rows) {
                nlohmann::ordered_json o;
                for (std::size_t i = 0; i < row.size(); ++i) o[r.table_header[i]] = row[i];
                rows.push_back(std::move(o));
            }
            doc["result"] = {{"rows", rows}};
        } else {
            doc["result"] = r.result;
        }
        doc["diagnostics"] = r.diagnostics;
        doc["version"] = kVersion;
        out << doc.dump(2) << '\n';
        return;
    }
    if (cfg.format == Format::csv) {
        if (table) {
            for (std::size_t i = 0; i < r.table_header.size(); ++i) out << (i ? "," : "") << r.table_header[i];
            out << '\n';
            for (const auto& row : r.table_rows) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_quote(row[i]);
                out << '\n';
            }
            return;
        }
        std::vector<std::pair<std::string, std::string>> kv;
        detail::flatten(r.result, "", kv);
        out << "key,value\n";
        for (const auto& [k, v] : kv) out << detail::csv_quote(k) << ',' << detail::csv_quote(v) << '\n';
        return;
    }
    // human
    const std::string bold = cfg.color ? "\x1b[1m" : "";
    const std::string reset = cfg.color ? "\x1b[0m" : "";
    out << bold << cfg.command << reset << '\n';
    if (table) {
        for (std::size_t i = 0; i < r.table_header.size(); ++i) out << (i ? "  " : "") << r.table_header[i];
        out << '\n';
        for (const auto& row : r.table_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "  " : "") << row[i];
            out << '\n';
        }
        return;
    }
    std::vector<std::pair<std::string, std::string>> kv;
    detail::flatten(r.result, "", kv);
    std::size_t width = 0;
    for (const auto& p : kv) width = std::max(width, p.first.size());
    for (const auto& [k, v] : kv) out << "  " << bold << k << reset << std::string(width - k.size() + 2, ' ') << v << '\n';
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

inline double solver_tol(const RunConfig& cfg) { return cfg.tol.value_or(1e-8); }

inline BoundMethod parse_bound_method(const std::string& s)
{
    if (s == "solver") return BoundMethod::solver;
    if (s == "closed_form" || s == "closed-form") return BoundMethod::closed_form;
    throw InvalidInputError("method must be 'solver' or 'closed_form', got '" + s + "'");
}

inline void put_solution_diagnostics(nlohmann::ordered_json& d, const EigenSolution& s)
{
    d["method"] = to_string(s.method);
    if (s.method == EigenMethod::matrix) {
        d["refinement_history"] = json_array(s.refinement_history);
        d["extrapolated_history"] = json_array(s.extrapolated_history);
    } else {
        d["bisection_steps"] = s.refinement_history.size();
    }
    d["flux_residual"] = json_number(s.flux_residual);
    d["support_start"] = json_number(s.support_start);
    d["grid_nodes"] = s.grid.size();
}

inline Report run_model_eigen(const RunConfig& cfg)
{
    const Params p(cfg);
    const double K = p.number("K");
    const double N = p.number("N");
    const double r0 = p.number("r0");
    const std::string method = p.has("method") ? p.text("method") : "matrix";
    const double tol = solver_tol(cfg);
    Report r;
    r.inputs = {{"K", K}, {"N", N}, {"r0", r0}, {"method", method}};
    const Density h = Density::model(K, N);
    EigenSolution sol;
    if (method == "matrix") {
        sol = first_dirichlet_eigen(h, r0, tol);
    } else if (method == "shooting") {
        sol = shooting_dirichlet_eigen(h, r0, tol);
    } else {
        throw InvalidInputError("method must be 'matrix' or 'shooting', got '" + method + "'");
    }
    r.result["lambda"] = json_number(sol.lambda);
    const BoundValue b = closed_form_bound(K, N, r0);
    if (b.exact) r.result["exact_reference"] = json_number(b.value);
    r.result["closed_form_bound"] = json_number(b.value);
    r.result["closed_form_exact"] = b.exact;
    r.result["formula"] = to_string(b.formula);
    r.diagnostics["tol"] = tol;
    put_solution_diagnostics(r.diagnostics, sol);
    return r;
}

inline Report run_check_density(const RunConfig& cfg)
{
    const Params p(cfg);
    const Density h = resolve_density(p.text("density"));
    const double K = p.number("K");
    const double N = p.number("N");
    const double lo = p.number("lo", 0.0);
    const double hi = p.has("hi") ? p.number("hi") : h.right_endpoint();
    CdLattice lattice;
    lattice.theta_count = static_cast<std::size_t>(std::max(0L, p.integer("theta-count", 64)));
    lattice.t_count = static_cast<std::size_t>(std::max(0L, p.integer("t-count", 17)));
    const double tol = p.number("cd-tol", 1e-9);
    const CdCheckReport rep = check_cd_density(h, K, N, lo, hi, lattice, tol);
    Report r;
    r.inputs = {{"density", p.text("density")}, {"K", K}, {"N", N}, {"lo", lo}, {"hi", json_number(hi)}};
    r.result["satisfied"] = rep.satisfied;
    r.result["worst_violation"] = json_number(rep.worst_violation);
    r.result["witness"] = {{"theta0", rep.witness.theta0}, {"theta1", rep.witness.theta1}, {"t", rep.witness.t}};
    r.result["triples_checked"] = rep.triples_checked;
    r.diagnostics = {{"tolerance", tol}, {"theta_count", lattice.theta_count}, {"t_count", lattice.t_count}};
    return r;
}

inline ComparisonOptions comparison_options(const RunConfig& cfg, const Params& p)
{
    ComparisonOptions o;
    o.solver_tol = cfg.tol.value_or(1e-10);
    o.quadrature.rel_tol = p.number("quad-tol", 1e-10);
    o.waive_cd_check = p.flag("waive-cd");
    return o;
}

inline Report run_compare(const RunConfig& cfg)
{
    const Params p(cfg);
    const Density h = resolve_density(p.text("density"));
    const double K = p.number("K");
    const double N = p.number("N");
    const double r0 = p.number("r0");
    const double theta = p.number("theta", r0);
    const ComparisonOptions o = comparison_options(cfg, p);
    const ComparisonReport c = comparison_residual(h, K, N, r0, theta, o);
    Report r;
    r.inputs = {{"density", p.text("density")}, {"K", K}, {"N", N}, {"r0", r0}, {"theta", theta}};
    r.result = {{"theta", c.theta},     {"lhs", json_number(c.lhs)}, {"rhs", json_number(c.rhs)},
                {"gap", json_number(c.gap)}, {"relative_gap", json_number(c.relative_gap)}};
    r.diagnostics = {{"lambda", json_number(c.lambda)},
                     {"composed_tolerance", c.tolerance},
                     {"solver_tol", o.solver_tol},
                     {"quad_tol", o.quadrature.rel_tol},
                     {"cd_check", o.waive_cd_check ? "waived" : "passed"}};
    return r;
}

inline Report run_rigidity(const RunConfig& cfg)
{
    const Params p(cfg);
    const Density h = resolve_density(p.text("density"));
    const double K = p.number("K");
    const double N = p.number("N");
    const double r0 = p.number("r0");
    const double threshold = p.number("threshold", 1e-6);
    const ComparisonOptions o = comparison_options(cfg, p);
    const RigidityVerdict v = rigidity_check(h, K, N, r0, threshold, o);
    Report r;
    r.inputs = {{"density", p.text("density")}, {"K", K}, {"N", N}, {"r0", r0}, {"threshold", threshold}};
    r.result["rigid"] = v.rigid;
    r.result["fitted_c"] = v.fitted_c ? json_number(*v.fitted_c) : nlohmann::ordered_json(nullptr);
    r.result["max_relative_density_deviation"] = json_number(v.max_relative_density_deviation);
    r.result["relative_gap"] = json_number(v.relative_gap);
    r.diagnostics = {{"solver_tol", o.solver_tol}, {"quad_tol", o.quadrature.rel_tol}};
    return r;
}

inline Report run_neumann_bound(const RunConfig& cfg)
{
    const Params p(cfg);
    const double K = p.number("K");
    const double N = p.number("N");
    const double diam = p.number("diam");
    const long j = p.integer("j", 1);
    if (j < 1 || j > 1000000) throw DomainError("mode index j must be a positive integer");
    const BoundMethod m = parse_bound_method(p.has("method") ? p.text("method") : "solver");
    const double tol = solver_tol(cfg);
    const double value = neumann_upper_bound(K, N, diam, static_cast<int>(j), m, tol);
    Report r;
    r.inputs = {{"K", K}, {"N", N}, {"diam", diam}, {"j", j}, {"method", to_string(m)}};
    r.result = {{"bound", json_number(value)}, {"r0", diam / (2.0 * static_cast<double>(j))}};
    r.diagnostics = {{"tol", tol}};
    return r;
}

inline Report run_ess_spectrum(const RunConfig& cfg)
{
    const Params p(cfg);
    const double K = p.number("K");
    const double N = p.number("N");
    Report r;
    r.inputs = {{"K", K}, {"N", N}};
    r.result = {{"threshold", json_number(essential_spectrum_threshold(K, N))}};
    return r;
}

inline Report run_kk_bound(const RunConfig& cfg)
{
    const Params p(cfg);
    CompactificationSpec s;
    const long D = p.integer("D");
    const long d = p.integer("d");
    if (D < 3 || D > 1000 || d < 1 || d >= D) throw DomainError("dimensions must satisfy D > d >= 1 and 2 < D <= 1000");
    s.D = static_cast<int>(D);
    s.d = static_cast<int>(d);
    s.Lambda = p.number("Lambda");
    s.sigma_w = p.number("sigma");
    s.diam = p.number("diam");
    const long j = p.integer("j", 1);
    if (j < 1 || j > 1000000) throw DomainError("mode index j must be a positive integer");
    const BoundMethod m = parse_bound_method(p.has("method") ? p.text("method") : "closed_form");
    KkSearch search;
    search.grid_points = static_cast<std::size_t>(std::max(0L, p.integer("grid-points", 200)));
    search.keep_profile = p.flag("profile");
    search.solver_tol = solver_tol(cfg);
    const KkBoundResult k = kk_mass_bound_optimal(s, static_cast<int>(j), m, search);
    Report r;
    r.inputs = {{"D", D}, {"d", d}, {"Lambda", s.Lambda}, {"sigma", s.sigma_w}, {"diam", s.diam}, {"j", j},
                {"method", to_string(m)}};
    r.result = {{"j", k.j},           {"N_star", json_number(k.N_star)}, {"K_star", json_number(k.K_star)},
                {"bound", json_number(k.bound)}, {"exact", k.exact},     {"bracketed", k.bracketed}};
    if (search.keep_profile) {
        auto prof = nlohmann::ordered_json::array();
        for (const auto& [N, v] : k.profile) prof.push_back({{"N", json_number(N)}, {"bound", json_number(v)}});
        r.result["profile"] = prof;
    }
    r.diagnostics = {{"grid_points", search.grid_points}, {"golden_rel_tol", search.golden_rel_tol}};
    if (!k.diagnostic.empty()) r.diagnostics["note"] = k.diagnostic;
    if (m == BoundMethod::solver) r.diagnostics["solver_tol"] = search.solver_tol;
    return r;
}

/// Run `task(i)` for i in [0, count) on a bounded pool; results land by index.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task)
{
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < count; i = next++) task(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
    loop();
    for (auto& t : pool) t.join();
}

inline Report run_sweep(const RunConfig& cfg)
{
    const Params p(cfg);
    const std::string param = p.text("param");
    if (param != "K" && param != "N" && param != "r0") throw InvalidInputError("sweep param must be K, N or r0");
    const double start = p.number("start");
    const double stop = p.number("stop");
    const long count = p.integer("count");
    if (count < 0 || count > 100000) throw InvalidInputError("sweep count must lie in [0, 100000]");
    std::map<std::string, double> fixed;
    for (const char* k : {"K", "N", "r0"}) {
        if (param == k) {
            if (p.has(k)) throw InvalidInputError(std::string("swept parameter '") + k + "' must not also be fixed");
        } else {
            fixed[k] = p.number(k);
        }
    }
    const double tol = solver_tol(cfg);
    const long hw = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
    const long workers = p.integer("workers", std::min(hw, 8L));
    if (workers < 1) throw InvalidInputError("workers must be positive");

    const auto n = static_cast<std::size_t>(count);
    std::vector<std::vector<std::string>> rows(n);
    parallel_for(n, static_cast<std::size_t>(workers), [&](std::size_t i) {
        const double x = n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
        std::map<std::string, double> v = fixed;
        v[param] = x;
        std::vector<std::string> row{format_csv_number(x), "", "", "", ""};
        try {
            const BoundValue b = closed_form_bound(v["K"], v["N"], v["r0"]);
            row[2] = format_csv_number(b.value);
            row[3] = b.exact ? "true" : "false";
            row[1] = format_csv_number(first_dirichlet_eigen(Density::model(v["K"], v["N"]), v["r0"], tol).lambda);
        } catch (const Error& e) {
            row[4] = e.code() + ": " + e.what();
        }
        rows[i] = std::move(row);
    });

    Report r;
    r.inputs = {{"param", param}, {"start", start}, {"stop", stop}, {"count", count}};
    for (const auto& [k, v] : fixed) r.inputs[k] = v;
    r.diagnostics = {{"tol", tol}};
    r.table_header = {param, "lambda", "bound", "bound_exact", "error"};
    r.table_rows = std::move(rows);
    return r;
}

} // namespace detail

/// Dispatch a configuration; throws modeleig::Error on failure.
inline Report execute(const RunConfig& cfg)
{
    if (!command_keys().count(cfg.command)) throw InvalidInputError("unknown command '" + cfg.command + "'");
    if (cfg.tol) modeleig::detail::require_tolerance(*cfg.tol);
    if (cfg.command == "model-eigen") return detail::run_model_eigen(cfg);
    if (cfg.command == "check-density") return detail::run_check_density(cfg);
    if (cfg.command == "compare") return detail::run_compare(cfg);
    if (cfg.command == "rigidity") return detail::run_rigidity(cfg);
    if (cfg.command == "neumann-bound") return detail::run_neumann_bound(cfg);
    if (cfg.command == "ess-spectrum") return detail::run_ess_spectrum(cfg);
    if (cfg.command == "kk-bound") return detail::run_kk_bound(cfg);
    return detail::run_sweep(cfg);
}

/// Run a configuration, writing the report to `out` (or cfg.out) and errors
/// to `err`. Returns the process exit status: 0 success, 2 precondition
/// violation, 3 numerical nonconvergence, 1 anything unexpected.
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        const Report r = execute(cfg);
        if (cfg.out) {
            std::ofstream f(*cfg.out);
            if (!f) throw IoError("cannot write report to '" + *cfg.out + "'");
            write_report(f, cfg, r);
        } else {
            write_report(out, cfg, r);
        }
        return 0;
    } catch (const Error& e) {
        err << "modeleig: error [" << e.code() << "]: " << e.what() << '\n';
        return e.exit_status();
    } catch (const std::exception& e) {
        err << "modeleig: internal error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace modeleig::cli
