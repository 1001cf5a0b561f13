#include "hill/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hill/resolvent.hpp"

namespace hill::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

std::optional<long long> to_integer(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
}

std::optional<double> to_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::Decay: return "decay";
        case Experiment::Localization: return "localization";
        case Experiment::Lemmas: return "lemmas";
        case Experiment::Reconstruct: return "reconstruct";
        case Experiment::RhoStudy: return "rho_study";
        case Experiment::Projections: return "projections";
    }
    return "?";
}

Experiment parse_experiment(const std::string& text) {
    for (Experiment e : {Experiment::Decay, Experiment::Localization, Experiment::Lemmas, Experiment::Reconstruct,
                         Experiment::RhoStudy, Experiment::Projections}) {
        if (to_string(e) == text) return e;
    }
    if (text == "spectrum") return Experiment::Localization;
    if (text == "rho-study") return Experiment::RhoStudy;
    throw InvalidArgument("unknown experiment '" + text +
                          "' (expected decay, localization, lemmas, reconstruct, rho_study, projections)");
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : InvalidArgument([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) msg += "\n  " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "potential", "bc",        "window", "experiment",   "N_grid",       "n_min",        "n_max",
        "n_grid",    "s_max",     "contour_nodes", "seed",  "tol",          "doubling_tol", "lemma",
        "lemma_window", "budget", "N",      "band",         "trials",       "output",       "strict"};
    return keys;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

PotentialSpec parse_potential(const std::string& text, std::uint64_t seed) {
    const std::string t = trim(text);
    if (t == "zero") return PotentialSpec();
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
        throw InvalidArgument("potential '" + text + "' must be zero, file:PATH or KIND:PARAMS");
    }
    const std::string kind = t.substr(0, colon);
    const std::string rest = t.substr(colon + 1);
    if (kind == "file") return load_potential_file(rest);
    std::vector<double> params;
    for (const auto& item : split(rest, ',')) {
        const auto v = to_real(item);
        if (!v) throw InvalidArgument("potential '" + text + "': parameter '" + item + "' is not a number");
        params.push_back(*v);
    }
    return make_example(parse_example_kind(kind), params, seed);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<std::string> violations;
    std::map<std::string, std::pair<std::string, int>> values;  // key -> (value, line)
    std::vector<std::pair<std::string, int>> unknown;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            unknown.emplace_back(key, lineno);
            continue;
        }
        if (values.count(key)) {
            violations.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            continue;
        }
        values[key] = {value, lineno};
    }

    auto where = [&](const std::string& key) { return "line " + std::to_string(values[key].second) + ": "; };
    auto get_int = [&](const std::string& key, auto& target, long long lo, long long hi) {
        if (!values.count(key)) return;
        const auto v = to_integer(values[key].first);
        if (!v || *v < lo || *v > hi) {
            violations.push_back(where(key) + key + " must be an integer in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "], got '" + values[key].first + "'");
            return;
        }
        target = static_cast<std::remove_reference_t<decltype(target)>>(*v);
    };
    auto get_positive = [&](const std::string& key, double& target) {
        if (!values.count(key)) return;
        const auto v = to_real(values[key].first);
        if (!v || !(*v > 0.0)) {
            violations.push_back(where(key) + key + " must be a positive number, got '" + values[key].first + "'");
            return;
        }
        target = *v;
    };
    auto get_list = [&](const std::string& key, std::vector<int>& target) {
        if (!values.count(key)) return;
        std::vector<int> out;
        for (const auto& item : split(values[key].first, ',')) {
            const auto v = to_integer(item);
            if (!v || *v < 1 || *v > kMaxWindow) {
                violations.push_back(where(key) + key + " entries must be integers in [1, " +
                                     std::to_string(kMaxWindow) + "], got '" + item + "'");
                return;
            }
            out.push_back(static_cast<int>(*v));
        }
        if (out.empty()) {
            violations.push_back(where(key) + key + " must not be empty");
            return;
        }
        target = std::move(out);
    };

    if (values.count("strict")) {
        const std::string v = values["strict"].first;
        if (v == "true" || v == "1") {
            cfg.strict = true;
        } else if (v == "false" || v == "0") {
            cfg.strict = false;
        } else {
            violations.push_back(where("strict") + "strict must be true or false");
        }
    }
    for (const auto& [key, ln] : unknown) {
        std::string msg = "line " + std::to_string(ln) + ": unknown key '" + key + "'";
        std::string best;
        std::size_t best_d = 4;
        for (const auto& k : config_keys()) {
            const std::size_t d = levenshtein(key, k);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        if (!best.empty()) msg += " (did you mean '" + best + "'?)";
        (cfg.strict ? violations : cfg.warnings).push_back(msg);
    }

    if (values.count("experiment")) {
        try {
            cfg.experiment = parse_experiment(values["experiment"].first);
        } catch (const InvalidArgument& e) {
            violations.push_back(where("experiment") + e.what());
        }
    } else {
        violations.push_back("missing required key 'experiment'");
    }
    if (values.count("bc")) {
        const std::string v = values["bc"].first;
        if (v == "auto") {
            cfg.bc.reset();
        } else {
            try {
                cfg.bc = parse_boundary_condition(v);
            } catch (const InvalidArgument& e) {
                violations.push_back(where("bc") + e.what());
            }
        }
    }
    get_int("seed", cfg.seed, 0, std::numeric_limits<long long>::max());
    get_int("window", cfg.window, 2, kMaxWindow);
    get_list("N_grid", cfg.N_grid);
    get_int("n_min", cfg.n_min, 1, kMaxWindow);
    get_int("n_max", cfg.n_max, 1, kMaxWindow);
    get_list("n_grid", cfg.n_grid);
    get_int("s_max", cfg.s_max, 0, kMaxSeriesOrder);
    get_int("contour_nodes", cfg.contour_nodes, 8, 4096);
    get_positive("tol", cfg.tol);
    get_positive("doubling_tol", cfg.doubling_tol);
    get_int("lemma_window", cfg.lemma_window, 2, 1'000'000);
    get_int("budget", cfg.budget, 1, std::numeric_limits<long long>::max());
    get_int("N", cfg.N, 1, kMaxWindow);
    get_int("band", cfg.band, 0, kMaxWindow);
    get_int("trials", cfg.trials, 0, 1'000'000);
    if (values.count("output")) cfg.output = values["output"].first;
    if (cfg.output.empty()) violations.push_back(where("output") + "output must not be empty");
    if (values.count("lemma")) {
        cfg.lemmas.clear();
        for (const auto& item : split(values["lemma"].first, ',')) {
            try {
                cfg.lemmas.push_back(parse_lemma_id(item));
            } catch (const InvalidArgument& e) {
                violations.push_back(where("lemma") + e.what());
            }
        }
    }
    if (values.count("potential")) cfg.potential_text = values["potential"].first;
    bool potential_ok = true;
    try {
        cfg.potential = parse_potential(cfg.potential_text, cfg.seed);
    } catch (const Error& e) {
        potential_ok = false;
        violations.push_back((values.count("potential") ? where("potential") : std::string()) + e.what());
    }

    if (cfg.n_min > cfg.n_max) {
        violations.push_back("n_min=" + std::to_string(cfg.n_min) + " exceeds n_max=" + std::to_string(cfg.n_max));
    }
    if (!cfg.bc && cfg.experiment != Experiment::RhoStudy) {
        violations.push_back("bc = auto is only meaningful for rho_study");
    }
    if (cfg.bc && !cfg.n_grid.empty() &&
        (cfg.experiment == Experiment::Projections || cfg.experiment == Experiment::Localization)) {
        for (int n : cfg.n_grid) {
            if (!admissible_disc_index(*cfg.bc, n)) {
                violations.push_back("n_grid entry " + std::to_string(n) + " has the wrong parity for bc " +
                                     to_string(*cfg.bc));
            }
        }
    }
    if (cfg.experiment == Experiment::Reconstruct) {
        if (cfg.N >= cfg.n_max) {
            violations.push_back("reconstruct needs N < n_max, got N=" + std::to_string(cfg.N) +
                                 " n_max=" + std::to_string(cfg.n_max));
        }
        if (cfg.band < 0) cfg.band = std::max(0, cfg.n_max - 6);
    }

    // Window rule, for experiments that build matrices.
    if (potential_ok && cfg.experiment != Experiment::Lemmas) {
        int top = cfg.n_max;
        if (!cfg.n_grid.empty() &&
            (cfg.experiment == Experiment::RhoStudy || cfg.experiment == Experiment::Projections)) {
            top = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
        }
        const int need = 2 * top + cfg.potential.support_cutoff() + 8;
        if (cfg.window == 0) {
            cfg.window = need;
        } else if (cfg.window < need) {
            violations.push_back("window rule violated: window M=" + std::to_string(cfg.window) +
                                 " is too small for n_max=" + std::to_string(top) + " (need M >= 2*n_max + cutoff + 8 = " +
                                 std::to_string(need) + ")");
        }
        if (cfg.experiment == Experiment::Reconstruct && 2 * cfg.band > cfg.window) {
            violations.push_back("band=" + std::to_string(cfg.band) + " exceeds half the window M=" +
                                 std::to_string(cfg.window));
        }
    }
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) { row(header); }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << csv_field(cells[i]);
        }
        out_ << "\r\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

Json diagnostics_json(const ProjectionDiagnostics& d) {
    Json j;
    j["nodes"] = d.nodes;
    j["idempotency_defect"] = number(d.idempotency_defect);
    j["commutation_defect"] = number(d.commutation_defect);
    j["doubling_change"] = number(d.doubling_change);
    j["eigvec_condition"] = number(d.eigvec_condition);
    j["min_eigen_distance"] = number(d.min_eigen_distance);
    j["series_terms"] = d.series_terms;
    j["series_tail_hs"] = number(d.series_tail_hs);
    j["max_contraction_hs"] = number(d.max_contraction_hs);
    j["fallback"] = d.fallback;
    Json terms = Json::array();
    for (double t : d.term_hs) terms.push_back(number(t));
    j["term_hs"] = terms;
    return j;
}

Json config_json(const ExperimentConfig& c) {
    Json j;
    j["potential"] = c.potential_text;
    j["potential_label"] = c.potential.label();
    j["bc"] = c.bc ? to_string(*c.bc) : "auto";
    j["window"] = c.window;
    j["experiment"] = to_string(c.experiment);
    j["N_grid"] = c.N_grid;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["n_grid"] = c.n_grid;
    j["s_max"] = c.s_max;
    j["contour_nodes"] = c.contour_nodes;
    j["seed"] = c.seed;
    j["tol"] = c.tol;
    j["doubling_tol"] = c.doubling_tol;
    Json lemmas = Json::array();
    for (auto id : c.lemmas) lemmas.push_back(to_string(id));
    j["lemma"] = lemmas;
    j["lemma_window"] = c.lemma_window;
    j["budget"] = c.budget;
    j["N"] = c.N;
    j["band"] = c.band;
    j["trials"] = c.trials;
    j["strict"] = c.strict;
    return j;
}

struct Outcome {
    Json items = Json::array();
    Json summary = Json::object();
    std::vector<std::pair<std::string, std::string>> csv_files;  // name, content
    std::vector<std::string> errors;
};

std::vector<int> n_values(const ExperimentConfig& c, BoundaryCondition bc) {
    if (!c.n_grid.empty()) return c.n_grid;
    return admissible_range(bc, c.n_min, c.n_max);
}

void run_decay(const ExperimentConfig& c, const RunOptions& o, Outcome& out) {
    DecayOptions d;
    d.n_min = c.n_min;
    d.nodes = c.contour_nodes;
    d.jobs = o.jobs;
    const DecayReport r = decay_report(c.potential, *c.bc, c.window, c.N_grid, c.n_max, d);
    Csv summary({"n", "hs", "method"});
    for (const auto& row : r.rows) {
        summary.row({std::to_string(row.n), format_number(row.hs), to_string(row.method)});
        Json item;
        item["experiment"] = "decay";
        item["n"] = row.n;
        item["method"] = to_string(row.method);
        item["hs"] = number(row.hs);
        item["operator_norm"] = number(row.operator_norm);
        item["eigen_distance"] = number(row.eigen_distance);
        item["parseval_defect"] = number(row.parseval_defect);
        item["diagnostics"] = diagnostics_json(row.diagnostics);
        out.items.push_back(item);
    }
    Csv tails({"N", "tail_sum"});
    Json tail_json = Json::array();
    for (const auto& t : r.tail_sums) {
        tails.row({std::to_string(t.N), format_number(t.tail)});
        tail_json.push_back({{"N", t.N}, {"tail_sum", number(t.tail)}, {"operator_tail_sum", number(t.operator_tail)}});
    }
    out.summary["bc"] = to_string(r.bc);
    out.summary["fitted_slope"] = number(r.fitted_slope);
    out.summary["tail_sums"] = tail_json;
    out.csv_files.emplace_back("summary.csv", summary.str());
    out.csv_files.emplace_back("tails.csv", tails.str());
}

void run_localization(const ExperimentConfig& c, const RunOptions& o, Outcome& out) {
    const int lo = c.n_grid.empty() ? c.n_min : *std::min_element(c.n_grid.begin(), c.n_grid.end());
    const int hi = c.n_grid.empty() ? c.n_max : *std::max_element(c.n_grid.begin(), c.n_grid.end());
    const LocalizationReport r = localization_report(c.potential, *c.bc, c.window, lo, hi, o.jobs);
    Csv summary({"n", "count", "expected"});
    for (const auto& row : r.rows) {
        if (!c.n_grid.empty() && std::find(c.n_grid.begin(), c.n_grid.end(), row.n) == c.n_grid.end()) continue;
        summary.row({std::to_string(row.n), std::to_string(row.count), std::to_string(row.expected)});
        Json item;
        item["experiment"] = "localization";
        item["n"] = row.n;
        item["count"] = row.count;
        item["expected"] = row.expected;
        item["error"] = row.error;
        out.items.push_back(item);
        if (!row.error.empty()) out.errors.push_back("localization n=" + std::to_string(row.n) + ": " + row.error);
    }
    out.summary["bc"] = to_string(r.bc);
    out.summary["N_loc"] = r.N_loc ? Json(*r.N_loc) : Json(nullptr);
    out.summary["localized"] = r.N_loc.has_value();
    out.csv_files.emplace_back("summary.csv", summary.str());
}

void run_lemmas(const ExperimentConfig& c, const RunOptions&, Outcome& out) {
    const RSequence r = RSequence::from_spec(c.potential);
    Csv summary({"lemma", "N", "lhs", "bound", "fitted_ratio"});
    for (LemmaId id : c.lemmas) {
        for (const auto& rep : lemma_grid(id, r, c.N_grid, c.lemma_window, c.budget)) {
            summary.row({to_string(rep.id), std::to_string(rep.N), format_number(rep.lhs), format_number(rep.bound),
                         format_number(rep.fitted_ratio)});
            Json item;
            item["experiment"] = "lemmas";
            item["n"] = rep.N;
            item["lemma"] = to_string(rep.id);
            item["window"] = rep.window;
            item["lhs"] = number(rep.lhs);
            item["tail_bound"] = number(rep.tail_bound);
            item["r_term"] = number(rep.r_term);
            item["tail_energy"] = number(rep.tail_energy);
            item["bound"] = number(rep.bound);
            item["fitted_ratio"] = number(rep.fitted_ratio);
            item["terms"] = rep.terms;
            out.items.push_back(item);
        }
    }
    out.csv_files.emplace_back("summary.csv", summary.str());
}

void run_reconstruct(const ExperimentConfig& c, const RunOptions& o, Outcome& out) {
    const TruncationWindow window = make_window(*c.bc, c.window);
    const Vector f = random_band_limited(window, c.band, c.seed);
    ReconstructOptions ro;
    ro.trials = c.trials;
    ro.seed = c.seed;
    ro.jobs = o.jobs;
    const std::string label = "random_band_limited(band=" + std::to_string(c.band) + ")";
    const ReconstructionReport r = reconstruct(c.potential, *c.bc, c.window, f, c.N, c.n_max, ro, label);
    Csv summary({"N", "n_max", "error_norm", "unconditional_sup", "ordered_sup"});
    summary.row({std::to_string(r.N), std::to_string(r.n_max), format_number(r.error_norm),
                 format_number(r.unconditional_sup), format_number(r.ordered_sup)});
    Json item;
    item["experiment"] = "reconstruct";
    item["n"] = r.N;
    item["f"] = r.f_label;
    item["n_max"] = r.n_max;
    item["f_norm"] = number(r.f_norm);
    item["error_norm"] = number(r.error_norm);
    item["ordered_sup"] = number(r.ordered_sup);
    item["unconditional_sup"] = number(r.unconditional_sup);
    item["trials"] = r.trials;
    item["seed"] = r.seed;
    Json blocks = Json::array();
    for (double b : r.block_norms) blocks.push_back(number(b));
    item["block_norms"] = blocks;
    out.items.push_back(item);
    out.csv_files.emplace_back("summary.csv", summary.str());
}

void run_rho(const ExperimentConfig& c, const RunOptions& o, Outcome& out) {
    const std::vector<int> grid = c.n_grid.empty() ? std::vector<int>{9, 16, 25, 36, 49} : c.n_grid;
    const auto rows = rho_bound_study(c.potential, c.bc, grid, c.window, o.jobs);
    Csv summary({"n", "measured_hs", "rho", "ratio", "r0_norm"});
    for (const auto& row : rows) {
        summary.row({std::to_string(row.n), format_number(row.measured_hs), format_number(row.rho),
                     format_number(row.ratio), format_number(row.r0_norm)});
        Json item;
        item["experiment"] = "rho_study";
        item["n"] = row.n;
        item["bc"] = to_string(row.bc);
        item["measured_hs"] = number(row.measured_hs);
        item["tail_energy"] = number(row.tail_energy);
        item["r_term"] = number(row.r_term);
        item["rho"] = number(row.rho);
        item["ratio"] = number(row.ratio);
        item["r0_norm"] = number(row.r0_norm);
        item["in_window"] = row.in_window;
        out.items.push_back(item);
    }
    out.csv_files.emplace_back("summary.csv", summary.str());
}

void run_projections(const ExperimentConfig& c, const RunOptions& o, Outcome& out) {
    const BoundaryCondition bc = *c.bc;
    const OperatorMatrix L = build_operator_matrix(c.potential, bc, c.window);
    struct Entry {
        int n = 0;
        std::optional<ProjectionResult> result[3];
        std::string error[3];
    };
    const std::vector<int> ns = n_values(c, bc);
    const auto entries = parallel_map(ns, o.jobs, [&](int n) {
        Entry e;
        e.n = n;
        auto attempt = [&](int slot, ProjectionMethod method, const std::function<ProjectionResult()>& f) {
            try {
                e.result[slot] = f();
            } catch (const Error& err) {
                e.error[slot] = "n=" + std::to_string(n) + " method=" + to_string(method) + ": " + err.what();
            }
        };
        attempt(0, ProjectionMethod::Quadrature, [&] {
            QuadratureOptions q;
            q.doubling_tol = c.doubling_tol;
            return riesz_projection_disc(L, n, c.contour_nodes, q);
        });
        attempt(1, ProjectionMethod::Eigen, [&] { return riesz_projection_eigen_disc(L, n); });
        attempt(2, ProjectionMethod::Series,
                [&] { return projection_diff_series(c.potential, bc, c.window, n, c.s_max, c.contour_nodes); });
        return e;
    });
    Csv summary({"n", "method", "hs_deviation", "idempotency", "nodes"});
    for (const auto& e : entries) {
        for (int slot = 0; slot < 3; ++slot) {
            const ProjectionMethod method = static_cast<ProjectionMethod>(slot);
            Json item;
            item["experiment"] = "projections";
            item["n"] = e.n;
            item["method"] = to_string(method);
            if (!e.result[slot]) {
                summary.row({std::to_string(e.n), to_string(method), "", "", ""});
                item["error"] = e.error[slot];
                out.errors.push_back(e.error[slot]);
                out.items.push_back(item);
                continue;
            }
            const auto& r = *e.result[slot];
            summary.row({std::to_string(e.n), to_string(method), format_number(r.hs_deviation),
                         format_number(r.diagnostics.idempotency_defect), std::to_string(r.diagnostics.nodes)});
            item["hs_deviation"] = number(r.hs_deviation);
            item["diagnostics"] = diagnostics_json(r.diagnostics);
            Json distances;
            for (int other = 0; other < 3; ++other) {
                if (other == slot || !e.result[other]) continue;
                distances[to_string(static_cast<ProjectionMethod>(other))] =
                    number(hs_norm(r.deviation.entries - e.result[other]->deviation.entries));
            }
            item["distance_to"] = distances.is_null() ? Json::object() : distances;
            out.items.push_back(item);
        }
    }
    out.summary["bc"] = to_string(bc);
    out.csv_files.emplace_back("summary.csv", summary.str());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write " + path.string());
    os << content;
    if (!os) throw InvalidArgument("failed while writing " + path.string());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    RunResult result;
    Outcome out;
    try {
        switch (config.experiment) {
            case Experiment::Decay: run_decay(config, options, out); break;
            case Experiment::Localization: run_localization(config, options, out); break;
            case Experiment::Lemmas: run_lemmas(config, options, out); break;
            case Experiment::Reconstruct: run_reconstruct(config, options, out); break;
            case Experiment::RhoStudy: run_rho(config, options, out); break;
            case Experiment::Projections: run_projections(config, options, out); break;
        }
    } catch (const Error& e) {
        out.errors.push_back(to_string(config.experiment) + ": " + e.what());
    }

    Json report;
    report["schema_version"] = kSchemaVersion;
    report["experiment"] = to_string(config.experiment);
    report["config"] = config_json(config);
    report["status"] = out.errors.empty() ? "ok" : "failed";
    report["errors"] = out.errors;
    report["warnings"] = config.warnings;
    report["summary"] = out.summary;
    report["items"] = out.items;

    const std::filesystem::path dir(config.output);
    std::filesystem::create_directories(dir);
    const auto json_path = dir / "report.json";
    write_file(json_path, report.dump(2) + "\n");
    result.files.push_back(json_path.string());
    if (out.csv_files.empty()) out.csv_files.emplace_back("summary.csv", "");
    for (const auto& [name, content] : out.csv_files) {
        const auto path = dir / name;
        write_file(path, content);
        result.files.push_back(path.string());
    }
    result.errors = out.errors;
    result.exit_code = out.errors.empty() ? 0 : 1;
    return result;
}

}  // namespace hill::cli
