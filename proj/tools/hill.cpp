// Command-line front end: `hill <subcommand> [--config PATH] [--jobs K] [--seed S] [--out DIR]`.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hill/cli.hpp"

namespace {

using namespace hill;
using namespace hill::cli;

struct CommonFlags {
    std::string config_path;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> set;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "override the configured seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--set", flags.set, "extra key=value configuration lines");
}

std::string read_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Later lines for the same key replace earlier ones.
std::string merged_config(const CommonFlags& flags, const std::string& experiment) {
    std::vector<std::pair<std::string, std::string>> lines;
    auto put = [&](const std::string& key, const std::string& value) {
        for (auto& kv : lines) {
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        }
        lines.emplace_back(key, value);
    };
    std::vector<std::string> raw;
    if (!flags.config_path.empty()) {
        std::istringstream is(read_text(flags.config_path));
        std::string line;
        while (std::getline(is, line)) raw.push_back(line);
    }
    for (const auto& s : flags.set) raw.push_back(s);
    std::string passthrough;
    for (auto line : raw) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            passthrough += line + "\n";
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        put(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (!experiment.empty()) {
        for (const auto& kv : lines) {
            if (kv.first == "experiment" && parse_experiment(kv.second) != parse_experiment(experiment)) {
                throw InvalidArgument("config experiment '" + kv.second + "' conflicts with subcommand '" +
                                      experiment + "'");
            }
        }
        put("experiment", experiment);
    }
    if (flags.seed) put("seed", std::to_string(*flags.seed));
    if (!flags.out.empty()) put("output", flags.out);
    std::string text = passthrough;
    for (const auto& [k, v] : lines) text += k + " = " + v + "\n";
    return text;
}

int run(const CommonFlags& flags, const std::string& experiment) {
    const ExperimentConfig cfg = parse_config(merged_config(flags, experiment));
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    const RunResult r = run_experiment(cfg, RunOptions{flags.jobs});
    for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
    for (const auto& f : r.files) std::cout << f << '\n';
    return r.exit_code;
}

int show_potential(const PotentialSpec& spec) {
    const SequenceStats stats = sequence_stats(spec);
    std::cout << "label " << spec.label() << '\n';
    std::cout << "support_cutoff " << stats.support_cutoff << '\n';
    std::cout << "coefficients " << spec.coefficients().size() << '\n';
    std::cout << "r_norm " << format_number(stats.r_norm) << '\n';
    std::cout << "h_minus1_norm " << format_number(stats.h_minus1_norm) << '\n';
    write_potential(std::cout, spec);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier-method spectral analysis of Hill operators"};
    app.require_subcommand(1);

    std::string potential_text = "zero";
    std::uint64_t potential_seed = kDefaultSeed;
    std::string potential_out;
    auto* potential = app.add_subcommand("potential", "build or inspect a potential");
    potential->require_subcommand(1);
    auto* make = potential->add_subcommand("make", "write a catalog potential to a file");
    make->add_option("spec", potential_text, "zero | KIND:PARAMS, e.g. mathieu:1 or delta_comb:1,64")->required();
    make->add_option("--seed", potential_seed, "seed for random_decay");
    make->add_option("--out", potential_out, "output file (default stdout)");
    auto* show = potential->add_subcommand("show", "print coefficients and norms");
    show->add_option("spec", potential_text, "zero | KIND:PARAMS | file:PATH")->required();
    show->add_option("--seed", potential_seed, "seed for random_decay");

    CommonFlags flags;
    const std::vector<std::pair<std::string, std::string>> experiments{
        {"spectrum", "eigenvalue counts in the discs C_n"},
        {"projections", "Riesz projections by quadrature, eigenvectors and the series"},
        {"decay", "Hilbert-Schmidt deviations and their tail sums"},
        {"lemmas", "weighted convolution sums against their bounds"},
        {"reconstruct", "spectral decomposition of a random vector"},
        {"rho-study", "contraction parameter on C_n"},
        {"run", "experiment named in the configuration"}};
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : experiments) {
        subs.push_back(app.add_subcommand(name, help));
        add_common(subs.back(), flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (make->parsed()) {
            const PotentialSpec spec = parse_potential(potential_text, potential_seed);
            if (potential_out.empty()) {
                write_potential(std::cout, spec);
            } else {
                std::ofstream os(potential_out);
                if (!os) throw InvalidArgument("cannot write " + potential_out);
                write_potential(os, spec);
            }
            return 0;
        }
        if (show->parsed()) return show_potential(parse_potential(potential_text, potential_seed));
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            const std::string& name = experiments[i].first;
            return run(flags, name == "run" ? std::string() : name);
        }
    } catch (const hill::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
