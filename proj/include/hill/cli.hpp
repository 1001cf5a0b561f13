#pragma once

// Experiment configuration and batch runner.
//
// Configuration is line-oriented `key = value` text; `#` starts a comment.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hill/analysis.hpp"
#include "hill/error.hpp"

namespace hill::cli {

enum class Experiment { Decay, Localization, Lemmas, Reconstruct, RhoStudy, Projections };
std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& text);

struct ExperimentConfig {
    std::string potential_text = "zero";
    PotentialSpec potential;
    std::optional<BoundaryCondition> bc = BoundaryCondition::PerPlus;  // empty only for rho_study "auto"
    int window = 0;
    Experiment experiment = Experiment::Decay;
    std::vector<int> N_grid{8, 12, 16, 24};
    int n_min = 1;
    int n_max = 20;
    std::vector<int> n_grid;  // explicit n list (rho_study, projections); empty means [n_min, n_max]
    int s_max = 12;
    int contour_nodes = 32;
    std::uint64_t seed = kDefaultSeed;
    double tol = 1e-7;
    double doubling_tol = 1e-8;
    std::vector<LemmaId> lemmas{LemmaId::T1};
    int lemma_window = 600;
    long long budget = kDefaultLemmaBudget;
    int N = 6;
    int band = -1;  // reconstruct: -1 means n_max - 6
    int trials = 100;
    std::string output = "out";
    bool strict = true;
    std::vector<std::string> warnings;
};

/// All violations found while parsing, in document order.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Throws ConfigError listing every violation.
ExperimentConfig parse_config(const std::string& text);

/// Names accepted by parse_config.
const std::vector<std::string>& config_keys();

std::size_t levenshtein(const std::string& a, const std::string& b);

PotentialSpec parse_potential(const std::string& text, std::uint64_t seed);

struct RunOptions {
    int jobs = 1;
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files;  // written paths
    std::vector<std::string> errors;
};

/// Writes report.json and summary.csv (plus tails.csv for decay) into config.output.
/// exit_code is 0 iff every item was accepted.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);
/// 17 significant digits; nan and inf spelled out.
std::string format_number(double x);

}  // namespace hill::cli
