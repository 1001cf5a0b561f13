#include "hill/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "hill/error.hpp"

namespace hill {

namespace {

// mt19937_64 output is fixed by the standard; distributions are not, so map bits by hand.
double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

PotentialSpec::PotentialSpec(cplx v0, std::map<int, cplx> q, int support_cutoff, std::string label)
    : v0_(v0), q_(std::move(q)), cutoff_(support_cutoff), label_(std::move(label)) {
    if (cutoff_ <= 0) {
        throw InvalidArgument("potential: support cutoff must be positive, got " + std::to_string(cutoff_));
    }
    for (const auto& [m, value] : q_) {
        if (m == 0) throw InvalidArgument("potential: q(0) must be absent (Q has mean zero)");
        if (m % 2 != 0) throw InvalidArgument("potential: coefficient key " + std::to_string(m) + " is odd");
        if (std::abs(m) > cutoff_) {
            throw InvalidArgument("potential: key " + std::to_string(m) + " exceeds support cutoff " +
                                  std::to_string(cutoff_));
        }
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
            throw InvalidArgument("potential: non-finite coefficient at m=" + std::to_string(m));
        }
    }
}

cplx PotentialSpec::q(int m) const {
    auto it = q_.find(m);
    return it == q_.end() ? cplx{} : it->second;
}

bool PotentialSpec::is_zero() const {
    if (v0_ != cplx{}) return false;
    return std::all_of(q_.begin(), q_.end(), [](const auto& kv) { return kv.second == cplx{}; });
}

ExampleKind parse_example_kind(const std::string& name) {
    if (name == "mathieu") return ExampleKind::Mathieu;
    if (name == "delta_comb") return ExampleKind::DeltaComb;
    if (name == "random_decay") return ExampleKind::RandomDecay;
    throw InvalidArgument("unknown potential kind '" + name + "' (expected mathieu, delta_comb, random_decay)");
}

std::string to_string(ExampleKind kind) {
    switch (kind) {
        case ExampleKind::Mathieu: return "mathieu";
        case ExampleKind::DeltaComb: return "delta_comb";
        case ExampleKind::RandomDecay: return "random_decay";
    }
    return "?";
}

PotentialSpec make_example(ExampleKind kind, const std::vector<double>& params,
                           std::optional<std::uint64_t> seed) {
    const cplx I{0.0, 1.0};
    auto cutoff_param = [&](std::size_t idx, int fallback) {
        if (params.size() <= idx) return fallback;
        double c = params[idx];
        if (!(c >= 1.0) || c != std::floor(c)) {
            throw InvalidArgument("potential: cutoff must be a positive integer, got " + format_double(c));
        }
        return static_cast<int>(c);
    };

    switch (kind) {
        case ExampleKind::Mathieu: {
            if (params.size() != 1) throw InvalidArgument("mathieu takes exactly one parameter (amplitude a)");
            const double a = params[0];
            std::map<int, cplx> q;
            if (a != 0.0) {
                q[2] = -I * a / 2.0;
                q[-2] = I * a / 2.0;
            }
            return PotentialSpec(0.0, std::move(q), 2, "mathieu(a=" + format_double(a) + ")");
        }
        case ExampleKind::DeltaComb: {
            if (params.empty() || params.size() > 2) {
                throw InvalidArgument("delta_comb takes strength c and optional cutoff");
            }
            const double c = params[0];
            const int cutoff = cutoff_param(1, 64);
            std::map<int, cplx> q;
            for (int m = 2; m <= cutoff; m += 2) {
                q[m] = -I * c / (std::numbers::pi * m);
                q[-m] = I * c / (std::numbers::pi * m);
            }
            return PotentialSpec(c / std::numbers::pi, std::move(q), cutoff,
                                 "delta_comb(c=" + format_double(c) + ",cutoff=" + std::to_string(cutoff) + ")");
        }
        case ExampleKind::RandomDecay: {
            if (params.empty() || params.size() > 2) {
                throw InvalidArgument("random_decay takes exponent alpha and optional cutoff");
            }
            const double alpha = params[0];
            if (!(alpha > 0.5)) {
                throw InvalidArgument("random_decay: alpha must exceed 1/2 so that r stays in l2, got " +
                                      format_double(alpha));
            }
            const int cutoff = cutoff_param(1, 32);
            const std::uint64_t s = seed.value_or(kDefaultSeed);
            std::mt19937_64 gen(s);
            std::map<int, cplx> q;
            for (int m = 2; m <= cutoff; m += 2) {
                for (int sign : {1, -1}) {
                    const double amp = std::pow(static_cast<double>(m), -alpha) * (0.5 + uniform01(gen));
                    const double phase = 2.0 * std::numbers::pi * uniform01(gen);
                    q[sign * m] = std::polar(amp, phase);
                }
            }
            return PotentialSpec(0.0, std::move(q), cutoff,
                                 "random_decay(alpha=" + format_double(alpha) + ",cutoff=" +
                                     std::to_string(cutoff) + ",seed=" + std::to_string(s) + ")");
        }
    }
    throw InvalidArgument("unknown example kind");
}

cplx v_hat(const PotentialSpec& spec, int m) {
    if (m % 2 != 0) throw InvalidArgument("v_hat: frequency " + std::to_string(m) + " is odd");
    if (m == 0) return spec.v0();
    return cplx{0.0, static_cast<double>(m)} * spec.q(m);
}

double r_of(const PotentialSpec& spec, int m) {
    if (m == 0) throw InvalidArgument("r_of: r(0) is undefined");
    if (m % 2 != 0) throw InvalidArgument("r_of: frequency " + std::to_string(m) + " is odd");
    return std::max(std::abs(spec.q(m)), std::abs(spec.q(-m)));
}

double tail_energy(const PotentialSpec& spec, double a) {
    if (!(a > 0.0)) throw InvalidArgument("tail_energy: a must be positive");
    return std::sqrt(RSequence::from_spec(spec).tail_squared(a));
}

double rho_n(const PotentialSpec& spec, int n) {
    if (n < 1) throw InvalidArgument("rho_n: n must be >= 1");
    const RSequence r = RSequence::from_spec(spec);
    const double tail = std::sqrt(r.tail_squared(std::sqrt(static_cast<double>(n))));
    return std::sqrt(tail + r.norm_squared() / n);
}

SequenceStats sequence_stats(const PotentialSpec& spec) {
    SequenceStats stats;
    stats.support_cutoff = spec.support_cutoff();
    stats.r_norm = std::sqrt(RSequence::from_spec(spec).norm_squared());
    // Displayed H^-1 norm, taken literally: |v0|^2 + sum |q(m)|^2 / m^2.
    double h = std::norm(spec.v0());
    for (const auto& [m, value] : spec.coefficients()) h += std::norm(value) / (double(m) * double(m));
    stats.h_minus1_norm = std::sqrt(h);
    return stats;
}

RSequence::RSequence(int cutoff, std::vector<double> values) : cutoff_(cutoff), values_(std::move(values)) {
    if (cutoff_ < 0 || cutoff_ % 2 != 0) throw InvalidArgument("RSequence: cutoff must be even and >= 0");
    if (values_.size() != static_cast<std::size_t>(cutoff_ + 1)) {
        throw InvalidArgument("RSequence: expected one value per even k in [-cutoff, cutoff]");
    }
    values_[cutoff_ / 2] = 0.0;
    // Accumulate from small to large magnitudes so partial tails are reproducible.
    for (int k = -cutoff_; k <= cutoff_; k += 2) {
        const double value = values_[(k + cutoff_) / 2];
        if (value < 0.0 || !std::isfinite(value)) throw InvalidArgument("RSequence: values must be finite and >= 0");
        if (value != values_[(-k + cutoff_) / 2]) throw InvalidArgument("RSequence: r must satisfy r(-k) = r(k)");
        if (value != 0.0) support_.push_back(k);
    }
    for (int k = cutoff_; k >= 2; k -= 2) norm2_ += 2.0 * at(k) * at(k);
}

RSequence RSequence::from_spec(const PotentialSpec& spec) {
    int cutoff = spec.support_cutoff();
    if (cutoff % 2 != 0) --cutoff;
    std::vector<double> values(static_cast<std::size_t>(cutoff + 1), 0.0);
    for (int k = -cutoff; k <= cutoff; k += 2) {
        if (k != 0) values[(k + cutoff) / 2] = r_of(spec, k);
    }
    return RSequence(cutoff, std::move(values));
}

double RSequence::at(int k) const noexcept {
    if (k == 0 || (k % 2) != 0 || k > cutoff_ || k < -cutoff_) return 0.0;
    return values_[(k + cutoff_) / 2];
}

double RSequence::tail_squared(double a) const noexcept {
    double sum = 0.0;
    for (int k = cutoff_; k >= 2; k -= 2) {
        if (k >= a) sum += 2.0 * at(k) * at(k);
    }
    return sum;
}

void write_potential(std::ostream& os, const PotentialSpec& spec) {
    os << "v0 " << format_double(spec.v0().real()) << ' ' << format_double(spec.v0().imag()) << '\n';
    for (const auto& [m, value] : spec.coefficients()) {
        os << m << ' ' << format_double(value.real()) << ' ' << format_double(value.imag()) << '\n';
    }
}

PotentialSpec read_potential(std::istream& is, const std::string& label) {
    std::string line;
    std::optional<cplx> v0;
    std::map<int, cplx> q;
    int cutoff = 0;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        double re = 0.0, im = 0.0;
        if (!(ls >> re >> im)) {
            throw InvalidArgument("potential file line " + std::to_string(lineno) + ": expected three fields");
        }
        std::string extra;
        if (ls >> extra) throw InvalidArgument("potential file line " + std::to_string(lineno) + ": trailing text");
        if (head == "v0") {
            if (v0) throw InvalidArgument("potential file: duplicate v0 header");
            v0 = cplx{re, im};
            continue;
        }
        if (!v0) throw InvalidArgument("potential file: the first record must be the 'v0 re im' header");
        std::size_t used = 0;
        int m = 0;
        try {
            m = std::stoi(head, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != head.size()) {
            throw InvalidArgument("potential file line " + std::to_string(lineno) + ": bad index '" + head + "'");
        }
        if (q.count(m)) throw InvalidArgument("potential file: duplicate index " + std::to_string(m));
        q[m] = cplx{re, im};
        cutoff = std::max(cutoff, std::abs(m));
    }
    if (!v0) throw InvalidArgument("potential file: missing 'v0 re im' header");
    return PotentialSpec(*v0, std::move(q), std::max(cutoff, 2), label);
}

PotentialSpec load_potential_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open potential file '" + path + "'");
    return read_potential(in, path);
}

}  // namespace hill
