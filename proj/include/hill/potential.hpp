#pragma once

// Fourier model of singular periodic potentials v = v0 + Q' on [0, pi].
//
// Q is stored through its coefficients q(m), m in 2Z \ {0}, so that
//   Q(x) = sum_m q(m) exp(i m x),   v_hat(m) = i m q(m)   (m != 0),
// and v_hat(0) = v0. All specs are finitely supported.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hill {

using cplx = std::complex<double>;

class PotentialSpec {
public:
    PotentialSpec() = default;

    /// Throws InvalidArgument if a key is zero, odd, or exceeds the cutoff.
    PotentialSpec(cplx v0, std::map<int, cplx> q, int support_cutoff, std::string label = "custom");

    cplx v0() const noexcept { return v0_; }
    const std::map<int, cplx>& coefficients() const noexcept { return q_; }
    int support_cutoff() const noexcept { return cutoff_; }
    const std::string& label() const noexcept { return label_; }

    /// q(m), zero when m is not stored.
    cplx q(int m) const;

    bool is_zero() const;

private:
    cplx v0_{0.0, 0.0};
    std::map<int, cplx> q_;
    int cutoff_ = 2;
    std::string label_ = "zero";
};

struct SequenceStats {
    double r_norm = 0.0;
    double h_minus1_norm = 0.0;
    int support_cutoff = 0;
};

enum class ExampleKind { Mathieu, DeltaComb, RandomDecay };

/// Parses "mathieu", "delta_comb", "random_decay".
ExampleKind parse_example_kind(const std::string& name);
std::string to_string(ExampleKind kind);

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Test-potential catalog.
///   mathieu       {a}            v_hat(+-2) = a, i.e. v = 2a cos 2x
///   delta_comb    {c, cutoff}    c * sum_k delta(x - pi k), truncated at |m| <= cutoff
///   random_decay  {alpha, cutoff} |q(m)| ~ |m|^-alpha with seeded phases/amplitudes
PotentialSpec make_example(ExampleKind kind, const std::vector<double>& params,
                           std::optional<std::uint64_t> seed = std::nullopt);

cplx v_hat(const PotentialSpec& spec, int m);

/// r(m) = max(|q(m)|, |q(-m)|).
double r_of(const PotentialSpec& spec, int m);

/// E_a(r) = (sum_{|k| >= a} r(k)^2)^{1/2}.
double tail_energy(const PotentialSpec& spec, double a);

/// (E_{sqrt n}(r) + ||r||^2 / n)^{1/2}; the absolute constant is taken to be 1.
double rho_n(const PotentialSpec& spec, int n);

SequenceStats sequence_stats(const PotentialSpec& spec);

/// The symmetric sequence r restricted to even k in [-cutoff, cutoff].
class RSequence {
public:
    RSequence() = default;
    /// values[j] is r at k = -cutoff + 2 j; must be symmetric and nonnegative.
    RSequence(int cutoff, std::vector<double> values);
    static RSequence from_spec(const PotentialSpec& spec);

    int cutoff() const noexcept { return cutoff_; }
    /// Zero outside the support, at k = 0, and at odd k.
    double at(int k) const noexcept;
    double norm_squared() const noexcept { return norm2_; }
    /// E_a(r)^2.
    double tail_squared(double a) const noexcept;
    /// Even k with r(k) != 0.
    const std::vector<int>& support() const noexcept { return support_; }

private:
    int cutoff_ = 0;
    std::vector<double> values_;
    std::vector<int> support_;
    double norm2_ = 0.0;
};

// Text format: header "v0 re im", then one "m re(q_m) im(q_m)" line per coefficient.
void write_potential(std::ostream& os, const PotentialSpec& spec);
PotentialSpec read_potential(std::istream& is, const std::string& label = "file");
PotentialSpec load_potential_file(const std::string& path);

}  // namespace hill
