// Distance metrics, goodness-of-fit machinery, finite-state coupling
// coefficients, relative entropy and hydrodynamic fields.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nessim/phase_grid.hpp"
#include "nessim/rng.hpp"
#include "nessim/velocity_grid.hpp"

namespace nessim {

class Histogram {
public:
    static Histogram uniform(double lo, double hi, int n_bins);
    explicit Histogram(std::vector<double> edges);

    void add(double x, double weight = 1.0);
    void add_samples(std::span<const double> xs);

    int n_bins() const { return static_cast<int>(counts_.size()); }
    double count(int i) const { return counts_[i]; }
    double underflow() const { return underflow_; }
    double overflow() const { return overflow_; }
    double total() const { return total_; }
    const std::vector<double>& edges() const { return edges_; }

    // proportions over bins plus the two tail cells (appended last)
    std::vector<double> proportions() const;

    bool same_binning(const Histogram& o) const { return edges_ == o.edges_; }

private:
    std::vector<double> edges_;
    std::vector<double> counts_;
    double underflow_ = 0.0;
    double overflow_ = 0.0;
    double total_ = 0.0;
};

struct TvResult {
    double tv = 0.0;         // plug-in estimate (1/2) sum |p1 - p2|
    double se = 0.0;         // bootstrap standard error
    double null_bias = 0.0;  // mean TV of pooled-null resamples (same-law bias)
};

// TV between two count vectors with multinomial bootstrap (B replicates).
TvResult tv_counts(std::span<const double> counts_a, std::span<const double> counts_b,
                   RandomStream& rng, int bootstrap = 200);
TvResult tv_histogram(const Histogram& a, const Histogram& b, RandomStream& rng,
                      int bootstrap = 200);

struct KsResult {
    double statistic = 0.0;
    std::size_t n = 0;
    bool pass_99 = false;  // statistic < 1.628 / sqrt(n)
};

// One-sample Kolmogorov-Smirnov against an analytic CDF. The evaluator must
// be nondecreasing on the sorted sample; otherwise rejected.
KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample KS; pass threshold 1.628 sqrt((n+m)/(n m)).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Trapezoidal L1 distance between matching grids; in [0,2] for densities.
double l1_distance(const VelocityGrid& a, const VelocityGrid& b);
double l1_distance(const PhaseGrid& a, const PhaseGrid& b);

// Relative entropy int f log(f/g) with 0 log 0 = 0; returns +infinity when f
// puts mass where g vanishes.
double relative_entropy(const VelocityGrid& f, const VelocityGrid& g);
double relative_entropy(std::span<const double> f, std::span<const double> g,
                        std::span<const double> weights);

// Row-stochastic transition matrix on a finite state space.
class FiniteKernel {
public:
    explicit FiniteKernel(int n, std::vector<double> entries);
    static FiniteKernel identity(int n);
    static FiniteKernel random(int n, RandomStream& rng);

    int size() const { return n_; }
    double operator()(int i, int j) const { return p_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const double> row(int i) const {
        return {p_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
    }
    FiniteKernel compose(const FiniteKernel& other) const;

    // max over state pairs of the TV distance between their rows
    double doeblin_coefficient() const;

private:
    int n_;
    std::vector<double> p_;
};

struct SubmultReport {
    int pairs_checked = 0;
    double max_excess = 0.0;  // max of rho(AB) - rho(A) rho(B)
    bool ok = false;          // every excess <= 1e-12
    std::vector<std::string> violations;
};

// Checks rho(AB) <= rho(A) rho(B) for every adjacent pair and every
// bracketing of up to three consecutive kernels.
SubmultReport doeblin_submultiplicativity_check(std::span<const FiniteKernel> kernels);

struct HydroFields {
    std::vector<double> x;
    std::vector<double> rho;
    std::vector<double> u;           // NaN where rho is negligible
    std::vector<double> temperature; // NaN where rho is negligible
};

// Per-position velocity moments; u and T reported only where rho > 1e-12.
HydroFields hydrodynamic_moments(const PhaseGrid& f);

// Regularized lower incomplete gamma P(a, x) and the chi-square upper tail.
double regularized_gamma_p(double a, double x);
double chi_square_pvalue(double statistic, int dof);

// Pearson chi-square test of uniform cell occupancy.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
};
ChiSquareResult chi_square_uniform(std::span<const double> counts);

}  // namespace nessim
