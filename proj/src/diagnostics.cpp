#include "nessim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace nessim {

Histogram Histogram::uniform(double lo, double hi, int n_bins) {
    if (!(lo < hi) || n_bins < 1) throw std::invalid_argument("Histogram: bad range");
    std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / n_bins;
    return Histogram(std::move(edges));
}

Histogram::Histogram(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw std::invalid_argument("Histogram: need at least two edges");
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (!(edges_[i] > edges_[i - 1]))
            throw std::invalid_argument("Histogram: edges must be strictly increasing");
    counts_.assign(edges_.size() - 1, 0.0);
}

void Histogram::add(double x, double weight) {
    total_ += weight;
    if (x < edges_.front()) {
        underflow_ += weight;
        return;
    }
    if (x >= edges_.back()) {
        overflow_ += weight;
        return;
    }
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    counts_[static_cast<std::size_t>(it - edges_.begin()) - 1] += weight;
}

void Histogram::add_samples(std::span<const double> xs) {
    for (double x : xs) add(x);
}

std::vector<double> Histogram::proportions() const {
    std::vector<double> p(counts_.size() + 2, 0.0);
    if (total_ <= 0.0) return p;
    for (std::size_t i = 0; i < counts_.size(); ++i) p[i] = counts_[i] / total_;
    p[counts_.size()] = underflow_ / total_;
    p[counts_.size() + 1] = overflow_ / total_;
    return p;
}

namespace {

double tv_of(std::span<const double> a, std::span<const double> b, double na, double nb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] / na - b[i] / nb);
    return 0.5 * acc;
}

// conditional-binomial multinomial draw
void multinomial(std::span<const double> p, double n, RandomStream& rng,
                 std::span<double> out) {
    double remaining_p = 1.0;
    long remaining_n = std::lround(n);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (remaining_n <= 0 || remaining_p <= 0.0) {
            out[i] = 0.0;
            continue;
        }
        const double q = std::clamp(p[i] / remaining_p, 0.0, 1.0);
        std::binomial_distribution<long> bin(remaining_n, q);
        const long k = (i + 1 == p.size()) ? remaining_n : bin(rng);
        out[i] = static_cast<double>(k);
        remaining_n -= k;
        remaining_p -= p[i];
    }
}

}  // namespace

TvResult tv_counts(std::span<const double> counts_a, std::span<const double> counts_b,
                   RandomStream& rng, int bootstrap) {
    if (counts_a.size() != counts_b.size())
        throw std::invalid_argument("tv_counts: binning mismatch");
    double na = 0.0, nb = 0.0;
    for (double c : counts_a) na += c;
    for (double c : counts_b) nb += c;
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("tv_counts: empty histogram");

    TvResult res;
    res.tv = tv_of(counts_a, counts_b, na, nb);

    const std::size_t m = counts_a.size();
    std::vector<double> pa(m), pb(m), pooled(m), ra(m), rb(m);
    for (std::size_t i = 0; i < m; ++i) {
        pa[i] = counts_a[i] / na;
        pb[i] = counts_b[i] / nb;
        pooled[i] = (counts_a[i] + counts_b[i]) / (na + nb);
    }
    double mean = 0.0, sq = 0.0, null_mean = 0.0;
    for (int rep = 0; rep < bootstrap; ++rep) {
        multinomial(pa, na, rng, ra);
        multinomial(pb, nb, rng, rb);
        const double t = tv_of(ra, rb, na, nb);
        mean += t;
        sq += t * t;
        multinomial(pooled, na, rng, ra);
        multinomial(pooled, nb, rng, rb);
        null_mean += tv_of(ra, rb, na, nb);
    }
    mean /= bootstrap;
    sq /= bootstrap;
    res.se = std::sqrt(std::max(0.0, sq - mean * mean));
    res.null_bias = null_mean / bootstrap;
    return res;
}

TvResult tv_histogram(const Histogram& a, const Histogram& b, RandomStream& rng, int bootstrap) {
    if (!a.same_binning(b)) throw std::invalid_argument("tv_histogram: binning mismatch");
    std::vector<double> ca(static_cast<std::size_t>(a.n_bins()) + 2);
    std::vector<double> cb(ca.size());
    for (int i = 0; i < a.n_bins(); ++i) {
        ca[i] = a.count(i);
        cb[i] = b.count(i);
    }
    ca[a.n_bins()] = a.underflow();
    ca[a.n_bins() + 1] = a.overflow();
    cb[a.n_bins()] = b.underflow();
    cb[a.n_bins() + 1] = b.overflow();
    return tv_counts(ca, cb, rng, bootstrap);
}

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 100) throw std::invalid_argument("ks_statistic: need >= 100 samples");
    std::sort(samples.begin(), samples.end());
    KsResult res;
    res.n = samples.size();
    const double n = static_cast<double>(res.n);
    double prev_f = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        if (f < prev_f - 1e-12)
            throw std::invalid_argument("ks_statistic: CDF evaluator is not monotone");
        prev_f = f;
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        res.statistic = std::max({res.statistic, hi, lo});
    }
    res.pass_99 = res.statistic < 1.628 / std::sqrt(n);
    return res;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    KsResult res;
    res.n = a.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    res.statistic = d;
    res.pass_99 = d < 1.628 * std::sqrt((na + nb) / (na * nb));
    return res;
}

double l1_distance(const VelocityGrid& a, const VelocityGrid& b) {
    if (!a.same_layout(b)) throw std::invalid_argument("l1_distance: grid mismatch");
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const double w = (i == 0 || i == a.size() - 1) ? 0.5 : 1.0;
        acc += w * std::abs(a[i] - b[i]);
    }
    return acc * a.spacing();
}

double l1_distance(const PhaseGrid& a, const PhaseGrid& b) {
    if (!a.same_layout(b)) throw std::invalid_argument("l1_distance: grid mismatch");
    double acc = 0.0;
    for (int ix = 0; ix < a.n_x(); ++ix)
        for (int iv = 0; iv < a.n_v(); ++iv)
            acc += a.v_weight(iv) * std::abs(a.at(ix, iv) - b.at(ix, iv));
    return acc * a.dx();
}

double relative_entropy(std::span<const double> f, std::span<const double> g,
                        std::span<const double> weights) {
    if (f.size() != g.size() || f.size() != weights.size())
        throw std::invalid_argument("relative_entropy: grid mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] <= 0.0) continue;  // 0 log 0 = 0
        if (g[i] <= 0.0) return std::numeric_limits<double>::infinity();
        acc += weights[i] * f[i] * std::log(f[i] / g[i]);
    }
    return acc;
}

double relative_entropy(const VelocityGrid& f, const VelocityGrid& g) {
    if (!f.same_layout(g)) throw std::invalid_argument("relative_entropy: grid mismatch");
    std::vector<double> w(static_cast<std::size_t>(f.size()), f.spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return relative_entropy(f.values(), g.values(), w);
}

FiniteKernel::FiniteKernel(int n, std::vector<double> entries)
    : n_(n), p_(std::move(entries)) {
    if (n < 1 || p_.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("FiniteKernel: shape mismatch");
    for (int i = 0; i < n_; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double e = (*this)(i, j);
            if (e < -1e-15 || e > 1.0 + 1e-12)
                throw std::invalid_argument("FiniteKernel: entry outside [0,1]");
            row_sum += e;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw std::invalid_argument("FiniteKernel: row does not sum to 1");
    }
}

FiniteKernel FiniteKernel::identity(int n) {
    std::vector<double> p(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i) * n + i] = 1.0;
    return FiniteKernel(n, std::move(p));
}

FiniteKernel FiniteKernel::random(int n, RandomStream& rng) {
    std::vector<double> p(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double e = -std::log(rng.uniform_pos());
            p[static_cast<std::size_t>(i) * n + j] = e;
            row_sum += e;
        }
        double acc = 0.0;
        for (int j = 0; j < n - 1; ++j) {
            auto& e = p[static_cast<std::size_t>(i) * n + j];
            e /= row_sum;
            acc += e;
        }
        p[static_cast<std::size_t>(i) * n + n - 1] = 1.0 - acc;
    }
    return FiniteKernel(n, std::move(p));
}

FiniteKernel FiniteKernel::compose(const FiniteKernel& other) const {
    if (n_ != other.n_) throw std::invalid_argument("FiniteKernel: size mismatch");
    std::vector<double> p(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < n_; ++j)
                p[static_cast<std::size_t>(i) * n_ + j] += a * other(k, j);
        }
    // guard against roundoff drift in the row sums
    for (int i = 0; i < n_; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n_; ++j) row_sum += p[static_cast<std::size_t>(i) * n_ + j];
        for (int j = 0; j < n_; ++j) p[static_cast<std::size_t>(i) * n_ + j] /= row_sum;
    }
    return FiniteKernel(n_, std::move(p));
}

double FiniteKernel::doeblin_coefficient() const {
    double worst = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            double tv = 0.0;
            for (int k = 0; k < n_; ++k) tv += std::abs((*this)(i, k) - (*this)(j, k));
            worst = std::max(worst, 0.5 * tv);
        }
    return worst;
}

SubmultReport doeblin_submultiplicativity_check(std::span<const FiniteKernel> kernels) {
    SubmultReport rep;
    rep.ok = true;
    auto check = [&](const FiniteKernel& a, const FiniteKernel& b, const char* what) {
        const double lhs = a.compose(b).doeblin_coefficient();
        const double rhs = a.doeblin_coefficient() * b.doeblin_coefficient();
        const double excess = lhs - rhs;
        rep.max_excess = std::max(rep.max_excess, excess);
        ++rep.pairs_checked;
        if (excess > 1e-12) {
            rep.ok = false;
            rep.violations.push_back(std::string("submultiplicativity violated (") + what + ")");
        }
    };
    for (std::size_t i = 0; i + 1 < kernels.size(); ++i)
        check(kernels[i], kernels[i + 1], "adjacent");
    for (std::size_t i = 0; i + 2 < kernels.size(); ++i) {
        // both bracketings of a triple against the pairwise bound
        const FiniteKernel ab = kernels[i].compose(kernels[i + 1]);
        const FiniteKernel bc = kernels[i + 1].compose(kernels[i + 2]);
        check(ab, kernels[i + 2], "left bracket");
        check(kernels[i], bc, "right bracket");
    }
    return rep;
}

HydroFields hydrodynamic_moments(const PhaseGrid& f) {
    HydroFields out;
    const int nx = f.n_x();
    out.x.resize(nx);
    out.rho.resize(nx);
    out.u.resize(nx);
    out.temperature.resize(nx);
    for (int ix = 0; ix < nx; ++ix) {
        out.x[ix] = f.x_node(ix);
        double rho = 0.0, mom = 0.0;
        for (int iv = 0; iv < f.n_v(); ++iv) {
            const double w = f.v_weight(iv);
            rho += w * f.at(ix, iv);
            mom += w * f.v_node(iv) * f.at(ix, iv);
        }
        out.rho[ix] = rho;
        if (rho > 1e-12) {
            const double u = mom / rho;
            double var = 0.0;
            for (int iv = 0; iv < f.n_v(); ++iv) {
                const double dvel = f.v_node(iv) - u;
                var += f.v_weight(iv) * dvel * dvel * f.at(ix, iv);
            }
            out.u[ix] = u;
            out.temperature[ix] = var / rho;
        } else {
            out.u[ix] = std::numeric_limits<double>::quiet_NaN();
            out.temperature[ix] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

namespace {

// series and continued-fraction evaluations of P(a,x)
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularized_gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
    return 1.0 - regularized_gamma_p(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_uniform(std::span<const double> counts) {
    if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: need >= 2 cells");
    double total = 0.0;
    for (double c : counts) total += c;
    const double expected = total / static_cast<double>(counts.size());
    if (expected <= 0.0) throw std::invalid_argument("chi_square_uniform: empty counts");
    ChiSquareResult res;
    for (double c : counts) res.statistic += (c - expected) * (c - expected) / expected;
    res.dof = static_cast<int>(counts.size()) - 1;
    res.p_value = chi_square_pvalue(res.statistic, res.dof);
    return res;
}

}  // namespace nessim
