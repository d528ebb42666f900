#include "hpz/oracle/discrete_bath.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <string>
#include <thread>

#include "hpz/bath.hpp"
#include "hpz/error.hpp"
#include "hpz/green.hpp"
#include "hpz/simd/kernels.hpp"

namespace hpz::oracle {

double DiscreteBath::recurrence_time() const { return 2.0 * M_PI / d_omega; }

double DiscreteBath::memory(double t) const {
    double sum = 0.0;
    for (const auto& mode : modes) sum += mode.weight() * std::cos(mode.omega * t);
    return sum;
}

DiscreteBath build_discrete_bath(const PhysicalConfig& c, std::size_t count, double cutoff) {
    c.validate();
    if (count < 100) throw DomainError("build_discrete_bath: needs at least 100 modes");
    if (!(cutoff > 0.0)) throw DomainError("build_discrete_bath: cutoff must be positive");
    DiscreteBath bath;
    bath.cutoff = cutoff;
    bath.d_omega = cutoff / static_cast<double>(count);
    bath.modes.reserve(count);
    for (std::size_t j = 1; j <= count; ++j) {
        const double w = (static_cast<double>(j) - 0.5) * bath.d_omega;
        const double weight = 2.0 / M_PI * memory_transform(c, {w, 0.0}).real() * bath.d_omega;
        if (!(weight > 0.0)) throw DomainError("build_discrete_bath: non-positive mode weight");
        bath.modes.push_back({weight / (w * w), w});
    }
    return bath;
}

namespace {

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix64 stream keyed by (seed, sample index): any sample can be drawn
// independently of the others, so the schedule does not change the result.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index) : state_(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(~index)) {}

    std::uint64_t next() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

    // Box-Muller pair
    void normal_pair(double& z0, double& z1) {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(2.0 * M_PI * u2);
        z1 = r * std::sin(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

// X(t_k) = sum_j xi_j cq[k][j] + eta_j sp[k][j] with xi, eta unit normals.
struct ModeTables {
    std::size_t modes{0};
    std::vector<std::vector<double>> cq, sp;
    std::vector<double> xx;  // exact <X^2(t_k)> of the discrete bath
};

ModeTables mode_tables(const PhysicalConfig& c, const DiscreteBath& bath, const std::vector<double>& times) {
    if (!has_closed_green(c)) throw UnsupportedError("mc_estimate: needs the closed-form Green function");
    for (double t : times) {
        if (!(t >= 0.0)) throw DomainError("mc_estimate: times must be >= 0");
        if (t > 0.5 * bath.recurrence_time())
            throw DomainError("mc_estimate: t = " + std::to_string(t) +
                              " beyond half the bath recurrence time " + std::to_string(bath.recurrence_time()));
    }
    const ClosedGreen gf(c);
    const double hbar = c.hbar();
    ModeTables tab;
    tab.modes = bath.count();
    for (double t : times) {
        std::vector<double> cq(tab.modes), sp(tab.modes);
        double xx = 0.0;
        for (std::size_t j = 0; j < tab.modes; ++j) {
            const auto& mode = bath.modes[j];
            const double w = mode.omega;
            const double coth = thermal_weight(c, w);
            // Wigner function of one bath oscillator
            const double sd_q = std::sqrt(hbar * coth / (2.0 * mode.mass * w));
            const double sd_p = std::sqrt(0.5 * hbar * mode.mass * w * coth);
            // int_0^t G(t-u) e^{iwu} du
            const std::complex<double> z = std::polar(1.0, w * t) * std::conj(gf.finite_transform(w, t, 0));
            cq[j] = sd_q * mode.weight() * z.real();
            sp[j] = sd_p * w * z.imag();
            xx += cq[j] * cq[j] + sp[j] * sp[j];
        }
        tab.cq.push_back(std::move(cq));
        tab.sp.push_back(std::move(sp));
        tab.xx.push_back(xx);
    }
    return tab;
}

// Power sums of x - shift, combined in a fixed order.
struct Sums {
    double n{0}, s1{0}, s2{0}, s3{0}, s4{0};
    void add(double v) {
        const double v2 = v * v;
        n += 1;
        s1 += v;
        s2 += v2;
        s3 += v2 * v;
        s4 += v2 * v2;
    }
    void merge(const Sums& o) {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        s3 += o.s3;
        s4 += o.s4;
    }
};

// Pairwise combination of per-block sums.
Sums pairwise(const std::vector<Sums>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return blocks[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    Sums a = pairwise(blocks, lo, mid);
    a.merge(pairwise(blocks, mid, hi));
    return a;
}

constexpr std::size_t kBlock = 2048;

}  // namespace

McReport mc_estimate(const PhysicalConfig& c, const DiscreteBath& bath, const InitialState& s,
                     const std::vector<double>& t_grid, const McOptions& options) {
    c.validate();
    s.validate();
    if (s.pair())
        throw UnsupportedError("mc_estimate: a cat state has a Wigner function with negative regions; "
                               "only Gaussian-family states can be sampled");
    if (t_grid.empty()) throw DomainError("mc_estimate: empty time grid");
    if (options.samples < 2) throw DomainError("mc_estimate: needs at least 2 samples");

    const ModeTables tab = mode_tables(c, bath, t_grid);
    const double m = c.m(), hbar = c.hbar();
    const double sd_q0 = s.sigma;
    const double sd_p0 = std::sqrt(hbar * hbar / (4.0 * s.sigma * s.sigma) + (s.thermal() ? m * c.kT() : 0.0));
    const std::size_t nt = t_grid.size(), J = tab.modes;
    std::vector<double> mg1(nt), g(nt), mean(nt), var(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        const auto ge = green(c, t_grid[k]);
        mg1[k] = t_grid[k] > 0.0 ? m * ge.g1 : 1.0;
        g[k] = ge.g;
        mean[k] = mg1[k] * s.x0;
        var[k] = mg1[k] * mg1[k] * sd_q0 * sd_q0 + g[k] * g[k] * sd_p0 * sd_p0 + tab.xx[k];
    }

    McReport report;
    report.samples = options.samples;
    report.modes = J;
    report.cutoff = bath.cutoff;
    report.seed = options.seed;
    const int bins = options.histogram_bins;
    if (bins > 0) {
        const double sd = std::sqrt(var.back());
        report.histogram.x_min = mean.back() - 6.0 * sd;
        report.histogram.x_max = mean.back() + 6.0 * sd;
    }

    const std::size_t nblocks = (options.samples + kBlock - 1) / kBlock;
    // per block and time: sums of X^2 and of x - mean
    std::vector<std::vector<Sums>> xsq(nt, std::vector<Sums>(nblocks)), xs(nt, std::vector<Sums>(nblocks));
    std::vector<std::vector<double>> hist(nblocks, std::vector<double>(std::max(bins, 0), 0.0));
    std::atomic<std::size_t> next_block{0};

    auto worker = [&] {
        std::vector<double> xi(J), eta(J);
        for (std::size_t b; (b = next_block.fetch_add(1)) < nblocks;) {
            const std::size_t end = std::min(options.samples, (b + 1) * kBlock);
            for (std::size_t i = b * kBlock; i < end; ++i) {
                Stream rng(options.seed, i);
                for (std::size_t j = 0; j < J; ++j) rng.normal_pair(xi[j], eta[j]);
                double zq, zp;
                rng.normal_pair(zq, zp);
                const double q0 = s.x0 + sd_q0 * zq, p0 = sd_p0 * zp;
                for (std::size_t k = 0; k < nt; ++k) {
                    const double X = simd::dual_dot(xi.data(), tab.cq[k].data(), eta.data(), tab.sp[k].data(), J);
                    const double x = mg1[k] * q0 + g[k] * p0 + X;
                    xsq[k][b].add(X * X);
                    xs[k][b].add(x - mean[k]);
                    if (bins > 0 && k + 1 == nt) {
                        const auto& h = report.histogram;
                        const double u = (x - h.x_min) / (h.x_max - h.x_min) * bins;
                        if (u >= 0.0 && u < bins) hist[b][static_cast<int>(u)] += 1.0;
                    }
                }
            }
        }
    };
    const unsigned threads = std::max(1u, options.threads);
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const double n = static_cast<double>(options.samples);
    for (std::size_t k = 0; k < nt; ++k) {
        const Sums a = pairwise(xsq[k], 0, nblocks);
        const Sums x = pairwise(xs[k], 0, nblocks);
        McPoint pt;
        pt.t = t_grid[k];
        pt.xx = a.s1 / n;
        pt.xx_se = std::sqrt(std::max(0.0, a.s2 / n - pt.xx * pt.xx) / (n - 1.0));
        pt.xx_discrete = tab.xx[k];
        const double m1 = x.s1 / n;
        pt.mean_x = mean[k] + m1;
        const double v = x.s2 / n - m1 * m1;
        pt.mean_x_se = std::sqrt(v / (n - 1.0));
        pt.var_x = v * n / (n - 1.0);
        // central fourth moment from the raw sums
        const double mu4 = x.s4 / n - 4.0 * m1 * x.s3 / n + 6.0 * m1 * m1 * x.s2 / n - 3.0 * std::pow(m1, 4);
        pt.var_x_se = std::sqrt(std::max(0.0, mu4 - v * v) / n);
        report.points.push_back(pt);
    }
    if (bins > 0) {
        auto& h = report.histogram;
        h.density.assign(bins, 0.0);
        for (const auto& block : hist)
            for (int k = 0; k < bins; ++k) h.density[k] += block[k];
        const double width = (h.x_max - h.x_min) / bins;
        for (double& d : h.density) d /= n * width;
    }
    return report;
}

McScaling mc_error_scaling(const PhysicalConfig& c, const DiscreteBath& bath, double t,
                           const std::vector<std::size_t>& sample_counts, std::size_t batches,
                           std::uint64_t seed) {
    if (sample_counts.size() < 2 || batches < 2)
        throw DomainError("mc_error_scaling: needs two sample counts and two batches");
    if (!std::is_sorted(sample_counts.begin(), sample_counts.end()) || sample_counts.front() < 2)
        throw DomainError("mc_error_scaling: sample counts must ascend from >= 2");
    const ModeTables tab = mode_tables(c, bath, {t});
    const std::size_t J = tab.modes, n_max = sample_counts.back();
    std::vector<double> xi(J), eta(J), sq_err(sample_counts.size(), 0.0);
    // nested: the estimate at N uses the first N samples of each batch
    for (std::size_t b = 0; b < batches; ++b) {
        double sum = 0.0;
        std::size_t next = 0;
        for (std::size_t i = 0; i < n_max; ++i) {
            Stream rng(seed, b * n_max + i);
            for (std::size_t j = 0; j < J; ++j) rng.normal_pair(xi[j], eta[j]);
            const double X = simd::dual_dot(xi.data(), tab.cq[0].data(), eta.data(), tab.sp[0].data(), J);
            sum += X * X;
            if (i + 1 == sample_counts[next]) {
                const double err = sum / static_cast<double>(i + 1) - tab.xx[0];
                sq_err[next++] += err * err;
            }
        }
    }
    McScaling out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < sample_counts.size(); ++k) {
        out.samples.push_back(static_cast<double>(sample_counts[k]));
        out.rms_error.push_back(std::sqrt(sq_err[k] / static_cast<double>(batches)));
        const double x = std::log(out.samples.back()), y = std::log(out.rms_error.back());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(sample_counts.size());
    out.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

}  // namespace hpz::oracle
