#include "kgpe/liouville.hpp"

#include "kgpe/binary.hpp"
#include "kgpe/error.hpp"
#include "kgpe/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace kgpe::liouville {

namespace {

constexpr std::ptrdiff_t chunk = 4096;

// Portable [0, 1) double from a 64-bit engine (the std distributions are not).
double unit(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::mt19937_64 particle_engine(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

template <class F>
void for_chunks(std::size_t n, F&& body)
{
    const auto n_chunks = static_cast<std::ptrdiff_t>((n + chunk - 1) / chunk);
    parallel_for(0, n_chunks, [&](std::ptrdiff_t c) {
        const std::size_t lo = static_cast<std::size_t>(c * chunk);
        const std::size_t hi = std::min(n, lo + static_cast<std::size_t>(chunk));
        body(lo, hi);
    });
}

// Cloud-in-cell weights; false when x lies outside [x_0, x_{n-1}].
bool cic(const Grid1D& g, double x, int& i0, double& frac)
{
    const double s = (x - g.x_min) / g.dx;
    if (!(s >= 0.0) || s > g.n_points - 1)
        return false;
    i0 = std::min(static_cast<int>(s), g.n_points - 2);
    frac = s - i0;
    return true;
}

} // namespace

Ensemble sample_from_wigner(const wigner::WignerGrid& w, std::size_t n, std::uint64_t seed,
                            const ScaledParams& params)
{
    if (n == 0)
        throw DomainError("sample_from_wigner: empty ensemble requested");
    double positive = 0.0, negative = 0.0;
    std::vector<double> cdf(w.values.size());
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        const double v = w.values[k];
        if (v > 0.0)
            positive += v;
        else
            negative -= v;
        cdf[k] = positive;
    }
    if (!(positive > 0.0))
        throw DomainError("sample_from_wigner: no positive mass");
    const double frac = negative / (positive + negative);
    if (frac > max_negative_fraction)
        throw DomainError("sample_from_wigner: negative mass fraction " + std::to_string(frac) +
                          " exceeds the 1% budget");

    Ensemble e;
    e.seed = seed;
    e.params = params;
    e.x.resize(n);
    e.p.resize(n);
    for_chunks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            auto gen = particle_engine(seed, i);
            const double target = unit(gen) * positive;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
            std::size_t cell = static_cast<std::size_t>(it - cdf.begin());
            if (cell >= cdf.size())
                cell = cdf.size() - 1;
            while (w.values[cell] <= 0.0 && cell > 0) // zero-width steps at the top
                --cell;
            const int ix = static_cast<int>(cell / static_cast<std::size_t>(w.np));
            const int jp = static_cast<int>(cell % static_cast<std::size_t>(w.np));
            e.x[i] = w.x(ix) + (unit(gen) - 0.5) * w.dx;
            e.p[i] = w.p(jp) + (unit(gen) - 0.5) * w.dp;
        }
    });
    return e;
}

CoarseDensity coarse_density(std::span<const double> x, const Grid1D& grid, double bandwidth)
{
    if (!(bandwidth >= grid.dx))
        throw DomainError("coarse_density: bandwidth must be at least dx");
    const int n = grid.n_points;
    std::vector<double> deposit(static_cast<std::size_t>(n), 0.0);
    for (double xi : x) {
        int i0;
        double f;
        if (!cic(grid, xi, i0, f))
            continue;
        deposit[i0] += 1.0 - f;
        deposit[i0 + 1] += f;
    }
    CVector c(deposit.begin(), deposit.end());
    fft_forward(c);
    for (int j = 0; j < n; ++j) {
        const double k = grid.momentum(j);
        c[j] *= std::exp(-0.5 * k * k * bandwidth * bandwidth) / n;
    }
    fft_backward(c);

    CoarseDensity out{grid, std::vector<double>(static_cast<std::size_t>(n)), bandwidth};
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        out.rho[i] = std::max(c[i].real(), 0.0);
        mass += out.rho[i];
    }
    mass *= grid.dx;
    if (mass > 0.0)
        for (double& r : out.rho)
            r /= mass;
    return out;
}

std::vector<double> mean_field_force(const CoarseDensity& density, double coupling)
{
    std::vector<double> f = spectral_derivative(density.rho, density.grid, 1);
    for (double& v : f)
        v *= -coupling;
    return f;
}

MeanFieldIntegrator::MeanFieldIntegrator(const Grid1D& grid, const ScaledParams& params,
                                         const TransportOptions& options)
    : grid_(grid), coupling_(params.coupling()), dt_(params.tau_h / options.substeps),
      options_(options)
{
    params.validate();
    if (options.substeps < 1 || options.density_refresh < 1)
        throw DomainError("substeps and density_refresh must be positive");
    if (!(options.bandwidth_cells >= 1.0))
        throw DomainError("bandwidth must be at least one grid spacing");
}

void MeanFieldIntegrator::refresh(const Ensemble& e)
{
    force_ = mean_field_force(coarse_density(e.x, grid_, options_.bandwidth_cells * grid_.dx),
                              coupling_);
    since_refresh_ = 0;
    fresh_ = true;
}

long MeanFieldIntegrator::impulse(Ensemble& e, double h) const
{
    std::vector<long> outside(static_cast<std::size_t>((e.size() + chunk - 1) / chunk), 0);
    for_chunks(e.size(), [&](std::size_t lo, std::size_t hi) {
        long bad = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            int i0;
            double f;
            if (!cic(grid_, e.x[i], i0, f)) {
                ++bad;
                continue;
            }
            e.p[i] += h * ((1.0 - f) * force_[i0] + f * force_[i0 + 1]);
        }
        outside[lo / chunk] = bad;
    });
    long total = 0;
    for (long b : outside)
        total += b;
    return total;
}

long MeanFieldIntegrator::advance(Ensemble& e, int n_steps)
{
    const bool interacting = coupling_ != 0.0;
    const double c = std::cos(dt_), s = std::sin(dt_);
    long flagged = 0;
    fresh_ = false;
    for (int step = 0; step < n_steps; ++step) {
        if (interacting) {
            if (!fresh_)
                refresh(e);
            flagged += impulse(e, 0.5 * dt_);
        }
        for_chunks(e.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double x = e.x[i], p = e.p[i];
                e.x[i] = x * c + p * s;
                e.p[i] = p * c - x * s;
            }
        });
        if (interacting) {
            if (++since_refresh_ >= options_.density_refresh)
                fresh_ = false;
            if (!fresh_)
                refresh(e);
            flagged += impulse(e, 0.5 * dt_);
        }
    }
    return flagged;
}

long step_mean_field(Ensemble& e, const Grid1D& grid, const TransportOptions& options,
                     int n_steps)
{
    if (options.substeps < 256)
        throw DomainError("step_mean_field: dt must not exceed tau_h / 256");
    MeanFieldIntegrator integrator(grid, e.params, options);
    return integrator.advance(e, n_steps);
}

void kick_ensemble(Ensemble& e)
{
    const double eta = e.params.eta;
    const double amp = e.params.kappa / eta;
    const double k = std::numbers::sqrt2 * eta;
    for (std::size_t i = 0; i < e.size(); ++i)
        e.p[i] += amp * std::sin(k * e.x[i]);
}

wigner::WignerGrid histogram(const Ensemble& e, const wigner::WignerGrid& lattice)
{
    wigner::WignerGrid h = lattice;
    std::fill(h.values.begin(), h.values.end(), 0.0);
    if (e.size() == 0)
        return h;
    const double add = 1.0 / (static_cast<double>(e.size()) * h.dx * h.dp);
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double si = std::round((e.x[k] - h.x_min) / h.dx);
        const double sj = std::round((e.p[k] - h.p_min) / h.dp);
        if (si < 0 || si >= h.nx || sj < 0 || sj >= h.np)
            continue;
        h.at(static_cast<int>(si), static_cast<int>(sj)) += add;
    }
    return h;
}

namespace {

EnsembleRow summarize(int kick, double t, const Ensemble& e)
{
    double mx = 0.0, mp = 0.0, sx = 0.0, sp = 0.0;
    const double n = static_cast<double>(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        mx += e.x[i];
        mp += e.p[i];
    }
    mx /= n;
    mp /= n;
    for (std::size_t i = 0; i < e.size(); ++i) {
        sx += (e.x[i] - mx) * (e.x[i] - mx);
        sp += (e.p[i] - mp) * (e.p[i] - mp);
    }
    return {kick, t, mx, mp, sx / n, sp / n};
}

} // namespace

EnsembleRun run_kicked_ensemble(const Ensemble& e0, int n_kicks, const Grid1D& grid,
                                const wigner::WignerGrid& lattice,
                                const TransportOptions& options,
                                const std::vector<Observer>& observers)
{
    if (n_kicks < 0)
        throw DomainError("n_kicks must be non-negative");
    EnsembleRun run;
    run.final_state = e0;
    Ensemble& e = run.final_state;
    MeanFieldIntegrator integrator(grid, e.params, options);
    wigner::TimeAverage avg;
    const double tau = e.params.tau_h;

    auto observe = [&](int k) {
        avg.add(histogram(e, lattice));
        run.series.push_back(summarize(k, k * tau, e));
        for (const auto& obs : observers)
            obs(k, e);
    };
    for (int k = 0; k < n_kicks; ++k) {
        observe(k);
        kick_ensemble(e);
        run.out_of_grid += integrator.advance(e, options.substeps);
    }
    observe(n_kicks);
    run.average = avg.result();
    return run;
}

void write_ensemble(const std::filesystem::path& path, const Ensemble& e)
{
    if (e.size() > 0xffffffffu)
        throw DomainError("ensemble too large for the checkpoint format");
    binary::Writer out(path);
    out.magic("KGPEENS1");
    out.u32(static_cast<std::uint32_t>(e.size()));
    std::vector<double> pairs(2 * e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        pairs[2 * i] = e.x[i];
        pairs[2 * i + 1] = e.p[i];
    }
    out.f64s(pairs);
    out.close();
}

Ensemble read_ensemble(const std::filesystem::path& path, const ScaledParams& params)
{
    binary::Reader in(path);
    in.expect_magic("KGPEENS1");
    const std::size_t n = in.u32();
    std::vector<double> pairs(2 * n);
    in.f64s(pairs);
    Ensemble e;
    e.params = params;
    e.x.resize(n);
    e.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        e.x[i] = pairs[2 * i];
        e.p[i] = pairs[2 * i + 1];
    }
    return e;
}

} // namespace kgpe::liouville
