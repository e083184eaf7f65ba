#include "kgpe/wigner.hpp"

#include "kgpe/binary.hpp"
#include "kgpe/error.hpp"
#include "kgpe/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kgpe::wigner {

namespace {

constexpr double pi = std::numbers::pi;

Grid1D x_grid(const WignerGrid& w)
{
    return {w.nx, w.x_min, w.dx};
}

} // namespace

double WignerGrid::total() const
{
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum * dx * dp;
}

std::vector<double> WignerGrid::position_marginal() const
{
    std::vector<double> out(static_cast<std::size_t>(nx), 0.0);
    for (int i = 0; i < nx; ++i) {
        double sum = 0.0;
        for (int j = 0; j < np; ++j)
            sum += at(i, j);
        out[i] = sum * dp;
    }
    return out;
}

std::vector<double> WignerGrid::momentum_marginal() const
{
    std::vector<double> out(static_cast<std::size_t>(np), 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < np; ++j)
            out[j] += at(i, j);
    for (double& v : out)
        v *= dx;
    return out;
}

bool WignerGrid::same_lattice(const WignerGrid& o) const
{
    return nx == o.nx && np == o.np && x_min == o.x_min && dx == o.dx && p_min == o.p_min &&
           dp == o.dp;
}

WignerGrid wigner_lattice(const Grid1D& grid)
{
    WignerGrid w;
    w.nx = grid.n_points;
    w.np = grid.n_points;
    w.x_min = grid.x_min;
    w.dx = grid.dx;
    w.dp = pi / (grid.n_points * grid.dx);
    w.p_min = -0.5 * w.np * w.dp;
    w.values.assign(static_cast<std::size_t>(w.nx) * w.np, 0.0);
    return w;
}

WignerGrid wigner_transform(const ComplexField& field)
{
    if (field.space != Space::position)
        throw DomainError("wigner_transform expects a position-space field");
    const Grid1D& g = field.grid;
    const int n = g.n_points;
    const int half = n / 2;
    WignerGrid w = wigner_lattice(g);
    const double scale = g.dx / pi;
    const CVector& phi = field.values;

    parallel_for(0, n, [&](std::ptrdiff_t row) {
        const int i = static_cast<int>(row);
        CVector c(static_cast<std::size_t>(n), 0.0);
        for (int m = -half; m < half; ++m) {
            const int lo = i - m, hi = i + m;
            if (lo < 0 || lo >= n || hi < 0 || hi >= n)
                continue;
            // (-1)^m recentres the FFT output on p = 0.
            const complex v = std::conj(phi[lo]) * phi[hi];
            c[static_cast<std::size_t>((m + n) % n)] = (m % 2 == 0) ? v : -v;
        }
        fft_forward(c);
        for (int j = 0; j < n; ++j)
            w.at(i, j) = scale * c[j].real();
    });
    return w;
}

void TimeAverage::add(const WignerGrid& w)
{
    if (count_ == 0) {
        sum_ = w;
    } else {
        if (!sum_.same_lattice(w))
            throw DomainError("time average over mismatched Wigner lattices");
        for (std::size_t k = 0; k < w.values.size(); ++k)
            sum_.values[k] += w.values[k];
    }
    ++count_;
}

WignerGrid TimeAverage::result() const
{
    if (count_ == 0)
        throw DomainError("time average of no snapshots");
    WignerGrid out = sum_;
    for (double& v : out.values)
        v /= count_;
    return out;
}

WignerGrid accumulate_time_average(std::span<const WignerGrid> snapshots)
{
    TimeAverage avg;
    for (const auto& w : snapshots)
        avg.add(w);
    return avg.result();
}

MomentFields moments(const WignerGrid& w, int n_max)
{
    if (n_max < 1)
        throw DomainError("n_max must be >= 1");
    const auto nx = static_cast<std::size_t>(w.nx);
    MomentFields m;
    m.rho.assign(nx, 0.0);
    m.flux.assign(nx, 0.0);
    m.P.assign(nx, 0.0);
    m.sigma_p2.assign(nx, 0.0);
    m.defined.assign(nx, false);
    m.P_n.assign(static_cast<std::size_t>(std::max(0, n_max - 1)), std::vector<double>(nx, 0.0));

    std::vector<double> raw(static_cast<std::size_t>(n_max) + 1);
    for (int i = 0; i < w.nx; ++i) {
        std::fill(raw.begin(), raw.end(), 0.0);
        for (int j = 0; j < w.np; ++j) {
            const double p = w.p(j);
            double pk = 1.0;
            for (int k = 0; k <= n_max; ++k) {
                raw[k] += pk * w.at(i, j);
                pk *= p;
            }
        }
        for (double& v : raw)
            v *= w.dp;
        m.rho[i] = std::max(raw[0], 0.0);
        m.flux[i] = raw[1];
        if (m.rho[i] >= density_threshold) {
            m.defined[i] = true;
            m.P[i] = raw[1] / m.rho[i];
            for (int k = 2; k <= n_max; ++k)
                m.P_n[k - 2][i] = raw[k] / m.rho[i];
            if (n_max >= 2)
                m.sigma_p2[i] = m.P_n[0][i] - m.P[i] * m.P[i];
        }
    }
    return m;
}

std::vector<double> x_derivative(std::span<const double> values, const WignerGrid& w)
{
    return spectral_derivative(values, x_grid(w), 1);
}

double continuity_residual(const WignerGrid& before, const WignerGrid& after, double dt)
{
    if (!before.same_lattice(after))
        throw DomainError("continuity_residual: mismatched lattices");
    if (!(dt > 0.0))
        throw DomainError("dt must be positive");
    const MomentFields a = moments(before, 1);
    const MomentFields b = moments(after, 1);
    std::vector<double> flux(a.flux.size());
    for (std::size_t i = 0; i < flux.size(); ++i)
        flux[i] = 0.5 * (a.flux[i] + b.flux[i]);
    const std::vector<double> div = x_derivative(flux, before);
    double worst = 0.0;
    for (std::size_t i = 0; i < flux.size(); ++i) {
        if (0.5 * (a.rho[i] + b.rho[i]) <= density_threshold)
            continue;
        worst = std::max(worst, std::abs((b.rho[i] - a.rho[i]) / dt + div[i]));
    }
    return worst;
}

MomentumBalance momentum_balance_residual(const WignerGrid& w0, const WignerGrid& w1,
                                          const WignerGrid& w2, double dt,
                                          const ScaledParams& params)
{
    if (!w0.same_lattice(w1) || !w1.same_lattice(w2))
        throw DomainError("momentum_balance_residual: mismatched lattices");
    if (!(dt > 0.0))
        throw DomainError("dt must be positive");
    const MomentFields m0 = moments(w0, 1);
    const MomentFields m1 = moments(w1, 2);
    const MomentFields m2 = moments(w2, 1);
    const double g = params.coupling();
    const std::size_t n = m1.rho.size();

    // Derivatives act only on smooth fields: g rho, rho P_2 and rho sigma_p^2, all built
    // from raw moments so nothing is masked before differentiation. The trap gradient x
    // is applied analytically since x^2 / 2 is not periodic on the grid.
    std::vector<double> interaction(n), second(n), spread(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int row = static_cast<int>(i);
        const double rho = m1.rho[i];
        interaction[i] = g * rho;
        double sum = 0.0;
        for (int j = 0; j < w1.np; ++j) {
            const double p = w1.p(j);
            sum += p * p * w1.at(row, j);
        }
        second[i] = sum * w1.dp;
        const double convective = rho > 1e-12 ? m1.flux[i] * m1.flux[i] / rho : 0.0;
        spread[i] = second[i] - convective;
    }
    const auto d_interaction = x_derivative(interaction, w1);
    const auto d_second = x_derivative(second, w1);
    const auto d_spread = x_derivative(spread, w1);
    const auto d_flux = x_derivative(m1.flux, w1);

    MomentumBalance out{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        if (!(m0.defined[i] && m1.defined[i] && m2.defined[i]))
            continue;
        const double rho = m1.rho[i];
        const double dP_dt = (m2.P[i] - m0.P[i]) / (2.0 * dt);
        const double force = w1.x(static_cast<int>(i)) + d_interaction[i];
        const double full = dP_dt + force + d_second[i] / rho - m1.P[i] * d_flux[i] / rho;
        const double hydro = full - d_spread[i] / rho;
        out.full = std::max(out.full, std::abs(full));
        out.hydrodynamic = std::max(out.hydrodynamic, std::abs(hydro));
    }
    return out;
}

double participation_ratio(const WignerGrid& w)
{
    double sum = 0.0;
    for (double v : w.values)
        if (v > 0.0)
            sum += v * v;
    sum *= w.dx * w.dp;
    if (!(sum > 0.0))
        throw DomainError("participation ratio of a non-positive distribution");
    return 1.0 / sum;
}

double purity(const WignerGrid& w)
{
    double sum = 0.0;
    for (double v : w.values)
        sum += v * v;
    return sum * w.dx * w.dp;
}

void write_wigner(const std::filesystem::path& path, const WignerGrid& w)
{
    binary::Writer out(path);
    out.magic("KGPEWIG1");
    out.u32(static_cast<std::uint32_t>(w.nx));
    out.u32(static_cast<std::uint32_t>(w.np));
    out.f64(w.x_min);
    out.f64(w.dx);
    out.f64(w.p_min);
    out.f64(w.dp);
    out.f64s(w.values);
    out.close();
}

WignerGrid read_wigner(const std::filesystem::path& path)
{
    binary::Reader in(path);
    in.expect_magic("KGPEWIG1");
    WignerGrid w;
    w.nx = static_cast<int>(in.u32());
    w.np = static_cast<int>(in.u32());
    w.x_min = in.f64();
    w.dx = in.f64();
    w.p_min = in.f64();
    w.dp = in.f64();
    if (w.nx <= 0 || w.np <= 0 || !(w.dx > 0.0) || !(w.dp > 0.0))
        throw FormatError(path.string() + ": invalid Wigner header");
    w.values.resize(static_cast<std::size_t>(w.nx) * w.np);
    in.f64s(w.values);
    return w;
}

} // namespace kgpe::wigner
