#include "kgpe/grid.hpp"

#include "kgpe/binary.hpp"
#include "kgpe/error.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace kgpe {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// FFTW plans for one transform length; aligned and unaligned variants.
class PlanSet {
public:
    explicit PlanSet(int n) : n_(n)
    {
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        forward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_MEASURE);
        backward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_MEASURE);
        forward_u_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_MEASURE | FFTW_UNALIGNED);
        backward_u_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_MEASURE | FFTW_UNALIGNED);
        alignment_ = fftw_alignment_of(reinterpret_cast<double*>(buf));
        fftw_free(buf);
    }
    ~PlanSet()
    {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_destroy_plan(forward_u_);
        fftw_destroy_plan(backward_u_);
    }
    PlanSet(const PlanSet&) = delete;
    PlanSet& operator=(const PlanSet&) = delete;

    void run(std::span<complex> data, bool forward) const
    {
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(p)) == alignment_;
        fftw_plan plan = forward ? (aligned ? forward_ : forward_u_)
                                 : (aligned ? backward_ : backward_u_);
        fftw_execute_dft(plan, p, p);
    }

private:
    int n_;
    int alignment_ = 0;
    fftw_plan forward_, backward_, forward_u_, backward_u_;
};

const PlanSet& plans_for(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<PlanSet>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<PlanSet>(n);
    return *slot;
}

void require_length(std::span<const complex> v, const Grid1D& g)
{
    if (static_cast<int>(v.size()) != g.n_points)
        throw DomainError("field length does not match grid");
}

} // namespace

double Grid1D::dp() const
{
    return two_pi / (n_points * dx);
}

double Grid1D::momentum(int j) const
{
    return (j < n_points / 2 ? j : j - n_points) * dp();
}

double Grid1D::p_max() const
{
    return std::numbers::pi / dx;
}

std::vector<double> Grid1D::positions() const
{
    std::vector<double> x(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        x[i] = position(i);
    return x;
}

std::vector<double> Grid1D::momenta() const
{
    std::vector<double> p(static_cast<std::size_t>(n_points));
    for (int j = 0; j < n_points; ++j)
        p[j] = momentum(j);
    return p;
}

Grid1D make_grid(int n_points, double x_half_width)
{
    if (n_points < 16 || !std::has_single_bit(static_cast<unsigned>(n_points)))
        throw DomainError("n_points must be a power of two >= 16");
    if (!(x_half_width > 0.0) || !std::isfinite(x_half_width))
        throw DomainError("x_half_width must be positive");
    const double dx = 2.0 * x_half_width / n_points;
    return {n_points, -x_half_width, dx};
}

Grid1D default_grid(double x_shift, int n_points)
{
    // Never narrower than the width that gives equal position and momentum extents.
    const double balanced = std::sqrt(std::numbers::pi * n_points / 2.0);
    return make_grid(n_points, std::max({8.0, 4.0 * std::abs(x_shift) + 8.0, balanced}));
}

ComplexField::ComplexField(const Grid1D& g, CVector v, Space s)
    : grid(g), values(std::move(v)), space(s)
{
    require_length(values, grid);
}

double ComplexField::norm() const
{
    double sum = 0.0;
    for (const auto& z : values)
        sum += std::norm(z);
    return sum * weight();
}

complex inner(const ComplexField& a, const ComplexField& b)
{
    if (a.grid != b.grid || a.space != b.space)
        throw DomainError("inner product of fields on different grids");
    complex sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        sum += std::conj(a.values[i]) * b.values[i];
    return sum * a.weight();
}

void fft_forward(std::span<complex> data)
{
    plans_for(static_cast<int>(data.size())).run(data, true);
}

void fft_backward(std::span<complex> data)
{
    plans_for(static_cast<int>(data.size())).run(data, false);
}

ComplexField to_momentum(const ComplexField& f)
{
    if (f.space != Space::position)
        throw DomainError("to_momentum expects a position-space field");
    const Grid1D& g = f.grid;
    ComplexField out(g, f.values, Space::momentum);
    fft_forward(out.values);
    const double scale = g.dx / std::sqrt(two_pi);
    for (int j = 0; j < g.n_points; ++j)
        out.values[j] *= scale * std::polar(1.0, -g.momentum(j) * g.x_min);
    return out;
}

ComplexField from_momentum(const ComplexField& f)
{
    if (f.space != Space::momentum)
        throw DomainError("from_momentum expects a momentum-space field");
    const Grid1D& g = f.grid;
    ComplexField out(g, f.values, Space::position);
    for (int j = 0; j < g.n_points; ++j)
        out.values[j] *= std::polar(1.0, g.momentum(j) * g.x_min);
    fft_backward(out.values);
    const double scale = g.dp() / std::sqrt(two_pi);
    for (auto& z : out.values)
        z *= scale;
    return out;
}

CVector spectral_derivative(std::span<const complex> values, const Grid1D& grid, int order)
{
    require_length(values, grid);
    CVector work(values.begin(), values.end());
    fft_forward(work);
    const int n = grid.n_points;
    for (int j = 0; j < n; ++j) {
        // The Nyquist component has no partner; drop it for odd orders.
        if (j == n / 2 && order % 2 == 1) {
            work[j] = 0.0;
            continue;
        }
        work[j] *= std::pow(complex(0.0, grid.momentum(j)), order) / static_cast<double>(n);
    }
    fft_backward(work);
    return work;
}

std::vector<double> spectral_derivative(std::span<const double> values, const Grid1D& grid,
                                        int order)
{
    CVector c(values.begin(), values.end());
    CVector d = spectral_derivative(c, grid, order);
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        out[i] = d[i].real();
    return out;
}

CVector apply_kinetic(std::span<const complex> values, const Grid1D& grid)
{
    require_length(values, grid);
    CVector work(values.begin(), values.end());
    fft_forward(work);
    const int n = grid.n_points;
    for (int j = 0; j < n; ++j) {
        const double p = grid.momentum(j);
        work[j] *= 0.5 * p * p / n;
    }
    fft_backward(work);
    return work;
}

ComplexField translate(const ComplexField& f, double a)
{
    if (f.space != Space::position)
        throw DomainError("translate expects a position-space field");
    if (a == 0.0)
        return f;
    const Grid1D& g = f.grid;
    ComplexField out = f;
    fft_forward(out.values);
    const int n = g.n_points;
    for (int j = 0; j < n; ++j) {
        out.values[j] *= std::polar(1.0 / n, -g.momentum(j) * a);
    }
    fft_backward(out.values);
    return out;
}

double boundary_mass(const ComplexField& f, double fraction)
{
    const int n = f.grid.n_points;
    const int strip = std::max(1, static_cast<int>(fraction * n));
    double edge = 0.0, total = 0.0;
    if (f.space == Space::position) {
        for (int i = 0; i < n; ++i) {
            const double w = std::norm(f.values[i]);
            total += w;
            if (i < strip || i >= n - strip)
                edge += w;
        }
    } else {
        // FFT order: the largest |p| sit around index n/2.
        for (int j = 0; j < n; ++j) {
            const double w = std::norm(f.values[j]);
            total += w;
            if (std::abs(j - n / 2) < strip)
                edge += w;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

Eigen::MatrixXd kinetic_matrix(const Grid1D& grid)
{
    const int n = grid.n_points;
    if (n > max_dense_points)
        throw ResourceError("kinetic_matrix: " + std::to_string(n) +
                            " points exceed the dense limit of " +
                            std::to_string(max_dense_points) + "; use a coarser grid");
    // First row: T(m) = (1/n) sum_j (p_j^2 / 2) exp(i p_j m dx), real by symmetry.
    CVector row(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double p = grid.momentum(j);
        row[j] = 0.5 * p * p / n;
    }
    fft_backward(row);
    Eigen::MatrixXd t(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            t(i, k) = row[static_cast<std::size_t>(std::abs(i - k))].real();
    return t;
}

void write_field(const std::filesystem::path& path, const ComplexField& f)
{
    if (f.space != Space::position)
        throw DomainError("only position-space fields are dumped");
    binary::Writer w(path);
    w.magic("KGPEFLD1");
    w.u32(static_cast<std::uint32_t>(f.grid.n_points));
    w.f64(f.grid.x_min);
    w.f64(f.grid.dx);
    for (const auto& z : f.values) {
        w.f64(z.real());
        w.f64(z.imag());
    }
    w.close();
}

ComplexField read_field(const std::filesystem::path& path)
{
    binary::Reader r(path);
    r.expect_magic("KGPEFLD1");
    Grid1D g;
    g.n_points = static_cast<int>(r.u32());
    g.x_min = r.f64();
    g.dx = r.f64();
    if (g.n_points <= 0 || !(g.dx > 0.0))
        throw FormatError(path.string() + ": invalid grid header");
    ComplexField f(g);
    for (auto& z : f.values) {
        const double re = r.f64();
        const double im = r.f64();
        z = {re, im};
    }
    return f;
}

} // namespace kgpe
