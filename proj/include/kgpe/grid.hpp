#pragma once

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

namespace kgpe {

using complex = std::complex<double>;
using CVector = std::vector<complex>;

// Uniform position grid in harmonic units and its conjugate momentum grid.
//
// Fourier convention shared by every module:
//   f~(p) = dx / sqrt(2 pi) * sum_i f(x_i) exp(-i p x_i)
//   f(x)  = dp / sqrt(2 pi) * sum_j f~(p_j) exp(+i p_j x)
// with dp = 2 pi / (n dx). Momentum samples are stored in FFT order:
// p_j = j dp for j < n/2 and (j - n) dp otherwise, spanning [-pi/dx, pi/dx).
struct Grid1D {
    int n_points = 0;
    double x_min = 0.0;
    double dx = 0.0;

    double position(int i) const { return x_min + i * dx; }
    double dp() const;
    double momentum(int j) const;
    double x_max() const { return x_min + n_points * dx; }
    double half_width() const { return 0.5 * n_points * dx; }
    double p_max() const; // pi / dx

    std::vector<double> positions() const;
    std::vector<double> momenta() const; // FFT order

    bool operator==(const Grid1D&) const = default;
};

// Symmetric grid on [-half_width, half_width - dx]. n_points must be a power of two >= 16.
Grid1D make_grid(int n_points, double x_half_width);

// Default grid for a run whose state is displaced by x_shift: half width
// max(8, 4|x_shift| + 8, sqrt(pi n / 2)); the last term balances x and p extents.
Grid1D default_grid(double x_shift, int n_points = 1024);

enum class Space { position, momentum };

// Complex samples on a grid. In momentum space values follow Grid1D::momentum ordering.
struct ComplexField {
    Grid1D grid;
    CVector values;
    Space space = Space::position;

    ComplexField() = default;
    ComplexField(const Grid1D& g, Space s = Space::position)
        : grid(g), values(static_cast<std::size_t>(g.n_points)), space(s) {}
    ComplexField(const Grid1D& g, CVector v, Space s = Space::position);

    // sum |f|^2 dx (or dp in momentum space)
    double norm() const;
    double weight() const { return space == Space::position ? grid.dx : grid.dp(); }
};

// <a|b> with the grid weight.
complex inner(const ComplexField& a, const ComplexField& b);

ComplexField to_momentum(const ComplexField& f);
ComplexField from_momentum(const ComplexField& f);

// In-place unnormalized FFTs of length n on arbitrary (possibly unaligned) storage.
// Plans are cached per length; execution is reentrant.
void fft_forward(std::span<complex> data);
void fft_backward(std::span<complex> data);

// Spectral d^order/dx^order of position-space samples.
CVector spectral_derivative(std::span<const complex> values, const Grid1D& grid, int order = 1);
std::vector<double> spectral_derivative(std::span<const double> values, const Grid1D& grid,
                                        int order = 1);

// (p^2 / 2) f applied spectrally.
CVector apply_kinetic(std::span<const complex> values, const Grid1D& grid);

// f(x) -> f(x - a) by a momentum-space phase ramp.
ComplexField translate(const ComplexField& f, double a);

// Fraction of sum |f|^2 in the outer `fraction` of samples at each end (position or momentum).
double boundary_mass(const ComplexField& f, double fraction = 0.025);

// Dense Fourier-grid representation of p^2/2. Exactly symmetric Toeplitz.
// Throws ResourceError beyond max_dense_points.
inline constexpr int max_dense_points = 4096;
Eigen::MatrixXd kinetic_matrix(const Grid1D& grid);

// Binary field dump: "KGPEFLD1", u32 n, f64 x_min, f64 dx, n (re, im) f64 pairs, little-endian.
void write_field(const std::filesystem::path& path, const ComplexField& f);
ComplexField read_field(const std::filesystem::path& path);

} // namespace kgpe
