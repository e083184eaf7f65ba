#pragma once

#include "kgpe/grid.hpp"
#include "kgpe/units.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace kgpe::wigner {

// Real W(x_i, p_j) on a position x momentum lattice, row-major (x index major).
struct WignerGrid {
    int nx = 0;
    int np = 0;
    double x_min = 0.0;
    double dx = 0.0;
    double p_min = 0.0;
    double dp = 0.0;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * np + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * np + j]; }
    double x(int i) const { return x_min + i * dx; }
    double p(int j) const { return p_min + j * dp; }

    double total() const; // sum W dx dp
    std::vector<double> position_marginal() const; // sum_j W dp
    std::vector<double> momentum_marginal() const; // sum_i W dx
    bool same_lattice(const WignerGrid& other) const;
};

// Empty lattice matching the Wigner plane of a field grid: nx = n, dp = pi / (n dx),
// p in [-pi / (2 dx), pi / (2 dx)).
WignerGrid wigner_lattice(const Grid1D& grid);

// W(x_i, p_j) = (dx / pi) Re sum_m exp(-2 i p_j m dx) phi*(x_i - m dx) phi(x_i + m dx),
// |m| <= n/2 with zero padding outside the grid.
WignerGrid wigner_transform(const ComplexField& field);

// Pointwise mean; throws DomainError for an empty list or mismatched lattices.
WignerGrid accumulate_time_average(std::span<const WignerGrid> snapshots);

// Streaming version of accumulate_time_average.
class TimeAverage {
public:
    void add(const WignerGrid& w);
    int count() const { return count_; }
    WignerGrid result() const;

private:
    WignerGrid sum_;
    int count_ = 0;
};

inline constexpr double density_threshold = 1e-6;

struct MomentFields {
    std::vector<double> rho;              // integral W dp, clipped at 0
    std::vector<double> flux;             // rho P = integral p W dp
    std::vector<double> P;                // flux / rho where defined, else 0
    std::vector<std::vector<double>> P_n; // P_n[k] holds moment n = k + 2
    std::vector<double> sigma_p2;         // P_2 - P^2
    std::vector<bool> defined;            // rho >= density_threshold
};

MomentFields moments(const WignerGrid& w, int n_max);

// Spectral derivative along x of samples on a Wigner lattice.
std::vector<double> x_derivative(std::span<const double> values, const WignerGrid& w);

// max |d rho/dt + d(rho P)/dx| over rho > density_threshold, from two snapshots dt apart.
// The flux is the average of both snapshots (centred in time).
double continuity_residual(const WignerGrid& before, const WignerGrid& after, double dt);

struct MomentumBalance {
    double full;         // with the -(1/rho) d(rho sigma_p^2)/dx term
    double hydrodynamic; // without it
};

// Residuals of dP/dt = -d/dx(x^2/2 + g rho + P^2/2) - (1/rho) d(rho sigma_p^2)/dx,
// centred on the middle of three snapshots spaced dt apart.
MomentumBalance momentum_balance_residual(const WignerGrid& w0, const WignerGrid& w1,
                                          const WignerGrid& w2, double dt,
                                          const ScaledParams& params);

// 1 / (sum W_+^2 dx dp) over the positive part of W.
double participation_ratio(const WignerGrid& w);

// sum W^2 dx dp
double purity(const WignerGrid& w);

// Binary dump: "KGPEWIG1", u32 nx, u32 np, f64 x_min, dx, p_min, dp, row-major f64 values.
void write_wigner(const std::filesystem::path& path, const WignerGrid& w);
WignerGrid read_wigner(const std::filesystem::path& path);

} // namespace kgpe::wigner
