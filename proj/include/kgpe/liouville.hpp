#pragma once

#include "kgpe/grid.hpp"
#include "kgpe/units.hpp"
#include "kgpe/wigner.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace kgpe::liouville {

// Equal-weight phase-space samples in harmonic units (unit mass).
struct Ensemble {
    std::vector<double> x;
    std::vector<double> p;
    std::uint64_t seed = 0;
    ScaledParams params;

    std::size_t size() const { return x.size(); }
    double weight() const { return x.empty() ? 0.0 : 1.0 / static_cast<double>(x.size()); }
};

// Largest fraction of |W| mass allowed in negative cells before sampling refuses.
inline constexpr double max_negative_fraction = 0.01;

// Draws n samples from max(W, 0): a cell is picked by inverse CDF, then the point is
// placed uniformly inside it. Particle i uses its own generator seeded from (seed, i),
// so results do not depend on evaluation order.
Ensemble sample_from_wigner(const wigner::WignerGrid& w, std::size_t n, std::uint64_t seed,
                            const ScaledParams& params);

struct CoarseDensity {
    Grid1D grid;
    std::vector<double> rho; // >= 0, sum rho dx = 1
    double bandwidth = 0.0;
};

// Gaussian kernel estimate: cloud-in-cell deposit, then spectral smoothing by
// exp(-k^2 bandwidth^2 / 2). Particles outside the grid are ignored; the rest is
// renormalized to unit mass. Throws DomainError when bandwidth < dx.
CoarseDensity coarse_density(std::span<const double> x, const Grid1D& grid, double bandwidth);

// -g d(rho)/dx on the density grid.
std::vector<double> mean_field_force(const CoarseDensity& density, double coupling);

struct TransportOptions {
    int substeps = 1024;        // per kick period
    int density_refresh = 1;    // substeps between density updates
    double bandwidth_cells = 4; // kernel width in grid spacings
};

// Per substep: half mean-field impulse, exact harmonic rotation over dt, half impulse.
// The trap part is integrated exactly, so coupling 0 reproduces the classical map to
// rounding. Particles outside the density grid feel only the trap and are counted.
class MeanFieldIntegrator {
public:
    MeanFieldIntegrator(const Grid1D& grid, const ScaledParams& params,
                        const TransportOptions& options);

    double dt() const { return dt_; }
    // Advances by n substeps; returns the number of out-of-grid force evaluations.
    long advance(Ensemble& e, int n_steps);

private:
    void refresh(const Ensemble& e);
    long impulse(Ensemble& e, double h) const;

    Grid1D grid_;
    double coupling_;
    double dt_;
    TransportOptions options_;
    std::vector<double> force_;
    int since_refresh_ = 0;
    bool fresh_ = false;
};

// Requires dt <= tau_h / 256. Throws DomainError otherwise.
long step_mean_field(Ensemble& e, const Grid1D& grid, const TransportOptions& options,
                     int n_steps);

// p -> p + (kappa / eta) sin(sqrt2 eta x).
void kick_ensemble(Ensemble& e);

// Normalized 2D histogram on a Wigner lattice: counts / (N dx dp). Samples off the
// lattice are dropped from the counts but still count in N.
wigner::WignerGrid histogram(const Ensemble& e, const wigner::WignerGrid& lattice);

struct EnsembleRow {
    int kick;
    double t_h;
    double mean_x;
    double mean_p;
    double var_x;
    double var_p;
};

struct EnsembleRun {
    Ensemble final_state;
    wigner::WignerGrid average; // time average of pre-kick histograms
    std::vector<EnsembleRow> series;
    long out_of_grid = 0;
};

using Observer = std::function<void(int kick, const Ensemble&)>;

// Repeats {observe, kick, transport tau_h} n_kicks times and observes the final state,
// so the average holds n_kicks + 1 histograms.
EnsembleRun run_kicked_ensemble(const Ensemble& e0, int n_kicks, const Grid1D& grid,
                                const wigner::WignerGrid& lattice,
                                const TransportOptions& options = {},
                                const std::vector<Observer>& observers = {});

// Checkpoint: "KGPEENS1", u32 N, N (x, p) f64 pairs, little-endian.
void write_ensemble(const std::filesystem::path& path, const Ensemble& e);
Ensemble read_ensemble(const std::filesystem::path& path, const ScaledParams& params);

} // namespace kgpe::liouville
