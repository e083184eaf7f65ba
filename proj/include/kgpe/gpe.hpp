#pragma once

#include "kgpe/grid.hpp"
#include "kgpe/units.hpp"

#include <functional>
#include <vector>

namespace kgpe::gpe {

struct GpeState {
    ComplexField field; // harmonic-unit wavefunction
    double t_h = 0.0;
    ScaledParams params;
};

struct GroundState {
    ComplexField field; // real and non-negative
    double mu = 0.0;    // chemical potential in units of hbar omega
    double residual = 0.0; // || (H_GP - mu) phi ||
};

// Phase kappa cos(sqrt2 eta x) / (sqrt2 eta^2) imprinted by one kick.
double kick_phase(double x, const ScaledParams& params);

// Centres of the initial wave packets in harmonic units.
enum class Center { unstable, stable };
double center_position(Center c, double eta); // sqrt2 pi / eta or 2 sqrt2 pi / eta

// Real-time Strang integrator for i dphi/dt = [p^2/2 + x^2/2 + g |phi|^2] phi.
// The nonlinear phase uses |phi|^2 at the start of each half step, which is exact
// for the position sub-flow.
class SplitStepper {
public:
    SplitStepper(const Grid1D& grid, const ScaledParams& params, double dt);

    // n full Strang steps; consecutive position half steps are fused.
    void advance(CVector& psi, int n_steps) const;

private:
    void position_phase(CVector& psi, double h) const;

    Grid1D grid_;
    double coupling_;
    double dt_;
    std::vector<double> trap_;
    CVector kinetic_;   // exp(-i p^2 dt / 2) / n
    CVector half_trap_; // exp(-i x^2 dt / 4), used when the coupling vanishes
    CVector full_trap_;
};

inline constexpr int default_substeps = 2048;
inline constexpr double boundary_tolerance = 1e-8;

// Advances by tau_h. Throws NumericalError when the boundary monitor (position or
// momentum outer strips) exceeds boundary_tolerance.
GpeState evolve_between_kicks(const GpeState& state, double tau_h, int n_substeps,
                              bool monitor = true);

// phi -> exp(-i kick_phase) phi.
GpeState apply_kick(const GpeState& state);
void apply_kick_in_place(ComplexField& field, const ScaledParams& params, double sign = 1.0);

struct GroundStateOptions {
    std::vector<double> dt_schedule{1e-2, 1e-3, 1e-4};
    int sweep_steps = 50;
    double mu_tolerance = 1e-10;
    double residual_tolerance = 1e-7;
    long max_steps = 2'000'000;
};

// Imaginary-time split-operator relaxation in the pure harmonic trap.
// Throws NumericalError carrying the last residual when the budget runs out.
GroundState ground_state(const ScaledParams& params, const Grid1D& grid,
                         const GroundStateOptions& options = {});

// phi(x) -> phi(x - a). Throws DomainError when the shifted field reaches the boundary strips.
ComplexField displace(const ComplexField& field, double a);

// Observables.
double energy(const ComplexField& field, const ScaledParams& params); // no kick term
double chemical_potential(const ComplexField& field, const ScaledParams& params);
double stationarity_residual(const ComplexField& field, const ScaledParams& params, double mu);
double mean_position(const ComplexField& field);
double mean_momentum(const ComplexField& field);

struct SeriesRow {
    int kick;
    double t_h;
    double norm;
    double energy;
    double mean_x;
    double mean_p;
};

struct RunRecord {
    GpeState final_state;
    std::vector<SeriesRow> series; // one row per observed pre-kick state, plus the final state
};

using Observer = std::function<void(int kick, const GpeState&)>;

// Repeats {observe, kick, evolve tau_h} n_kicks times. Observers see each pre-kick state.
RunRecord run_kicked(const GpeState& state0, int n_kicks, int n_substeps,
                     const std::vector<Observer>& observers = {});

struct FloquetCheck {
    double norm;     // max over test states of ||[D(alpha), F^q] psi|| / ||psi||
    bool admissible; // q crystallographic and alpha on the commuting lattice
};

// Commutator of the phase-space displacement D(alpha) = exp(i(w x - xi p)),
// alpha = (xi + i w) / sqrt2, with q linear Floquet periods. params.tau_h must be 2 pi r / q.
FloquetCheck floquet_commutator_norm(const ScaledParams& params, int q, complex alpha);

} // namespace kgpe::gpe
