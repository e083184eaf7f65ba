#pragma once

#include <numbers>
#include <string>

namespace kgpe {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
} // namespace constants

// Laboratory parameters in SI units.
struct PhysicalParams {
    double mass = 0.0;              // kg
    double omega = 0.0;             // axial trap frequency, rad/s
    double omega_radial = 0.0;      // radial trap frequency, rad/s
    double wavenumber = 0.0;        // laser wavenumber k, 1/m
    double kick_strength = 0.0;     // K, J
    double interaction = 0.0;       // u, J m
    double scattering_length = 0.0; // a_s, m
    double particle_number = 0.0;   // N
    double rabi = 0.0;              // pulse Rabi amplitude Omega, rad/s
    double detuning = 0.0;          // Delta, rad/s
    double pulse_width = 0.0;       // sigma, s
    double kick_period = 0.0;       // tau, s
};

// Dimensionless control set shared by every dynamical module.
struct ScaledParams {
    double eta = 1.0;      // Lamb-Dicke parameter
    double kappa = 1.0;    // kick strength
    double upsilon = 0.0;  // nonlinearity strength
    double tau_h = std::numbers::pi / 3.0; // kick period in units of 1/omega

    // GPE coupling in harmonic units, upsilon / eta^3.
    double coupling() const { return upsilon / (eta * eta * eta); }

    // Throws DomainError when an invariant is violated.
    void validate() const;
};

ScaledParams scale_from_single_particle(const PhysicalParams& p);

// Recovered (K, u, tau) from a scaled set and the (m, omega, k) it was built from.
struct SingleParticleDimensional {
    double kick_strength;
    double interaction;
    double kick_period;
};
SingleParticleDimensional unscale_single_particle(const ScaledParams& s, double mass,
                                                  double omega, double wavenumber);

struct BecScaling {
    ScaledParams scaled;      // eta holds eta' = k sqrt(2 hbar / m omega)
    bool spectrally_broad;    // sigma * |Delta| <= 1: pulse too short for adiabatic elimination
};

// Scaling for the cos(2kx) condensate kick. Throws DomainError for Delta == 0 or sigma <= 0.
BecScaling scale_from_bec_experiment(const PhysicalParams& p);

struct Species {
    std::string name;
    double mass;              // kg
    double scattering_length; // m
};

Species sodium23();
Species rubidium87();

struct ExperimentRow {
    double lambda; // s^(-1/2), N = lambda sqrt(omega) / omega_r
    double nu;     // s^(-1/2), N = nu / sqrt(omega_r)
};

ExperimentRow experiment_table(const Species& species, double upsilon, double eta_prime,
                               double omega_ratio);

} // namespace kgpe
