#include "kgpe/units.hpp"

#include "kgpe/error.hpp"

#include <cmath>
#include <numbers>

namespace kgpe {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw DomainError(std::string(name) + " must be positive and finite");
}

} // namespace

void ScaledParams::validate() const
{
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw DomainError("eta must be positive");
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw DomainError("kappa must be non-negative");
    if (!(upsilon >= 0.0) || !std::isfinite(upsilon))
        throw DomainError("upsilon must be non-negative");
    if (!(tau_h > 0.0) || !std::isfinite(tau_h))
        throw DomainError("tau_h must be positive");
    if (!std::isfinite(coupling()))
        throw DomainError("upsilon / eta^3 is not finite");
}

ScaledParams scale_from_single_particle(const PhysicalParams& p)
{
    require_positive(p.mass, "mass");
    require_positive(p.omega, "omega");
    require_positive(p.wavenumber, "wavenumber");
    require_positive(p.kick_period, "kick period");

    const double m = p.mass, w = p.omega, k = p.wavenumber;
    ScaledParams s;
    s.eta = k * std::sqrt(constants::hbar / (2.0 * m * w));
    s.kappa = p.kick_strength * k * k / (sqrt2 * m * w * w);
    s.upsilon = p.interaction * k * k * k / (2.0 * sqrt2 * m * w * w);
    s.tau_h = w * p.kick_period;
    return s;
}

SingleParticleDimensional unscale_single_particle(const ScaledParams& s, double mass,
                                                  double omega, double wavenumber)
{
    require_positive(mass, "mass");
    require_positive(omega, "omega");
    require_positive(wavenumber, "wavenumber");
    const double mw2 = mass * omega * omega;
    const double k = wavenumber;
    return {s.kappa * sqrt2 * mw2 / (k * k),
            s.upsilon * 2.0 * sqrt2 * mw2 / (k * k * k),
            s.tau_h / omega};
}

BecScaling scale_from_bec_experiment(const PhysicalParams& p)
{
    require_positive(p.mass, "mass");
    require_positive(p.omega, "omega");
    require_positive(p.wavenumber, "wavenumber");
    require_positive(p.kick_period, "kick period");
    require_positive(p.pulse_width, "pulse width");
    if (p.detuning == 0.0 || !std::isfinite(p.detuning))
        throw DomainError("detuning must be non-zero");
    if (p.particle_number < 0.0 || p.scattering_length < 0.0 || p.omega_radial < 0.0)
        throw DomainError("particle number, scattering length and radial frequency must be non-negative");

    const double hbar = constants::hbar;
    const double m = p.mass, w = p.omega, k = p.wavenumber;
    // The sign of Delta only shifts the kick lattice by half a period.
    const double detuning = std::abs(p.detuning);

    BecScaling out;
    out.scaled.eta = k * std::sqrt(2.0 * hbar / (m * w));
    out.scaled.kappa = hbar * k * k * p.pulse_width * std::sqrt(std::numbers::pi / 2.0) *
                       p.rabi * p.rabi / (2.0 * m * w * detuning);
    out.scaled.upsilon = 8.0 * hbar * p.particle_number * k * k * k * p.omega_radial *
                         p.scattering_length / (sqrt2 * m * w * w);
    out.scaled.tau_h = w * p.kick_period;
    out.spectrally_broad = p.pulse_width * detuning <= 1.0;
    return out;
}

Species sodium23()
{
    return {"Na23", 23.0 * constants::atomic_mass_unit, 2.75e-9};
}

Species rubidium87()
{
    return {"Rb87", 87.0 * constants::atomic_mass_unit, 5.1e-9};
}

ExperimentRow experiment_table(const Species& species, double upsilon, double eta_prime,
                               double omega_ratio)
{
    require_positive(species.mass, "species mass");
    require_positive(species.scattering_length, "scattering length");
    require_positive(eta_prime, "eta'");
    require_positive(omega_ratio, "omega_r / omega");
    if (!(upsilon >= 0.0))
        throw DomainError("upsilon must be non-negative");

    const double lambda = std::sqrt(constants::hbar / species.mass) * upsilon /
                          (2.0 * species.scattering_length * eta_prime * eta_prime * eta_prime);
    return {lambda, lambda * std::sqrt(1.0 / omega_ratio)};
}

} // namespace kgpe
