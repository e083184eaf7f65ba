#include "kgpe/classical.hpp"

#include "kgpe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace kgpe::classical {

double ResonanceSpec::tau_h() const
{
    return 2.0 * std::numbers::pi * r / q;
}

void ResonanceSpec::validate() const
{
    if (r < 1 || q < 1)
        throw DomainError("resonance r and q must be positive");
    if (std::gcd(r, q) != 1)
        throw DomainError("resonance r/q must be in lowest terms");
}

PhasePoint harmonic_rotate(PhasePoint pt, double tau_h)
{
    const double c = std::cos(tau_h), s = std::sin(tau_h);
    return {pt.x * c + pt.p * s, pt.p * c - pt.x * s};
}

PhasePoint kick(PhasePoint pt, double kappa)
{
    return {pt.x, pt.p + kappa * std::sin(std::numbers::sqrt2 * pt.x)};
}

PhasePoint kick_map(PhasePoint pt, double kappa, double tau_h)
{
    return harmonic_rotate(kick(pt, kappa), tau_h);
}

std::vector<PhasePoint> poincare_section(std::span<const PhasePoint> seeds, int n_kicks,
                                         const ResonanceSpec& spec, double kappa)
{
    if (n_kicks < 1)
        throw DomainError("poincare_section needs at least one kick");
    spec.validate();
    const double tau = spec.tau_h();
    // Both stages are exact maps; precompute the rotation once.
    const double c = std::cos(tau), s = std::sin(tau);
    std::vector<PhasePoint> cloud;
    cloud.reserve(seeds.size() * static_cast<std::size_t>(n_kicks));
    for (const auto& seed : seeds) {
        PhasePoint pt = seed;
        for (int k = 0; k < n_kicks; ++k) {
            cloud.push_back(pt);
            pt = kick(pt, kappa);
            pt = {pt.x * c + pt.p * s, pt.p * c - pt.x * s};
        }
    }
    return cloud;
}

double web_symmetry_score(std::span<const PhasePoint> cloud, int q)
{
    if (cloud.empty())
        throw DomainError("web_symmetry_score needs a non-empty cloud");
    if (q < 1)
        throw DomainError("q must be positive");

    // Any rotation of the cloud stays inside the square of half width max radius.
    double radius = 0.0;
    for (const auto& pt : cloud)
        radius = std::max(radius, std::hypot(pt.x, pt.p));
    if (radius == 0.0)
        return 1.0;
    radius *= 1.0 + 1e-12;

    constexpr int bins = symmetry_bins;
    const double width = 2.0 * radius / bins;
    auto bin = [&](double v) {
        return std::clamp(static_cast<int>(std::floor((v + radius) / width)), 0, bins - 1);
    };
    std::vector<double> h0(bins * bins, 0.0), h1(bins * bins, 0.0);
    const double angle = 2.0 * std::numbers::pi / q;
    const double c = std::cos(angle), s = std::sin(angle);
    for (const auto& pt : cloud) {
        h0[bin(pt.x) * bins + bin(pt.p)] += 1.0;
        const double xr = pt.x * c - pt.p * s;
        const double pr = pt.x * s + pt.p * c;
        h1[bin(xr) * bins + bin(pr)] += 1.0;
    }
    double bc = 0.0;
    for (std::size_t i = 0; i < h0.size(); ++i)
        bc += std::sqrt(h0[i] * h1[i]);
    return bc / static_cast<double>(cloud.size());
}

bool crystal_symmetry_admissible(int q)
{
    if (q < 1)
        throw DomainError("q must be positive");
    return q == 1 || q == 2 || q == 3 || q == 4 || q == 6;
}

} // namespace kgpe::classical
