#pragma once

#include <span>
#include <vector>

namespace kgpe::classical {

// Scaled phase-space point: x~ = eta x_h, p~ = eta p_h.
struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

// Resonance tau_h = 2 pi r / q.
struct ResonanceSpec {
    int r = 1;
    int q = 6;

    double tau_h() const;
    void validate() const; // gcd(r, q) == 1, r >= 1, q >= 1
};

// Free harmonic flow over tau_h: clockwise rotation of (x~, p~).
PhasePoint harmonic_rotate(PhasePoint pt, double tau_h);

// Delta kick from the potential (kappa / sqrt2) cos(sqrt2 x~): p~ += kappa sin(sqrt2 x~).
PhasePoint kick(PhasePoint pt, double kappa);

// One kick period starting just before a kick: kick, then rotate.
PhasePoint kick_map(PhasePoint pt, double kappa, double tau_h);

// For each seed, n_kicks points sampled just before each kick (the seed itself first),
// concatenated in seed order.
std::vector<PhasePoint> poincare_section(std::span<const PhasePoint> seeds, int n_kicks,
                                         const ResonanceSpec& spec, double kappa);

// Bhattacharyya overlap between the 256x256 histogram of the cloud and that of the cloud
// rotated by 2 pi / q, over the origin-centred square enclosing both. 1 means q-symmetric.
inline constexpr int symmetry_bins = 256;
double web_symmetry_score(std::span<const PhasePoint> cloud, int q);

// True iff a q-fold rotation is compatible with a phase-space lattice: q in {1, 2, 3, 4, 6}.
bool crystal_symmetry_admissible(int q);

} // namespace kgpe::classical
