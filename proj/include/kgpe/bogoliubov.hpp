#pragma once

#include "kgpe/gpe.hpp"
#include "kgpe/grid.hpp"
#include "kgpe/units.hpp"

#include <Eigen/Dense>

#include <vector>

namespace kgpe::bogoliubov {

inline constexpr int max_bdg_points = 2048;

// L = [[A, B], [-B*, -A*]] in the position representation, with
//   A = H_GP - mu + g Q |phi|^2 Q,   B = g Q phi^2 Q*,   Q = 1 - |phi><phi|.
// The ground state is real, so A and B are real symmetric.
struct BdgOperator {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    gpe::GroundState ground;
    ScaledParams params;

    Eigen::MatrixXd matrix() const; // the full 2n x 2n operator
};

// Throws ResourceError beyond max_bdg_points and DomainError for a complex ground state.
BdgOperator build_L(const gpe::GroundState& ground, const ScaledParams& params);

// All 2n eigenvalues from a general (non-symmetric) eigensolver, sorted by real part.
std::vector<complex> full_spectrum(const BdgOperator& L);

struct SpectrumCheck {
    double pairing_error; // max over eigenvalues E of min |E' + E|
    int zero_modes;       // eigenvalues with |E| < zero_tolerance
};
SpectrumCheck check_spectrum(const std::vector<complex>& eigenvalues, double zero_tolerance = 1e-6);

struct Mode {
    ComplexField u;
    ComplexField v;
    double energy = 0.0;
};

struct BdgModeSet {
    std::vector<Mode> modes; // ascending energy
    gpe::GroundState ground;
    ScaledParams params;
};

// K lowest positive-energy modes, normalized to <u|u> - <v|v> = 1, projected off the
// condensate, and phase-fixed so the largest |u| sample is real positive.
// Throws DomainError when K is not available or the top mode nears the grid cutoff,
// NumericalError when a mode has non-positive norm.
BdgModeSet diagonalize_modes(const BdgOperator& L, int K);

// Translates every u_k, v_k by a. Throws DomainError when a mode reaches the boundary strips.
BdgModeSet shift_modes(const BdgModeSet& set, double a);

// <u_j|u_k> - <v_j|v_k>
complex symplectic_product(const Mode& a, const Mode& b);

// Unprojected pairs (U_k, V_k) evolved next to the condensate they were built on.
struct WorkingSet {
    ComplexField phi;
    std::vector<ComplexField> U;
    std::vector<ComplexField> V;
    double t_h = 0.0;
    ScaledParams params;
};

WorkingSet make_working_set(const ComplexField& phi, const BdgModeSet& set,
                            const ScaledParams& params);

// Strang splitting of the condensate and the linearized pairs with shared substeps.
// Position sub-steps are exact for the joint flow (phi rotates by V + g|phi|^2 while
// the pair coupling is nilpotent after removing that rotation); momentum sub-steps apply
// exp(-i p^2 dt / 2) to phi and U and its conjugate to V. xi shifts H_GP by -xi for the
// condensate and the pairs alike: exp(+i xi dt) on phi and U, exp(-i xi dt) on V.
class LockstepEvolver {
public:
    LockstepEvolver(const Grid1D& grid, const ScaledParams& params, int n_substeps,
                    double xi = 0.0);

    // Advances by tau_h. Throws DomainError when `expected_t` differs from set.t_h by
    // more than 1e-12 and NumericalError on a boundary breach of the condensate.
    void evolve(WorkingSet& set, double expected_t) const;

private:
    void position(WorkingSet& set, double h) const;
    void momentum(WorkingSet& set) const;

    Grid1D grid_;
    double coupling_;
    double dt_;
    int n_substeps_;
    std::vector<double> trap_;
    CVector kinetic_; // exp(-i p^2 dt / 2) / n
    complex xi_phase_;
};

// Condensate and U get exp(-i K(x)), V gets exp(+i K(x)).
void kick_uv(WorkingSet& set);

struct MeasuredRow {
    std::vector<double> vk;      // <v_k|v_k>, v_k = Q* V_k
    double sum = 0.0;
    double norm_error = 0.0;     // max_k |<u_k|u_k> - <v_k|v_k> - 1|, u_k = Q U_k
};

MeasuredRow project_and_measure(const WorkingSet& set);

struct DepletionOptions {
    int n_kicks = 100;
    int modes = 15;
    int substeps = gpe::default_substeps;
    int n_points = 1024;
    double xi = 0.0;          // gauge shift H_GP -> H_GP - xi during evolution
    double global_phase = 0.0; // phi -> e^{i theta} phi, u -> e^{i theta} u, v -> e^{-i theta} v
};

struct DepletionSeries {
    std::vector<int> kick;
    std::vector<MeasuredRow> rows; // rows[k] sampled just before kick k; the last after the run
    std::vector<double> energies;
    double mu = 0.0;
};

// Ground state -> diagonalize -> shift condensate and modes to the centre -> lockstep
// kicked evolution with a measurement before every kick and after the last period.
DepletionSeries depletion_run(const ScaledParams& params, double center, const DepletionOptions& options);

} // namespace kgpe::bogoliubov
