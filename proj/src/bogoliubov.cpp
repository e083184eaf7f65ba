#include "kgpe/bogoliubov.hpp"

#include "kgpe/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

namespace kgpe::bogoliubov {

namespace {

constexpr complex I{0.0, 1.0};

Eigen::VectorXd real_samples(const ComplexField& f)
{
    const int n = f.grid.n_points;
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(f.values[i].imag()) > 1e-12)
            throw DomainError("the Bogoliubov operator needs a real ground state");
        out(i) = f.values[i].real();
    }
    return out;
}

ComplexField to_field(const Grid1D& g, const Eigen::VectorXd& v)
{
    ComplexField f(g);
    for (int i = 0; i < g.n_points; ++i)
        f.values[i] = v(i);
    return f;
}

double inf_norm(const Eigen::MatrixXd& m)
{
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Edge mass of a mode pair relative to <u|u> + <v|v>, so a vanishing v does not count.
void check_edges(const Mode& m, const char* what)
{
    const double nu = m.u.norm(), nv = m.v.norm();
    auto edge = [](const ComplexField& f) {
        return std::max(boundary_mass(f), boundary_mass(to_momentum(f))) * f.norm();
    };
    const double total = nu + nv;
    const double frac = total > 0.0 ? (edge(m.u) + edge(m.v)) / total : 0.0;
    if (frac > gpe::boundary_tolerance) {
        std::ostringstream msg;
        msg << what << ": edge mass " << frac << " exceeds " << gpe::boundary_tolerance;
        throw DomainError(msg.str());
    }
}

} // namespace

Eigen::MatrixXd BdgOperator::matrix() const
{
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd L(2 * n, 2 * n);
    L.topLeftCorner(n, n) = A;
    L.topRightCorner(n, n) = B;
    L.bottomLeftCorner(n, n) = -B;
    L.bottomRightCorner(n, n) = -A;
    return L;
}

BdgOperator build_L(const gpe::GroundState& ground, const ScaledParams& params)
{
    const Grid1D& g = ground.field.grid;
    const int n = g.n_points;
    if (n > max_bdg_points)
        throw ResourceError("dense Bogoliubov operator limited to " +
                            std::to_string(max_bdg_points) + " grid points");
    const Eigen::VectorXd phi = real_samples(ground.field);
    const double gc = params.coupling();
    const double dx = g.dx;

    BdgOperator L;
    L.ground = ground;
    L.params = params;

    // Q diag(phi^2) Q expanded so no n^3 product is needed.
    const Eigen::VectorXd d = phi.cwiseProduct(phi);
    const Eigen::VectorXd w = d.cwiseProduct(phi);
    const double phw = phi.dot(w) * dx;
    Eigen::MatrixXd qdq = -dx * (phi * w.transpose() + w * phi.transpose()) +
                          (phw * dx) * (phi * phi.transpose());
    qdq.diagonal() += d;

    Eigen::MatrixXd h = kinetic_matrix(g);
    for (int i = 0; i < n; ++i) {
        const double x = g.position(i);
        h(i, i) += 0.5 * x * x + gc * d(i) - ground.mu;
    }
    L.B = gc * qdq;
    L.A = h + L.B;
    return L;
}

std::vector<complex> full_spectrum(const BdgOperator& L)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(L.matrix(), false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("general eigensolver failed on the Bogoliubov operator", 0.0);
    const auto ev = solver.eigenvalues();
    std::vector<complex> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](complex a, complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

SpectrumCheck check_spectrum(const std::vector<complex>& eigenvalues, double zero_tolerance)
{
    SpectrumCheck out{0.0, 0};
    for (complex e : eigenvalues) {
        double best = std::numeric_limits<double>::infinity();
        for (complex f : eigenvalues)
            best = std::min(best, std::abs(f + e));
        out.pairing_error = std::max(out.pairing_error, best);
        if (std::abs(e) < zero_tolerance)
            ++out.zero_modes;
    }
    return out;
}

BdgModeSet diagonalize_modes(const BdgOperator& L, int K)
{
    const Grid1D& g = L.ground.field.grid;
    const int n = g.n_points;
    if (K < 1 || K > n - 1)
        throw DomainError("requested mode count outside [1, n - 1]");
    const double dx = g.dx;
    const Eigen::VectorXd phi = real_samples(L.ground.field);

    // With f+- = u +- v the pair equations become (A - B) f- = E f+ and (A + B) f+ = E f-.
    // Both blocks annihilate phi; lifting phi by c above either spectrum parks the zero
    // modes at E^2 = c^2, above every physical mode.
    const Eigen::MatrixXd minus = L.A - L.B;
    const Eigen::MatrixXd plus = L.A + L.B;
    const double c = 2.0 * std::max(inf_norm(minus), inf_norm(plus)) + 1.0;
    const Eigen::MatrixXd lift = (c * dx) * (phi * phi.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> root(minus + lift);
    if (root.info() != Eigen::Success)
        throw NumericalError("eigensolver failed on A - B", 0.0);
    const Eigen::VectorXd lam = root.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd S = root.eigenvectors() * lam.asDiagonal() *
                              root.eigenvectors().transpose();
    Eigen::MatrixXd reduced = S * (plus + lift) * S;
    reduced = 0.5 * (reduced + reduced.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensolver failed on the reduced Bogoliubov problem", 0.0);

    const double cutoff = 0.25 * 0.5 * g.p_max() * g.p_max();
    const bool decoupled = L.B.cwiseAbs().maxCoeff() == 0.0;
    BdgModeSet set;
    set.ground = L.ground;
    set.params = L.params;
    for (int k = 0; k < K; ++k) {
        const double e2 = solver.eigenvalues()(k);
        if (!(e2 > 0.0))
            throw NumericalError("non-positive squared Bogoliubov energy", e2);
        const double E = std::sqrt(e2);
        if (E > cutoff)
            throw DomainError("grid too coarse: mode energy near the kinetic cutoff");

        const Eigen::VectorXd fp = S * solver.eigenvectors().col(k);
        const Eigen::VectorXd fm = plus * fp / E;
        Eigen::VectorXd u = 0.5 * (fp + fm);
        Eigen::VectorXd v = 0.5 * (fp - fm);
        if (decoupled) // without pairing v vanishes exactly, not just to rounding
            v.setZero();
        u -= phi * (phi.dot(u) * dx);
        v -= phi * (phi.dot(v) * dx);
        const double norm = (u.squaredNorm() - v.squaredNorm()) * dx;
        if (!(norm > 0.0))
            throw NumericalError("Bogoliubov mode with non-positive norm", norm);
        const double scale = 1.0 / std::sqrt(norm);
        Eigen::Index imax;
        u.cwiseAbs().maxCoeff(&imax);
        const double sign = u(imax) < 0.0 ? -scale : scale;
        set.modes.push_back({to_field(g, sign * u), to_field(g, sign * v), E});
    }
    return set;
}

BdgModeSet shift_modes(const BdgModeSet& set, double a)
{
    BdgModeSet out = set;
    if (a == 0.0)
        return out;
    for (auto& m : out.modes) {
        m.u = translate(m.u, a);
        m.v = translate(m.v, a);
        check_edges(m, "shift_modes");
    }
    return out;
}

complex symplectic_product(const Mode& a, const Mode& b)
{
    return inner(a.u, b.u) - inner(a.v, b.v);
}

WorkingSet make_working_set(const ComplexField& phi, const BdgModeSet& set,
                            const ScaledParams& params)
{
    WorkingSet w;
    w.phi = phi;
    w.params = params;
    for (const auto& m : set.modes) {
        if (!(m.u.grid == phi.grid))
            throw DomainError("modes and condensate live on different grids");
        w.U.push_back(m.u);
        w.V.push_back(m.v);
    }
    return w;
}

LockstepEvolver::LockstepEvolver(const Grid1D& grid, const ScaledParams& params,
                                 int n_substeps, double xi)
    : grid_(grid), coupling_(params.coupling()), dt_(params.tau_h / n_substeps),
      n_substeps_(n_substeps)
{
    if (n_substeps < 1)
        throw DomainError("n_substeps must be >= 1");
    const int n = grid.n_points;
    trap_.resize(n);
    kinetic_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.position(i);
        trap_[i] = 0.5 * x * x;
        const double p = grid.momentum(i);
        kinetic_[i] = std::polar(1.0 / n, -0.5 * p * p * dt_);
    }
    xi_phase_ = std::polar(1.0, xi * dt_);
}

void LockstepEvolver::position(WorkingSet& set, double h) const
{
    const int n = grid_.n_points;
    const double g = coupling_;
    CVector& phi = set.phi.values;
    // Removing the rotation exp(-i theta t), theta = V + g|phi|^2, leaves the pair
    // generator [[g rho, g phi^2], [-g phi*^2, -g rho]], which squares to zero.
    std::vector<double> grho(static_cast<std::size_t>(n));
    CVector rot(static_cast<std::size_t>(n)), pair(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grho[i] = g * std::norm(phi[i]);
        rot[i] = std::polar(1.0, -(trap_[i] + grho[i]) * h);
        pair[i] = g * phi[i] * phi[i];
    }
    for (std::size_t k = 0; k < set.U.size(); ++k) {
        CVector& U = set.U[k].values;
        CVector& V = set.V[k].values;
        for (int i = 0; i < n; ++i) {
            const complex u0 = U[i], v0 = V[i];
            U[i] = rot[i] * (u0 - I * h * (grho[i] * u0 + pair[i] * v0));
            V[i] = std::conj(rot[i]) * (v0 + I * h * (std::conj(pair[i]) * u0 + grho[i] * v0));
        }
    }
    for (int i = 0; i < n; ++i)
        phi[i] *= rot[i];
}

void LockstepEvolver::momentum(WorkingSet& set) const
{
    const int n = grid_.n_points;
    auto apply = [&](CVector& f, bool conjugate, complex extra) {
        fft_forward(f);
        for (int j = 0; j < n; ++j)
            f[j] *= (conjugate ? std::conj(kinetic_[j]) : kinetic_[j]) * extra;
        fft_backward(f);
    };
    apply(set.phi.values, false, xi_phase_);
    for (auto& u : set.U)
        apply(u.values, false, xi_phase_);
    for (auto& v : set.V)
        apply(v.values, true, std::conj(xi_phase_));
}

void LockstepEvolver::evolve(WorkingSet& set, double expected_t) const
{
    if (std::abs(set.t_h - expected_t) > 1e-12)
        throw DomainError("lockstep violation: condensate and modes out of step");
    if (!(set.phi.grid == grid_))
        throw DomainError("working set lives on a different grid");
    // Strang steps with consecutive position half steps fused; the position flow is exact.
    position(set, 0.5 * dt_);
    for (int s = 0; s < n_substeps_; ++s) {
        momentum(set);
        position(set, s + 1 < n_substeps_ ? dt_ : 0.5 * dt_);
    }
    set.t_h += dt_ * n_substeps_;
    const double edge_x = boundary_mass(set.phi);
    const double edge_p = boundary_mass(to_momentum(set.phi));
    const double edge = std::max(edge_x, edge_p);
    if (edge > gpe::boundary_tolerance) {
        std::ostringstream msg;
        msg << "boundary monitor: condensate edge mass " << edge << " at t_h = " << set.t_h;
        throw NumericalError(msg.str(), edge);
    }
}

void kick_uv(WorkingSet& set)
{
    if (set.params.kappa == 0.0)
        return;
    const Grid1D& g = set.phi.grid;
    for (int i = 0; i < g.n_points; ++i) {
        const complex ph = std::polar(1.0, -gpe::kick_phase(g.position(i), set.params));
        set.phi.values[i] *= ph;
        for (auto& u : set.U)
            u.values[i] *= ph;
        for (auto& v : set.V)
            v.values[i] *= std::conj(ph);
    }
}

MeasuredRow project_and_measure(const WorkingSet& set)
{
    const Grid1D& g = set.phi.grid;
    const int n = g.n_points;
    const CVector& phi = set.phi.values;
    MeasuredRow row;
    for (std::size_t k = 0; k < set.U.size(); ++k) {
        const CVector& U = set.U[k].values;
        const CVector& V = set.V[k].values;
        complex cu = 0.0, cv = 0.0;
        for (int i = 0; i < n; ++i) {
            cu += std::conj(phi[i]) * U[i];
            cv += phi[i] * V[i];
        }
        cu *= g.dx;
        cv *= g.dx;
        double uu = 0.0, vv = 0.0;
        for (int i = 0; i < n; ++i) {
            uu += std::norm(U[i] - phi[i] * cu);
            vv += std::norm(V[i] - std::conj(phi[i]) * cv);
        }
        uu *= g.dx;
        vv *= g.dx;
        row.vk.push_back(vv);
        row.norm_error = std::max(row.norm_error, std::abs(uu - vv - 1.0));
    }
    for (double v : row.vk)
        row.sum += v;
    return row;
}

DepletionSeries depletion_run(const ScaledParams& params, double center,
                              const DepletionOptions& options)
{
    params.validate();
    if (options.n_kicks < 0 || options.modes < 1)
        throw DomainError("depletion_run needs n_kicks >= 0 and at least one mode");
    const Grid1D grid = default_grid(center, options.n_points);
    const gpe::GroundState ground = gpe::ground_state(params, grid);
    const BdgModeSet modes = diagonalize_modes(build_L(ground, params), options.modes);

    ComplexField phi = gpe::displace(ground.field, center);
    BdgModeSet shifted = shift_modes(modes, center);
    if (options.global_phase != 0.0) {
        const complex ph = std::polar(1.0, options.global_phase);
        for (auto& z : phi.values)
            z *= ph;
        for (auto& m : shifted.modes) {
            for (auto& z : m.u.values)
                z *= ph;
            for (auto& z : m.v.values)
                z *= std::conj(ph);
        }
    }
    WorkingSet set = make_working_set(phi, shifted, params);
    const LockstepEvolver evolver(grid, params, options.substeps, options.xi);

    DepletionSeries out;
    out.mu = ground.mu;
    for (const auto& m : modes.modes)
        out.energies.push_back(m.energy);
    for (int k = 0; k < options.n_kicks; ++k) {
        out.kick.push_back(k);
        out.rows.push_back(project_and_measure(set));
        kick_uv(set);
        evolver.evolve(set, k * params.tau_h);
    }
    out.kick.push_back(options.n_kicks);
    out.rows.push_back(project_and_measure(set));
    return out;
}

} // namespace kgpe::bogoliubov
