#include "kgpe/gpe.hpp"

#include "kgpe/classical.hpp"
#include "kgpe/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kgpe::gpe {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;
constexpr double pi = std::numbers::pi;

void normalize(CVector& psi, double dx)
{
    double sum = 0.0;
    for (const auto& z : psi)
        sum += std::norm(z);
    const double scale = 1.0 / std::sqrt(sum * dx);
    for (auto& z : psi)
        z *= scale;
}

} // namespace

double kick_phase(double x, const ScaledParams& params)
{
    const double eta = params.eta;
    return params.kappa * std::cos(sqrt2 * eta * x) / (sqrt2 * eta * eta);
}

double center_position(Center c, double eta)
{
    if (!(eta > 0.0))
        throw DomainError("eta must be positive");
    return (c == Center::unstable ? 1.0 : 2.0) * sqrt2 * pi / eta;
}

SplitStepper::SplitStepper(const Grid1D& grid, const ScaledParams& params, double dt)
    : grid_(grid), coupling_(params.coupling()), dt_(dt)
{
    const int n = grid.n_points;
    trap_.resize(n);
    kinetic_.resize(n);
    half_trap_.resize(n);
    full_trap_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.position(i);
        trap_[i] = 0.5 * x * x;
        half_trap_[i] = std::polar(1.0, -trap_[i] * dt / 2.0);
        full_trap_[i] = std::polar(1.0, -trap_[i] * dt);
        const double p = grid.momentum(i);
        kinetic_[i] = std::polar(1.0 / n, -0.5 * p * p * dt);
    }
}

void SplitStepper::position_phase(CVector& psi, double h) const
{
    const int n = grid_.n_points;
    if (coupling_ == 0.0) {
        const CVector& table = (h == dt_) ? full_trap_ : half_trap_;
        for (int i = 0; i < n; ++i)
            psi[i] *= table[i];
        return;
    }
    for (int i = 0; i < n; ++i)
        psi[i] *= std::polar(1.0, -(trap_[i] + coupling_ * std::norm(psi[i])) * h);
}

void SplitStepper::advance(CVector& psi, int n_steps) const
{
    if (n_steps <= 0)
        return;
    const int n = grid_.n_points;
    position_phase(psi, dt_ / 2.0);
    for (int s = 0; s < n_steps; ++s) {
        fft_forward(psi);
        for (int j = 0; j < n; ++j)
            psi[j] *= kinetic_[j];
        fft_backward(psi);
        position_phase(psi, s == n_steps - 1 ? dt_ / 2.0 : dt_);
    }
}

GpeState evolve_between_kicks(const GpeState& state, double tau_h, int n_substeps, bool monitor)
{
    if (n_substeps < 1)
        throw DomainError("n_substeps must be >= 1");
    GpeState out = state;
    SplitStepper stepper(state.field.grid, state.params, tau_h / n_substeps);
    stepper.advance(out.field.values, n_substeps);
    out.t_h += tau_h;
    if (monitor) {
        const double edge_x = boundary_mass(out.field);
        const double edge_p = boundary_mass(to_momentum(out.field));
        const double edge = std::max(edge_x, edge_p);
        if (edge > boundary_tolerance) {
            std::ostringstream msg;
            msg << "boundary monitor: " << (edge_x >= edge_p ? "position" : "momentum")
                << " edge mass " << edge << " at t_h = " << out.t_h
                << " exceeds " << boundary_tolerance << "; widen or refine the grid";
            throw NumericalError(msg.str(), edge);
        }
    }
    return out;
}

void apply_kick_in_place(ComplexField& field, const ScaledParams& params, double sign)
{
    if (params.kappa == 0.0)
        return;
    for (int i = 0; i < field.grid.n_points; ++i)
        field.values[i] *= std::polar(1.0, -sign * kick_phase(field.grid.position(i), params));
}

GpeState apply_kick(const GpeState& state)
{
    GpeState out = state;
    apply_kick_in_place(out.field, out.params);
    return out;
}

double energy(const ComplexField& field, const ScaledParams& params)
{
    const Grid1D& g = field.grid;
    const ComplexField mom = to_momentum(field);
    double kinetic = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        const double p = g.momentum(j);
        kinetic += 0.5 * p * p * std::norm(mom.values[j]);
    }
    kinetic *= g.dp();
    double potential = 0.0, interaction = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.position(i);
        const double rho = std::norm(field.values[i]);
        potential += 0.5 * x * x * rho;
        interaction += rho * rho;
    }
    return kinetic + (potential + 0.5 * params.coupling() * interaction) * g.dx;
}

double chemical_potential(const ComplexField& field, const ScaledParams& params)
{
    // The interaction enters mu with weight 1, not 1/2.
    const Grid1D& g = field.grid;
    double interaction = 0.0;
    for (const auto& z : field.values)
        interaction += std::norm(z) * std::norm(z);
    return (energy(field, params) + 0.5 * params.coupling() * interaction * g.dx) / field.norm();
}

double stationarity_residual(const ComplexField& field, const ScaledParams& params, double mu)
{
    const Grid1D& g = field.grid;
    const CVector t = apply_kinetic(field.values, g);
    const double coupling = params.coupling();
    double sum = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.position(i);
        const complex psi = field.values[i];
        const complex r = t[i] + (0.5 * x * x + coupling * std::norm(psi) - mu) * psi;
        sum += std::norm(r);
    }
    return std::sqrt(sum * g.dx);
}

double mean_position(const ComplexField& field)
{
    double sum = 0.0;
    for (int i = 0; i < field.grid.n_points; ++i)
        sum += field.grid.position(i) * std::norm(field.values[i]);
    return sum * field.grid.dx / field.norm();
}

double mean_momentum(const ComplexField& field)
{
    const ComplexField mom = to_momentum(field);
    double sum = 0.0;
    for (int j = 0; j < field.grid.n_points; ++j)
        sum += field.grid.momentum(j) * std::norm(mom.values[j]);
    return sum * field.grid.dp() / mom.norm();
}

GroundState ground_state(const ScaledParams& params, const Grid1D& grid,
                         const GroundStateOptions& options)
{
    params.validate();
    if (options.dt_schedule.empty())
        throw DomainError("empty imaginary-time schedule");
    const int n = grid.n_points;
    const double g = params.coupling();

    // Gaussian guess, widened towards the Thomas-Fermi size for strong coupling.
    const double width = std::max(1.0, std::cbrt(g));
    CVector psi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = grid.position(i) / width;
        psi[i] = std::exp(-0.5 * x * x);
    }
    normalize(psi, grid.dx);

    std::vector<double> trap(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.position(i);
        trap[i] = 0.5 * x * x;
    }

    long steps = 0;
    double mu = 0.0, residual = 0.0;
    double mu_shift = chemical_potential(ComplexField(grid, psi), params);
    for (std::size_t stage = 0; stage < options.dt_schedule.size(); ++stage) {
        const double dt = options.dt_schedule[stage];
        const bool last = stage + 1 == options.dt_schedule.size();
        std::vector<double> kinetic(n);
        for (int j = 0; j < n; ++j) {
            const double p = grid.momentum(j);
            kinetic[j] = std::exp(-0.5 * p * p * dt) / n;
        }
        // Exact flow of d(rho)/dt = -2 (V - mu + g rho) rho over dt / 2. The shift by the
        // running mu keeps the norm near 1 inside a step, so the nonlinear term sees the
        // right density and the relaxed state is second order in dt.
        const double h = dt / 2.0;
        std::vector<double> decay(n), growth(n);
        auto tabulate = [&](double shift) {
            for (int i = 0; i < n; ++i) {
                const double v = trap[i] - shift;
                decay[i] = std::exp(-2.0 * v * h);
                growth[i] = v != 0.0 ? -std::expm1(-2.0 * v * h) / v : 2.0 * h;
            }
        };
        auto half_potential = [&] {
            for (int i = 0; i < n; ++i)
                psi[i] *= std::sqrt(decay[i] / (1.0 + g * std::norm(psi[i]) * growth[i]));
        };
        double mu_prev = std::numeric_limits<double>::infinity();
        for (;;) {
            tabulate(mu_shift);
            for (int s = 0; s < options.sweep_steps; ++s) {
                half_potential();
                fft_forward(psi);
                for (int j = 0; j < n; ++j)
                    psi[j] *= kinetic[j];
                fft_backward(psi);
                half_potential();
                normalize(psi, grid.dx);
            }
            steps += options.sweep_steps;
            ComplexField f(grid, psi);
            mu = chemical_potential(f, params);
            mu_shift = mu;
            const bool mu_settled = std::abs(mu - mu_prev) < options.mu_tolerance;
            mu_prev = mu;
            if (mu_settled) {
                if (!last)
                    break;
                residual = stationarity_residual(f, params, mu);
                if (residual < options.residual_tolerance)
                    break;
            }
            if (steps > options.max_steps) {
                residual = stationarity_residual(f, params, mu);
                throw NumericalError("imaginary-time relaxation did not converge; residual " +
                                         std::to_string(residual),
                                     residual);
            }
        }
    }

    // Fix the global phase: real and non-negative.
    complex largest = 0.0;
    for (const auto& z : psi)
        if (std::abs(z) > std::abs(largest))
            largest = z;
    const complex unit = std::abs(largest) > 0.0 ? std::conj(largest) / std::abs(largest) : 1.0;
    for (auto& z : psi)
        z = std::abs((z * unit).real());
    normalize(psi, grid.dx);

    GroundState out{ComplexField(grid, psi), 0.0, 0.0};
    out.mu = chemical_potential(out.field, params);
    out.residual = stationarity_residual(out.field, params, out.mu);
    return out;
}

ComplexField displace(const ComplexField& field, double a)
{
    if (std::abs(a) >= field.grid.half_width())
        throw DomainError("displacement exceeds the grid half width");
    ComplexField out = translate(field, a);
    const double edge = boundary_mass(out);
    if (edge > boundary_tolerance)
        throw DomainError("displaced state reaches the grid boundary (edge mass " +
                          std::to_string(edge) + "); use a wider grid");
    return out;
}

RunRecord run_kicked(const GpeState& state0, int n_kicks, int n_substeps,
                     const std::vector<Observer>& observers)
{
    if (n_kicks < 0)
        throw DomainError("n_kicks must be non-negative");
    auto row = [](int k, const GpeState& s) {
        return SeriesRow{k,
                         s.t_h,
                         s.field.norm(),
                         energy(s.field, s.params),
                         mean_position(s.field),
                         mean_momentum(s.field)};
    };
    RunRecord record{state0, {}};
    GpeState& state = record.final_state;
    for (int k = 0; k < n_kicks; ++k) {
        record.series.push_back(row(k, state));
        for (const auto& obs : observers)
            obs(k, state);
        apply_kick_in_place(state.field, state.params);
        state = evolve_between_kicks(state, state.params.tau_h, n_substeps);
    }
    record.series.push_back(row(n_kicks, state));
    return record;
}

FloquetCheck floquet_commutator_norm(const ScaledParams& params, int q, complex alpha)
{
    params.validate();
    if (q < 1)
        throw DomainError("q must be positive");
    const double turns = params.tau_h * q / (2.0 * pi);
    const int r = static_cast<int>(std::lround(turns));
    if (r < 1 || std::abs(turns - r) > 1e-9)
        throw DomainError("tau_h is not 2 pi r / q for this q");

    // alpha = (xi + i w) / sqrt2: translation by xi, boost by w.
    const double xi = sqrt2 * alpha.real();
    const double w = sqrt2 * alpha.imag();

    bool admissible = classical::crystal_symmetry_admissible(q);
    for (int k = 0; k < q && admissible; ++k) {
        const complex ak = alpha * std::polar(1.0, 2.0 * pi * k * r / q);
        const double phase = 2.0 * params.eta * ak.real() / (2.0 * pi);
        if (std::abs(phase - std::round(phase)) > 1e-9)
            admissible = false;
    }

    // Exact linear harmonic flow from the dense Fourier-grid eigenbasis.
    // Balanced extents: momentum reaches as far as position, n >= 2 half_width^2 / pi.
    const double reach = std::abs(xi) + std::abs(w);
    const double half_width = std::max(12.0, 2.0 * reach + 12.0);
    int n_points = 512;
    while (n_points < 2.0 * half_width * half_width / pi)
        n_points *= 2;
    const Grid1D grid = make_grid(n_points, half_width);
    const int n = grid.n_points;
    Eigen::MatrixXd h = kinetic_matrix(grid);
    for (int i = 0; i < n; ++i) {
        const double x = grid.position(i);
        h(i, i) += 0.5 * x * x;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::MatrixXd& basis = eig.eigenvectors();
    Eigen::VectorXcd rotation(n);
    for (int k = 0; k < n; ++k)
        rotation(k) = std::polar(1.0, -eig.eigenvalues()(k) * params.tau_h);
    Eigen::VectorXcd kick(n), boost(n);
    for (int i = 0; i < n; ++i) {
        kick(i) = std::polar(1.0, -kick_phase(grid.position(i), params));
        boost(i) = std::polar(1.0, w * grid.position(i));
    }

    auto floquet_q = [&](Eigen::VectorXcd v) {
        for (int k = 0; k < q; ++k) {
            v = v.cwiseProduct(kick);
            Eigen::VectorXcd c = basis.transpose() * v;
            v = basis * c.cwiseProduct(rotation);
        }
        return v;
    };
    auto displace_op = [&](const Eigen::VectorXcd& v) {
        ComplexField f(grid, CVector(v.data(), v.data() + n));
        f = translate(f, xi);
        Eigen::VectorXcd out = Eigen::Map<Eigen::VectorXcd>(f.values.data(), n);
        return Eigen::VectorXcd(out.cwiseProduct(boost));
    };

    // Test states: the lowest oscillator eigenstates and two coherent states.
    std::vector<Eigen::VectorXcd> tests;
    for (int k = 0; k < 6; ++k)
        tests.emplace_back(basis.col(k).cast<complex>());
    for (const auto& [x0, p0] : {std::pair{1.0, 0.0}, std::pair{-0.5, 1.5}}) {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) {
            const double x = grid.position(i) - x0;
            v(i) = std::exp(-0.5 * x * x) * std::polar(1.0, p0 * grid.position(i));
        }
        tests.push_back(v / v.norm());
    }

    double worst = 0.0;
    for (const auto& psi : tests) {
        const Eigen::VectorXcd lhs = displace_op(floquet_q(psi));
        const Eigen::VectorXcd rhs = floquet_q(displace_op(psi));
        worst = std::max(worst, (lhs - rhs).norm() / psi.norm());
    }
    return {worst, admissible};
}

} // namespace kgpe::gpe
