#include "kgpe/bogoliubov.hpp"
#include "kgpe/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace kgpe;
using namespace kgpe::bogoliubov;

namespace {

ScaledParams params(double eta, double upsilon, double kappa = 1.0)
{
    ScaledParams p;
    p.eta = eta;
    p.upsilon = upsilon;
    p.kappa = kappa;
    return p;
}

struct Fixture {
    ScaledParams p;
    Grid1D g;
    gpe::GroundState gs;
    BdgOperator L;

    Fixture(double upsilon, int n = 128, double hw = 8.0)
        : p(params(1, upsilon)), g(make_grid(n, hw)), gs(gpe::ground_state(p, g)),
          L(build_L(gs, p))
    {
    }
};

} // namespace

TEST_CASE("operator structure")
{
    const Fixture none(0.0);
    CHECK(none.L.B.cwiseAbs().maxCoeff() == 0.0);
    const Fixture f(1.0);
    CHECK((f.L.A - f.L.A.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.L.B - f.L.B.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // (phi, 0) and (0, phi*) are exact zero modes.
    Eigen::VectorXd phi(f.g.n_points);
    for (int i = 0; i < f.g.n_points; ++i)
        phi(i) = f.gs.field.values[i].real();
    const Eigen::MatrixXd M = f.L.matrix();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(2 * f.g.n_points), b = a;
    a.head(f.g.n_points) = phi;
    b.tail(f.g.n_points) = phi;
    CHECK((M * a).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((M * b).cwiseAbs().maxCoeff() < 1e-6);

    gpe::GroundState big = f.gs;
    big.field = ComplexField(make_grid(4096, 8.0));
    CHECK_THROWS_AS(build_L(big, f.p), ResourceError);
}

TEST_CASE("full spectrum is +-E paired with two zero modes")
{
    const Fixture f(1.0);
    const auto ev = full_spectrum(f.L);
    const SpectrumCheck c = check_spectrum(ev);
    CHECK(c.pairing_error < 1e-8);
    CHECK(c.zero_modes == 2);
    double max_imag = 0;
    for (auto e : ev)
        max_imag = std::max(max_imag, std::abs(e.imag()));
    CHECK(max_imag < 1e-6);
}

TEST_CASE("ideal gas: oscillator eigenstates with E_k = k")
{
    const Fixture f(0.0);
    const BdgModeSet set = diagonalize_modes(f.L, 6);
    for (int k = 0; k < 6; ++k) {
        const Mode& m = set.modes[k];
        CHECK(std::abs(m.energy - (k + 1)) < 1e-6);
        CHECK(m.v.norm() == 0.0);
        CHECK(oracle::fidelity(m.u, oracle::hermite(f.g, k + 1)) > 1 - 1e-10);
    }
}

TEST_CASE("interacting modes: normalization, orthogonality, dipole energy")
{
    const Fixture f(1.0, 256, 10.0);
    const BdgModeSet set = diagonalize_modes(f.L, 10);
    CHECK(std::abs(set.modes[0].energy - 1) < 0.02);
    for (std::size_t k = 1; k < set.modes.size(); ++k)
        CHECK(set.modes[k].energy > set.modes[k - 1].energy);
    for (std::size_t j = 0; j < set.modes.size(); ++j) {
        const Mode& mj = set.modes[j];
        CHECK(std::abs(mj.u.norm() - mj.v.norm() - 1) < 1e-8);
        CHECK(std::abs(inner(f.gs.field, mj.u)) < 1e-8);
        CHECK(std::abs(inner(f.gs.field, mj.v)) < 1e-8);
        for (std::size_t k = 0; k < set.modes.size(); ++k)
            CHECK(std::abs(symplectic_product(mj, set.modes[k]) - (j == k ? 1.0 : 0.0)) < 1e-6);
        // Deterministic phase: the largest |u| sample is real and positive.
        std::size_t imax = 0;
        for (std::size_t i = 0; i < mj.u.values.size(); ++i)
            if (std::abs(mj.u.values[i]) > std::abs(mj.u.values[imax]))
                imax = i;
        CHECK(mj.u.values[imax].real() > 0);
        CHECK(mj.u.values[imax].imag() == 0.0);
    }

    // The diagonalization agrees with the general eigensolver's positive branch.
    const auto ev = full_spectrum(f.L);
    std::vector<double> positive;
    for (auto e : ev)
        if (e.real() > 1e-6)
            positive.push_back(e.real());
    std::sort(positive.begin(), positive.end());
    for (std::size_t k = 0; k < set.modes.size(); ++k)
        CHECK(std::abs(positive[k] - set.modes[k].energy) < 1e-8);

    CHECK_THROWS_AS(diagonalize_modes(f.L, 0), DomainError);
    CHECK_THROWS_AS(diagonalize_modes(f.L, 256), DomainError);
}

TEST_CASE("dipole mode for several couplings")
{
    for (double u : {0.1, 10.0}) {
        const Fixture f(u, 256, 10.0);
        CHECK(std::abs(diagonalize_modes(f.L, 1).modes[0].energy - 1) < 0.02);
    }
}

TEST_CASE("mode shifts")
{
    const Fixture f(1.0, 256, 12.0);
    const BdgModeSet set = diagonalize_modes(f.L, 4);
    const BdgModeSet same = shift_modes(set, 0.0);
    for (std::size_t k = 0; k < set.modes.size(); ++k)
        CHECK(same.modes[k].u.values == set.modes[k].u.values);
    const BdgModeSet moved = shift_modes(set, 3.0);
    for (std::size_t k = 0; k < set.modes.size(); ++k) {
        CHECK(std::abs(moved.modes[k].u.norm() - set.modes[k].u.norm()) < 1e-12);
        CHECK(std::abs(moved.modes[k].v.norm() - set.modes[k].v.norm()) < 1e-12);
    }
    CHECK_THROWS_AS(shift_modes(set, 10.0), DomainError);
}

TEST_CASE("lockstep evolution")
{
    // Ideal gas: U is a Schroedinger wavefunction and V stays zero.
    {
        const Fixture f(0.0, 256, 10.0);
        const BdgModeSet set = diagonalize_modes(f.L, 3);
        ScaledParams p = f.p;
        p.tau_h = 2 * M_PI;
        p.kappa = 0;
        WorkingSet w = make_working_set(f.gs.field, set, p);
        LockstepEvolver(f.g, p, 2048).evolve(w, 0.0);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(w.V[k].norm() == 0.0);
            CHECK(oracle::fidelity(w.U[k], set.modes[k].u) > 1 - 1e-6);
        }
        CHECK_THROWS_AS(LockstepEvolver(f.g, p, 64).evolve(w, 1.0), DomainError);
    }
    // Stationary condensate: eigenmodes only rotate, <v|v> stays put for ten periods.
    {
        const Fixture f(1.0, 256, 10.0);
        const BdgModeSet set = diagonalize_modes(f.L, 4);
        ScaledParams p = f.p;
        p.tau_h = 2 * M_PI;
        p.kappa = 0;
        WorkingSet w = make_working_set(f.gs.field, set, p);
        const MeasuredRow r0 = project_and_measure(w);
        const LockstepEvolver ev(f.g, p, 1024);
        for (int period = 0; period < 10; ++period)
            ev.evolve(w, period * p.tau_h);
        const MeasuredRow r1 = project_and_measure(w);
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(std::abs(r1.vk[k] - r0.vk[k]) < 1e-6);
        CHECK(r1.norm_error < 1e-6);
    }
}

TEST_CASE("kicks act as opposite phases on u and v")
{
    const Fixture f(1.0, 256, 10.0);
    const BdgModeSet set = diagonalize_modes(f.L, 3);
    WorkingSet w = make_working_set(f.gs.field, set, f.p);
    const MeasuredRow before = project_and_measure(w);
    const WorkingSet w0 = w;
    kick_uv(w);
    for (std::size_t k = 0; k < 3; ++k)
        for (int i = 0; i < f.g.n_points; ++i) {
            CHECK(std::abs(w.U[k].values[i]) == doctest::Approx(std::abs(w0.U[k].values[i])).epsilon(1e-14));
            CHECK(std::abs(w.V[k].values[i]) == doctest::Approx(std::abs(w0.V[k].values[i])).epsilon(1e-14));
        }
    const MeasuredRow after = project_and_measure(w);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(after.vk[k] - before.vk[k]) < 1e-14);
    CHECK(after.norm_error < 1e-12);

    WorkingSet z = w0;
    z.params.kappa = 0;
    kick_uv(z);
    CHECK(z.U[0].values == w0.U[0].values);

    WorkingSet empty = w0;
    for (auto& v : empty.V)
        std::fill(v.values.begin(), v.values.end(), 0.0);
    for (double v : project_and_measure(empty).vk)
        CHECK(v == 0.0);
}

TEST_CASE("depletion runs")
{
    DepletionOptions opt;
    opt.modes = 4;
    opt.n_points = 256;
    opt.substeps = 512;

    opt.n_kicks = 0;
    const DepletionSeries zero = depletion_run(params(1, 1), 2.0, opt);
    REQUIRE(zero.rows.size() == 1);
    CHECK(zero.rows[0].sum == doctest::Approx(zero.rows[0].vk[0] + zero.rows[0].vk[1] +
                                              zero.rows[0].vk[2] + zero.rows[0].vk[3]));

    // Without interaction nothing ever sources v.
    opt.n_kicks = 5;
    const DepletionSeries ideal = depletion_run(params(1, 0), 2.0, opt);
    for (const auto& r : ideal.rows)
        CHECK(r.sum == 0.0);

    const DepletionSeries base = depletion_run(params(1, 1), 2.0, opt);
    REQUIRE(base.rows.size() == 6);
    for (const auto& r : base.rows) {
        CHECK(r.norm_error < 1e-6);
        for (double v : r.vk)
            CHECK(v >= 0.0);
    }

    // Gauge checks: a global condensate phase or a xi shift leaves every row unchanged.
    DepletionOptions rotated = opt;
    rotated.global_phase = 0.83;
    DepletionOptions shifted = opt;
    shifted.xi = base.mu;
    const DepletionSeries a = depletion_run(params(1, 1), 2.0, rotated);
    const DepletionSeries b = depletion_run(params(1, 1), 2.0, shifted);
    for (std::size_t r = 0; r < base.rows.size(); ++r)
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(a.rows[r].vk[k] - base.rows[r].vk[k]) < 1e-10);
            CHECK(std::abs(b.rows[r].vk[k] - base.rows[r].vk[k]) < 1e-10);
        }
}
