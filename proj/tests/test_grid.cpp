#include "kgpe/error.hpp"
#include "kgpe/grid.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <filesystem>
#include <fstream>

using namespace kgpe;

TEST_CASE("grid construction")
{
    const Grid1D a = make_grid(16, 8);
    CHECK(a.dx == 1.0);
    CHECK(a.dp() == doctest::Approx(2 * M_PI / 16).epsilon(1e-15));
    CHECK(a.position(0) == -8.0);
    CHECK(make_grid(1024, 25.6).dx == doctest::Approx(0.05).epsilon(1e-15));
    for (int n : {16, 64, 1024, 4096}) {
        const Grid1D g = make_grid(n, 3.7);
        CHECK(std::abs(g.dx * g.dp() * n - 2 * M_PI) < 1e-13);
        CHECK(g.momentum(n / 2) == doctest::Approx(-g.p_max()));
    }
    CHECK_THROWS_AS(make_grid(100, 8), DomainError);
    CHECK_THROWS_AS(make_grid(8, 8), DomainError);
    CHECK_THROWS_AS(make_grid(64, -1), DomainError);
    CHECK(default_grid(0.0, 16).half_width() == 8.0);
    CHECK(default_grid(-3.0, 64).half_width() == 20.0);
    CHECK(default_grid(0.0).half_width() == doctest::Approx(std::sqrt(512 * M_PI)));
    CHECK(default_grid(0.0).p_max() == doctest::Approx(default_grid(0.0).half_width()));
}

TEST_CASE("momentum transform matches the direct Fourier sum")
{
    const Grid1D g = make_grid(128, 9.0);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> d;
    ComplexField f(g);
    for (auto& z : f.values)
        z = {d(gen), d(gen)};
    const ComplexField m = to_momentum(f);
    CHECK(oracle::max_abs_diff(m.values, oracle::direct_dft(g, f.values)) < 1e-12);
    CHECK(std::abs(m.norm() / f.norm() - 1) < 1e-12);
    CHECK(oracle::max_abs_diff(from_momentum(m).values, f.values) < 1e-12);
}

TEST_CASE("Gaussian is self-conjugate and a spike has a flat spectrum")
{
    const Grid1D g = make_grid(256, 12.0);
    const ComplexField m = to_momentum(oracle::coherent(g, 0, 0));
    double err = 0;
    for (int j = 0; j < g.n_points; ++j) {
        const double p = g.momentum(j);
        err = std::max(err, std::abs(m.values[j] - std::pow(M_PI, -0.25) * std::exp(-0.5 * p * p)));
    }
    CHECK(err < 1e-12);

    ComplexField spike(g);
    spike.values[77] = 1.0;
    const ComplexField s = to_momentum(spike);
    for (const auto& z : s.values)
        CHECK(std::abs(z) == doctest::Approx(g.dx / std::sqrt(2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("spectral derivatives of a Gaussian")
{
    const Grid1D g = make_grid(256, 12.0);
    const ComplexField f = oracle::coherent(g, 0.3, 0);
    const CVector d1 = spectral_derivative(f.values, g, 1);
    const CVector d2 = spectral_derivative(f.values, g, 2);
    double e1 = 0, e2 = 0;
    for (int i = 0; i < g.n_points; ++i) {
        const double y = g.position(i) - 0.3;
        const double v = f.values[i].real();
        e1 = std::max(e1, std::abs(d1[i] - (-y * v)));
        e2 = std::max(e2, std::abs(d2[i] - (y * y - 1) * v));
    }
    CHECK(e1 < 1e-11);
    CHECK(e2 < 1e-10);

    std::vector<double> re(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
        re[i] = f.values[i].real();
    const auto rd = spectral_derivative(re, g, 1);
    for (int i = 0; i < g.n_points; ++i)
        CHECK(rd[i] == doctest::Approx(d1[i].real()).epsilon(1e-12));
}

TEST_CASE("kinetic matrix")
{
    const Grid1D g = make_grid(128, 10.0);
    const Eigen::MatrixXd T = kinetic_matrix(g);
    CHECK((T - T.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Plane wave commensurate with the grid.
    const int j = 9;
    Eigen::VectorXcd w(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
        w(i) = std::polar(1.0, g.momentum(j) * g.position(i));
    const double pj = g.momentum(j);
    CHECK(((T * w) - 0.5 * pj * pj * w).cwiseAbs().maxCoeff() < 1e-10);

    // Matches spectral application on a band-limited field.
    const ComplexField f = oracle::random_state(g, 11);
    const CVector spectral = apply_kinetic(f.values, g);
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(f.values.data(), g.n_points);
    const Eigen::VectorXcd dense = T * v;
    double err = 0;
    for (int i = 0; i < g.n_points; ++i)
        err = std::max(err, std::abs(dense(i) - spectral[i]));
    CHECK(err < 1e-10);

    Eigen::MatrixXd h = kinetic_matrix(make_grid(256, 10.0));
    const Grid1D hg = make_grid(256, 10.0);
    for (int i = 0; i < hg.n_points; ++i)
        h(i, i) += 0.5 * hg.position(i) * hg.position(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
    CHECK(std::abs(eig.eigenvalues()(0) - 0.5) < 1e-8);
    CHECK(std::abs(eig.eigenvalues()(1) - 1.5) < 1e-8);

    CHECK_THROWS_AS(kinetic_matrix(make_grid(8192, 10.0)), ResourceError);
}

TEST_CASE("translation is unitary and shifts profiles")
{
    const Grid1D g = make_grid(512, 16.0);
    const ComplexField f = oracle::coherent(g, 0, 0.7);
    const ComplexField t = translate(f, 2.5);
    CHECK(std::abs(t.norm() - f.norm()) < 1e-12);
    const ComplexField expect = oracle::coherent(g, 2.5, 0.7);
    // A shifted plane-wave factor carries the phase exp(-i p0 a).
    CHECK(oracle::max_abs_diff(t.values, expect.values) > 0.1);
    CHECK(oracle::fidelity(t, expect) > 1 - 1e-12);
    CHECK(oracle::max_abs_diff(translate(t, -2.5).values, f.values) < 1e-12);
    CHECK(oracle::max_abs_diff(translate(f, 0).values, f.values) < 1e-15);
}

TEST_CASE("boundary mass")
{
    const Grid1D g = make_grid(256, 10.0);
    CHECK(boundary_mass(oracle::coherent(g, 0, 0)) < 1e-30);
    CHECK(boundary_mass(oracle::coherent(g, 9.8, 0)) > 0.1);
    CHECK(boundary_mass(to_momentum(oracle::coherent(g, 0, 39.0))) > 1e-3);
}

TEST_CASE("field dump round trip")
{
    const Grid1D g = make_grid(64, 5.0);
    const ComplexField f = oracle::random_state(g, 5, 3);
    const auto path = std::filesystem::temp_directory_path() / "kgpe_test_field.fld";
    write_field(path, f);
    CHECK(std::filesystem::file_size(path) == 8 + 4 + 16 + 64 * 16);
    {
        std::ifstream in(path, std::ios::binary);
        char magic[8];
        in.read(magic, 8);
        CHECK(std::string(magic, 8) == "KGPEFLD1");
    }
    const ComplexField back = read_field(path);
    CHECK(back.grid == g);
    CHECK(back.values == f.values);
    {
        std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
        io.write("XXXX", 4);
    }
    CHECK_THROWS_AS(read_field(path), FormatError);
    std::filesystem::remove(path);
}
