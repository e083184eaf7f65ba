#include "kgpe/classical.hpp"
#include "kgpe/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kgpe::classical;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double sqrt2 = std::numbers::sqrt2;
} // namespace

TEST_CASE("harmonic rotation")
{
    const PhasePoint a = harmonic_rotate({0.3, -1.7}, 2 * pi);
    CHECK(a.x == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(a.p == doctest::Approx(-1.7).epsilon(1e-14));
    const PhasePoint b = harmonic_rotate({1, 0}, pi / 2);
    CHECK(std::abs(b.x) < 1e-15);
    CHECK(b.p == doctest::Approx(-1.0));

    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 50; ++t) {
        const PhasePoint p0{u(gen), u(gen)};
        PhasePoint p = p0;
        for (int k = 0; k < 6; ++k) {
            p = harmonic_rotate(p, 2 * pi / 6);
            CHECK(p.x * p.x + p.p * p.p == doctest::Approx(p0.x * p0.x + p0.p * p0.p).epsilon(1e-14));
        }
        CHECK(std::abs(p.x - p0.x) < 1e-14 * 10);
        CHECK(std::abs(p.p - p0.p) < 1e-14 * 10);
    }
}

TEST_CASE("kick impulse")
{
    CHECK(kick({0, 0.4}, 1.3).p == 0.4);
    CHECK(std::abs(kick({pi / sqrt2, 0.0}, 1.0).p) < 1e-15);
    const double kappa = 0.8, h = 1e-5;
    for (double x : {-2.1, -0.3, 0.77, 3.9}) {
        auto potential = [&](double y) { return kappa / sqrt2 * std::cos(sqrt2 * y); };
        const double force = -(potential(x + h) - potential(x - h)) / (2 * h);
        CHECK(std::abs(kick({x, 0}, kappa).p - force) < 1e-10);
        CHECK(kick({x, 0}, kappa).x == x);
    }
}

TEST_CASE("Poincare sections")
{
    const ResonanceSpec spec{1, 6};
    const PhasePoint origin{0, 0};
    for (const auto& pt : poincare_section(std::span(&origin, 1), 50, spec, 1.0)) {
        CHECK(pt.x == 0.0);
        CHECK(pt.p == 0.0);
    }

    const std::vector<PhasePoint> seeds{{1.0, 0.5}, {3.0, -2.0}};
    const auto free = poincare_section(seeds, 40, spec, 0.0);
    REQUIRE(free.size() == 80);
    CHECK(free[0].x == 1.0);
    CHECK(free[40].x == 3.0);
    for (std::size_t i = 0; i < free.size(); ++i) {
        const auto& s = seeds[i / 40];
        CHECK(std::abs(free[i].x * free[i].x + free[i].p * free[i].p - s.x * s.x - s.p * s.p) < 1e-12);
    }

    // A seed on the web wanders far out along its channels.
    const PhasePoint web{1.4, 2.2};
    const double r0 = std::hypot(web.x, web.p);
    double rmax = 0;
    for (const auto& pt : poincare_section(std::span(&web, 1), 10000, spec, 1.0))
        rmax = std::max(rmax, std::hypot(pt.x, pt.p));
    CHECK(rmax > 2 * r0);
}

TEST_CASE("resonance spec")
{
    CHECK(ResonanceSpec{1, 6}.tau_h() == doctest::Approx(pi / 3));
    CHECK_THROWS_AS((ResonanceSpec{2, 6}.validate()), kgpe::DomainError);
    CHECK_THROWS_AS((ResonanceSpec{0, 6}.validate()), kgpe::DomainError);
    CHECK_NOTHROW((ResonanceSpec{1, 5}.validate()));
}

TEST_CASE("web symmetry score")
{
    std::vector<PhasePoint> ring;
    for (int k = 0; k < 100000; ++k) {
        const double t = 2 * pi * (k + 0.5) / 100000;
        ring.push_back({5 * std::cos(t), 5 * std::sin(t)});
    }
    for (int q : {3, 5, 6})
        CHECK(web_symmetry_score(ring, q) > 0.95);
    const std::vector<PhasePoint> lone{{2.0, 1.0}};
    CHECK(web_symmetry_score(lone, 6) < 0.5);
}

TEST_CASE("crystal symmetry admissibility")
{
    for (int q : {1, 2, 3, 4, 6})
        CHECK(crystal_symmetry_admissible(q));
    for (int q : {5, 7, 8, 12})
        CHECK_FALSE(crystal_symmetry_admissible(q));
}
