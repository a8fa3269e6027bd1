#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "subdiff/errors.hpp"
#include "subdiff/forward_solver.hpp"
#include "subdiff/special_functions.hpp"

using namespace subdiff;

namespace {

constexpr double kPi = std::numbers::pi;

ForwardProblem problem(const SpectralCoeffs& phi, const SpectralCoeffs& f, TimeProfile g, double rho,
                       double horizon = 1.0) {
    ForwardProblem p;
    p.domain = phi.domain();
    p.rho = rho;
    p.phi = phi;
    p.f = f;
    p.g = std::move(g);
    p.horizon = horizon;
    return p;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_CASE("homogeneous examples") {
    const auto line = BoxDomain::interval(kPi);
    const auto v1 = SpectralCoeffs::unit(line, 16, ModeIndex::of(1));
    for (double t : {0.0, 0.3, 1.0}) {
        const auto c = homogeneous_coeffs(v1, 1.0, t);
        CHECK(c[0] == doctest::Approx(std::exp(-t)).epsilon(1e-15));
    }
    const auto c = homogeneous_coeffs(v1, 0.5, 1.0);
    CHECK(c[0] == doctest::Approx(0.42758357615580700441).epsilon(1e-14));

    SpectralCoeffs phi(line, 16);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::sin(1.0 + static_cast<double>(i));
    const auto at0 = solve_homogeneous(phi, 0.4, 0.0, {63, 1});
    CHECK(max_abs_diff(at0, synthesize(phi, {63, 1})) <= 1e-14);
}

TEST_CASE("inhomogeneous examples") {
    const auto line = BoxDomain::interval(kPi);
    const auto one = TimeProfile::constant(1.0);
    const auto v1 = SpectralCoeffs::unit(line, 8, ModeIndex::of(1));
    const auto w = inhomogeneous_coeffs(v1, one, 0.6, 0.7);
    const double tr = std::pow(0.7, 0.6);
    CHECK(w[0] == doctest::Approx(tr * ml(MLParams{0.6, 1.6}, -tr)).epsilon(1e-14));
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] == 0.0);

    const auto v2 = SpectralCoeffs::unit(line, 8, ModeIndex::of(2));
    const auto heat = inhomogeneous_coeffs(v2, one, 1.0, 1.0);
    CHECK(heat[1] == doctest::Approx(0.25 * (1 - std::exp(-4.0))).epsilon(1e-15));

    const auto zero = solve_inhomogeneous(SpectralCoeffs::zeros(line, 8), one, 0.5, 1.0, {31, 1});
    for (double v : zero.values) CHECK(v == 0.0);
    const auto at0 = inhomogeneous_coeffs(v1, one, 0.5, 0.0);
    CHECK(at0[0] == 0.0);
}

TEST_CASE("stationary mode") {
    const auto line = BoxDomain::interval(kPi);
    const auto v1 = SpectralCoeffs::unit(line, 16, ModeIndex::of(1));
    for (double rho : {0.5, 1.0}) {
        const ForwardSolution u(problem(v1, v1, TimeProfile::constant(1.0), rho));
        for (double t : {0.0, 0.1, 0.5, 1.0}) CHECK(u.coefficients(t)[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("initial and boundary conditions") {
    const auto square = BoxDomain::rectangle(kPi, 2.0);
    SpectralCoeffs phi(square, 8), f(square, 8);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        phi[i] = 1.0 / (1.0 + static_cast<double>(i));
        f[i] = std::cos(static_cast<double>(i));
    }
    const ForwardSolution u(problem(phi, f, TimeProfile::polynomial({1.0, -1.0}), 0.7, 2.0));
    CHECK(max_abs_diff(u.at(0.0, {31, 31}), synthesize(phi, {31, 31})) <= 1e-8);
    // Boundary nodes are not stored; every eigenfunction vanishes there exactly.
    const double edge[] = {0.0, 1.3};
    for (const auto& m : phi.modes()) CHECK(eigenfunction_at(square, m, edge) == 0.0);
    CHECK(u.tail_indicator() > 0.0);
    CHECK(u.tail_indicator() == doctest::Approx((std::abs(phi[63]) + std::abs(f[63])) / phi.eigenvalues()[63]));
}

TEST_CASE("rho = 1 reproduces the heat solution") {
    const auto line = BoxDomain::interval(kPi);
    SpectralCoeffs phi(line, 64);
    for (int k = 1; k <= 64; ++k) phi[k - 1] = 1.0 / k;
    const ForwardSolution u(problem(phi, SpectralCoeffs::zeros(line, 64), TimeProfile::constant(1.0), 1.0));
    for (double t : {0.1, 0.5, 1.0}) {
        const auto c = u.coefficients(t);
        for (int k = 1; k <= 64; ++k) CHECK(std::abs(c[k - 1] - std::exp(-double(k) * k * t) / k) <= 1e-10);
    }
}

TEST_CASE("modes decouple") {
    const auto line = BoxDomain::interval(kPi);
    const auto v5 = SpectralCoeffs::unit(line, 16, ModeIndex::of(5));
    const ForwardSolution u(problem(v5, v5, TimeProfile::polynomial({0.5, 2.0}), 0.3));
    const auto c = u.coefficients(0.8);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (i != 4) CHECK(c[i] == 0.0);
    CHECK(c[4] != 0.0);
}

TEST_CASE("trajectory agrees with pointwise evaluation") {
    const auto line = BoxDomain::interval(kPi);
    SpectralCoeffs phi(line, 8), f(line, 8);
    phi[0] = 1.0;
    f[2] = -0.5;
    const auto s = TimeProfile::sampled({0.0, 0.5, 1.0}, {1.0, -1.0, 0.5});
    const ForwardSolution u(problem(phi, f, s, 0.5));
    const auto traj = u.trajectory(1.0 / 32, 32);
    for (int m : {0, 16, 32}) {
        const auto c = u.coefficients(m / 32.0);
        CHECK(traj[m][0] == doctest::Approx(c[0]).epsilon(1e-14));
        // Different meshes (32 vs 1024 cells); agreement to discretisation level.
        CHECK(std::abs(traj[m][2] - c[2]) < 1e-3);
    }
}

TEST_CASE("solution errors and cache") {
    const auto line = BoxDomain::interval(kPi);
    const auto v1 = SpectralCoeffs::unit(line, 8, ModeIndex::of(1));
    auto p = problem(v1, v1, TimeProfile::constant(1.0), 0.5);
    p.horizon = 0.0;
    CHECK_THROWS_AS(ForwardSolution{p}, PreconditionError);
    p.horizon = 1.0;
    p.rho = 1.5;
    CHECK_THROWS_AS(ForwardSolution{p}, DomainError);
    p.rho = 0.5;
    p.f = SpectralCoeffs::unit(line, 4, ModeIndex::of(1));
    CHECK_THROWS_AS(ForwardSolution{p}, PreconditionError);
    p.f = v1;
    p.g = TimeProfile::sampled({0.0, 0.5}, {1.0, 1.0});
    CHECK_THROWS_AS(ForwardSolution{p}, CoverageError);
    p.g = TimeProfile::constant(1.0);

    const ForwardSolution u(p);
    CHECK_THROWS_AS(u.coefficients(1.5), DomainError);
    CHECK_THROWS_AS(u.coefficients(-0.1), DomainError);

    // Concurrent snapshots through shared copies.
    const ForwardSolution copy = u;
    std::vector<double> out(8);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&, i] { out[i] = (i % 2 ? u : copy).coefficients(0.125 * (i % 4 + 1))[0]; });
    for (auto& th : threads) th.join();
    for (int i = 0; i < 8; ++i) CHECK(out[i] == u.coefficients(0.125 * (i % 4 + 1))[0]);
}
