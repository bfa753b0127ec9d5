#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "qnopt/quadratic.hpp"
#include "qnopt/registration.hpp"
#include "support/dense.hpp"

using namespace qnopt;
using testsupport::random_vector;

namespace {

// Central finite differences of the objective value, step 1e-6.
Vector fd_gradient(const Objective& obj, const Vector& x, double step = 1e-6) {
    Vector g(x.size());
    Vector xp = x, xm = x;
    Vector scratch(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + step;
        xm[i] = x[i] - step;
        const double fp = obj.eval(xp, scratch);
        const double fm = obj.eval(xm, scratch);
        g[i] = (fp - fm) / (2.0 * step);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

double gradient_rel_err(const Objective& obj, const Vector& x) {
    Vector g(x.size());
    obj.eval(x, g);
    Vector fd = fd_gradient(obj, x);
    return norm2(sub(fd, g)) / std::max(1e-30, norm2(g));
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("qnopt_test_") + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("quadratic family: decay endpoints and conditioning") {
    QuadraticProblem prob = build_quadratic(4, 1e-3, 14.0, 1);
    CHECK(prob.data_diag().front() == doctest::Approx(1.0));
    CHECK(prob.data_diag().back() == doctest::Approx(std::exp(-14.0)));
    CHECK(prob.data_diag().front() / prob.data_diag().back() ==
          doctest::Approx(std::exp(14.0)).epsilon(1e-12));

    // Same conditioning at any n.
    QuadraticProblem big = build_quadratic(256, 1e-3, 14.0, 1);
    CHECK(big.data_diag().front() / big.data_diag().back() ==
          doctest::Approx(std::exp(14.0)).epsilon(1e-12));

    CHECK_THROWS_AS(build_quadratic(3, 1e-3), std::invalid_argument);
}

TEST_CASE("quadratic eval: exact minimizer and dense-assembly oracle") {
    QuadraticProblem prob = build_quadratic(10, 0.05, 14.0, 3);
    Vector g(10);
    CHECK(prob.eval(prob.minimizer(), g) == 0.0);
    CHECK(norm2(g) == 0.0);

    // Assemble D + alpha R densely and compare value and gradient.
    testsupport::DenseMatrix m(10, 10);
    for (std::size_t i = 0; i < 10; ++i) {
        m(i, i) = prob.data_diag()[i] + 0.05 * 2.0;
        if (i > 0) m(i, i - 1) = -0.05;
        if (i + 1 < 10) m(i, i + 1) = -0.05;
    }
    std::mt19937_64 rng(4);
    for (int t = 0; t < 5; ++t) {
        Vector x = random_vector(rng, 10);
        Vector r = sub(x, prob.minimizer());
        Vector want_g = m.apply(r);
        const double want_v = 0.5 * dot(r, want_g);
        const double got_v = prob.eval(x, g);
        CHECK(got_v == doctest::Approx(want_v).epsilon(1e-12));
        CHECK(norm2(sub(g, want_g)) <= 1e-12 * norm2(want_g));
    }

    CHECK_THROWS_AS(prob.eval(Vector(4, 0.0), g), std::invalid_argument);
}

TEST_CASE("quadratic gradient passes central finite differences") {
    QuadraticProblem prob = build_quadratic(10, 1e-2, 14.0, 7);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 5; ++t) {
        Vector x = random_vector(rng, 10);
        CHECK(gradient_rel_err(prob, x) <= 1e-6);
    }
}

TEST_CASE("bilinear interpolation at pixel centers and on constants") {
    ImageBuffer img{4, 3, {0.0, 0.1, 0.2, 0.3,
                           0.4, 0.5, 0.6, 0.7,
                           0.8, 0.9, 1.0, 0.95}};
    // Interior pixel center (1,1) -> exact value, forward-difference partials.
    InterpSample s = interp_bilinear(img, 1.5, 1.5);
    CHECK(s.value == doctest::Approx(img.at(1, 1)));
    CHECK(s.dx == doctest::Approx(img.at(2, 1) - img.at(1, 1)));
    CHECK(s.dy == doctest::Approx(img.at(1, 2) - img.at(1, 1)));

    ImageBuffer flat{5, 5, std::vector<double>(25, 0.42)};
    for (double x : {-3.0, 0.1, 2.5, 7.9})
        for (double y : {-1.0, 0.6, 4.9, 11.0}) {
            InterpSample c = interp_bilinear(flat, x, y);
            CHECK(c.value == doctest::Approx(0.42));
            CHECK(c.dx == 0.0);
            CHECK(c.dy == 0.0);
        }

    // Outside the domain: clamped value, zero outward derivative.
    InterpSample edge = interp_bilinear(img, 100.0, 1.5);
    CHECK(edge.value == doctest::Approx(img.at(3, 1)));
    CHECK(edge.dx == 0.0);
}

TEST_CASE("bilinear partials match finite differences of the interpolant") {
    std::mt19937_64 rng(21);
    ImageBuffer img{8, 8, {}};
    img.intensities = random_vector(rng, 64, 0.0, 1.0);

    std::uniform_real_distribution<double> coord(1.0, 7.0);
    const double h = 1e-6;
    for (int t = 0; t < 50; ++t) {
        const double x = coord(rng), y = coord(rng);
        InterpSample s = interp_bilinear(img, x, y);
        const double fdx = (interp_bilinear(img, x + h, y).value -
                            interp_bilinear(img, x - h, y).value) / (2 * h);
        const double fdy = (interp_bilinear(img, x, y + h).value -
                            interp_bilinear(img, x, y - h).value) / (2 * h);
        CHECK(s.dx == doctest::Approx(fdx).epsilon(1e-5).scale(1.0));
        CHECK(s.dy == doctest::Approx(fdy).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("disc pair construction") {
    auto [ref, tpl] = make_disc_pair(32, 9, 9, 0, 0);
    CHECK(ref.intensities == tpl.intensities);
    for (double v : ref.intensities) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    auto [ref2, tpl2] = make_disc_pair(32, 9, 9, 3, 2);
    RegistrationProblem prob(ref2, tpl2, 1e-2);
    Vector u0(prob.dim(), 0.0);
    CHECK(prob.ssd(u0) > 0.0);

    CHECK_THROWS_AS(make_disc_pair(16, 9, 9, 0, 0), std::invalid_argument);
}

TEST_CASE("registration objective: perfect alignment and identity map") {
    auto [ref, tpl] = make_disc_pair(16, 5, 5, 0, 0);
    RegistrationProblem aligned(ref, tpl, 1e-2);
    Vector u0(aligned.dim(), 0.0);
    Vector g(aligned.dim());
    CHECK(aligned.eval(u0, g) == doctest::Approx(0.0));
    CHECK(norm_inf(g) <= 1e-14);

    // u = 0: the regularizer contributes nothing, J = SSD.
    auto [ref2, tpl2] = make_disc_pair(16, 5, 4, 2, 1);
    RegistrationProblem prob(ref2, tpl2, 1e-2);
    Vector u(prob.dim(), 0.0);
    double direct = 0.0;
    for (std::size_t i = 0; i < ref2.intensities.size(); ++i) {
        const double r = tpl2.intensities[i] - ref2.intensities[i];
        direct += r * r;
    }
    CHECK(prob.eval(u, g) == doctest::Approx(0.5 * direct).epsilon(1e-12));
    CHECK(prob.ssd(u) == doctest::Approx(0.5 * direct).epsilon(1e-12));

    CHECK_THROWS_AS(prob.eval(Vector(3, 0.0), g), std::invalid_argument);
}

TEST_CASE("registration gradient passes central finite differences") {
    auto [ref, tpl] = make_disc_pair(16, 5, 4, 2, 1);
    for (RegularizerKind kind : {RegularizerKind::curvature, RegularizerKind::elastic}) {
        RegistrationProblem prob(ref, tpl, 1e-2, kind);
        std::mt19937_64 rng(33);
        for (int t = 0; t < 5; ++t) {
            Vector u = random_vector(rng, prob.dim(), -0.4, 0.4);
            CHECK(gradient_rel_err(prob, u) <= 1e-5);
        }
    }
}

TEST_CASE("laplacian annihilates constants away from the boundary") {
    GridSpec g{{8, 8}, {1.0, 1.0}};
    LaplacianOperator lap(g);
    Vector ones(64, 1.0);
    Vector r = lap.apply(ones);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x) {
            const bool boundary = x == 0 || x == 7 || y == 0 || y == 7;
            if (boundary)
                CHECK(r[y * 8 + x] != 0.0);
            else
                CHECK(r[y * 8 + x] == 0.0);
        }
}

TEST_CASE("pgm loading: ascii, binary, 16-bit, and failure modes") {
    const std::string p2 = "P2\n# a comment\n2 2\n255\n0 255\n255 0\n";
    std::string p2_path = write_temp("a.pgm", p2);
    ImageBuffer a = load_pgm(p2_path);
    CHECK(a.width == 2);
    CHECK(a.height == 2);
    CHECK(a.intensities == std::vector<double>{0, 1, 1, 0});

    const std::string p5 = std::string("P5\n2 2\n255\n") +
                           std::string("\x00\xff\xff\x00", 4);
    std::string p5_path = write_temp("b.pgm", p5);
    ImageBuffer b = load_pgm(p5_path);
    CHECK(b.intensities == a.intensities);

    // 16-bit big-endian samples.
    const std::string p5_16 = std::string("P5\n2 1\n65535\n") +
                              std::string("\xff\xff\x00\x00", 4);
    std::string p16_path = write_temp("c.pgm", p5_16);
    ImageBuffer c = load_pgm(p16_path);
    CHECK(c.intensities == std::vector<double>{1, 0});

    std::string trunc_path = write_temp("d.pgm", "P5\n2 2\n255\n\x01\x02");
    CHECK_THROWS_WITH_AS(load_pgm(trunc_path),
                         doctest::Contains("expected 4 bytes, got 2"), std::runtime_error);

    std::string trunc2_path = write_temp("e.pgm", "P2\n2 2\n255\n7 9");
    CHECK_THROWS_WITH_AS(load_pgm(trunc2_path),
                         doctest::Contains("expected 4 values, got 2"), std::runtime_error);

    std::string bad_path = write_temp("f.pgm", "P7\n2 2\n255\n");
    CHECK_THROWS_AS(load_pgm(bad_path), std::runtime_error);
    CHECK_THROWS_AS(load_pgm("does_not_exist.pgm"), std::runtime_error);

    std::string deep_path = write_temp("g.pgm", "P2\n1 1\n70000\n7\n");
    CHECK_THROWS_WITH_AS(load_pgm(deep_path), doctest::Contains("maxval"), std::runtime_error);

    for (const auto& p :
         {p2_path, p5_path, p16_path, trunc_path, trunc2_path, bad_path, deep_path})
        std::remove(p.c_str());
}
