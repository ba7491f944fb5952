#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pgnudge/norms.hpp"
#include "pgnudge/observe.hpp"
#include "pgnudge/random_fields.hpp"

using namespace pgnudge;

namespace {

DomainSpec grid(int nx, int ny, int nz) {
    DomainSpec d;
    d.nx = nx;
    d.ny = ny;
    d.nz = nz;
    return d;
}

PhysParams params(double k, double alpha) {
    PhysParams p;
    p.k_h = p.k_v = k;
    p.alpha = alpha;
    return p;
}

double inner(const Field3D& a, const Field3D& b) {
    const auto& d = a.domain();
    double acc = 0.0;
    for (int i = 0; i <= d.nx; ++i)
        for (int j = 0; j <= d.ny; ++j)
            for (int k = 0; k <= d.nz; ++k)
                acc += d.w3(i, j, k) * a.at(i, j, k) * b.at(i, j, k);
    return acc;
}

}  // namespace

TEST_CASE("retained modes are orthonormal") {
    DomainSpec d = grid(12, 12, 8);
    ModalBasis basis(d, params(0.1, 0.1), 0.25);
    REQUIRE(basis.retained_count() >= 3);
    for (int a = 0; a < basis.retained_count(); ++a) {
        Field3D fa = basis.eigenfunction(a);
        std::vector<double> c = basis.coefficients(fa);
        for (int b = 0; b < basis.retained_count(); ++b)
            CHECK(c[b] == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
    }
}

TEST_CASE("eigenvalues are sorted and bounded by the cutoff") {
    DomainSpec d = grid(16, 16, 8);
    double h = 0.25;
    ModalBasis basis(d, params(0.1, 0.1), h);
    double prev = 0.0;
    for (const ModalEntry& e : basis.retained()) {
        CHECK(e.lambda >= prev - 1e-14);
        CHECK(e.lambda <= 1.0 / (h * h) + 1e-12);
        CHECK(e.lambda == doctest::Approx(e.lambda_x + e.lambda_y + e.lambda_z));
        prev = e.lambda;
    }
    CHECK(basis.lambda1() == doctest::Approx(basis.vertical_eigenvalues()[0]));
    CHECK(basis.lambda1() > 0.0);
}

TEST_CASE("horizontal eigenvalues follow the discrete cosine formula") {
    DomainSpec d = grid(16, 12, 8);
    ModalBasis basis(d, params(0.1, 0.1), 0.2);
    for (const ModalEntry& e : basis.retained()) {
        double lx = (2.0 / (d.dx() * d.dx())) *
                    (1.0 - std::cos(std::numbers::pi * e.kx / d.nx));
        double ly = (2.0 / (d.dy() * d.dy())) *
                    (1.0 - std::cos(std::numbers::pi * e.ky / d.ny));
        CHECK(e.lambda_x == doctest::Approx(lx).epsilon(1e-12));
        CHECK(e.lambda_y == doctest::Approx(ly).epsilon(1e-12));
    }
}

TEST_CASE("strong surface exchange approaches the rigid-lid vertical mode") {
    // alpha/K_v -> infinity turns the top Robin condition into a Dirichlet one,
    // whose smallest eigenvalue is (pi/2H)^2
    DomainSpec d = grid(4, 4, 64);
    ModalBasis basis(d, params(1e-8, 1.0), 3.0);
    double exact = std::pow(std::numbers::pi / (2.0 * d.h_depth), 2);
    CHECK(basis.vertical_eigenvalues()[0] == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("modal projection is idempotent, non-expansive, and linear") {
    DomainSpec d = grid(14, 14, 8);
    PhysParams p = params(0.1, 0.1);
    ModalBasis basis(d, p, 0.3);
    InterpolantSpec spec{InterpolantKind::modal, 0.3, 1.0};
    SmoothFieldSampler s(d, 4);
    Field3D f = s.sample3d(), g = s.sample3d();

    Field3D pf = apply_interpolant(f, spec, &basis);
    Field3D ppf = apply_interpolant(pf, spec, &basis);
    double scale = l2_norm(f);
    for (std::size_t n = 0; n < f.data().size(); ++n)
        CHECK(std::abs(ppf.data()[n] - pf.data()[n]) < 1e-11 * scale);
    CHECK(l2_norm(pf) <= l2_norm(f) * (1.0 + 1e-12));

    Field3D combo(d);
    for (std::size_t n = 0; n < f.data().size(); ++n)
        combo.data()[n] = 1.5 * f.data()[n] - 2.0 * g.data()[n];
    Field3D pc = apply_interpolant(combo, spec, &basis);
    for (std::size_t n = 0; n < f.data().size(); ++n) {
        double expect = 1.5 * pf.data()[n] -
                        2.0 * apply_interpolant(g, spec, &basis).data()[n];
        CHECK(pc.data()[n] == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("projection error is orthogonal to the retained span") {
    DomainSpec d = grid(12, 12, 8);
    PhysParams p = params(0.1, 0.1);
    ModalBasis basis(d, p, 0.3);
    SmoothFieldSampler s(d, 13);
    Field3D f = s.sample3d();
    Field3D pf = basis.project(f);
    Field3D err(d);
    for (std::size_t n = 0; n < f.data().size(); ++n)
        err.data()[n] = f.data()[n] - pf.data()[n];
    for (int m = 0; m < basis.retained_count(); ++m)
        CHECK(std::abs(inner(err, basis.eigenfunction(m))) < 1e-11);
}

TEST_CASE("volume interpolant reproduces means and constants") {
    DomainSpec d = grid(16, 16, 8);
    InterpolantSpec spec{InterpolantKind::volume, 0.25, 1.0};
    Field3D one(d, 1.0);
    Field3D p = apply_interpolant(one, spec, nullptr);
    for (double v : p.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    SmoothFieldSampler s(d, 6);
    Field3D f = s.sample3d();
    Field3D pf = apply_interpolant(f, spec, nullptr);
    Field3D ppf = apply_interpolant(pf, spec, nullptr);
    CHECK(l2_norm(pf) <= l2_norm(f) * (1.0 + 1e-12));
    for (std::size_t n = 0; n < f.data().size(); ++n)
        CHECK(std::abs(ppf.data()[n] - pf.data()[n]) < 1e-12);
}

TEST_CASE("coarse observation scale retains a single mode") {
    DomainSpec d = grid(8, 8, 6);
    ModalBasis basis(d, params(1.0, 1.0), 0.95);
    CHECK(basis.retained_count() == 1);
    CHECK(basis.retained()[0].kx == 0);
    CHECK(basis.retained()[0].ky == 0);
    CHECK(basis.retained()[0].mz == 0);
}

TEST_CASE("csv export lists one row per retained mode") {
    DomainSpec d = grid(10, 10, 6);
    ModalBasis basis(d, params(0.1, 0.1), 0.3);
    std::string csv = basis.export_csv();
    CHECK(csv.rfind("j,lambda,kx,ky,mz\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == basis.retained_count() + 1);
}

TEST_CASE("measured c0 is deterministic and positive") {
    DomainSpec d = grid(12, 12, 8);
    PhysParams p = params(0.1, 0.1);
    for (InterpolantKind kind : {InterpolantKind::modal, InterpolantKind::volume}) {
        InterpolantSpec spec{kind, 0.25, 1.0};
        double a = measure_c0(spec, d, p, 10, 99);
        double b = measure_c0(spec, d, p, 10, 99);
        CHECK(a == b);
        CHECK(a > 0.0);
        CHECK(a < 5.0);
    }
}

TEST_CASE("modal interpolant requires a basis") {
    DomainSpec d = grid(8, 8, 6);
    InterpolantSpec spec{InterpolantKind::modal, 0.25, 1.0};
    CHECK_THROWS_AS(apply_interpolant(Field3D(d), spec, nullptr), invalid_field_error);
}
