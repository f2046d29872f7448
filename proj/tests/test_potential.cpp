#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitvol/potential.hpp"
#include "orbitvol/toric.hpp"

using namespace orbitvol;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd x(static_cast<int>(v.size()));
    int i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

std::vector<ToricPotential> builtins() {
    return {ToricPotential::flat(2),
            ToricPotential::fubini_study(2, 1.0),
            ToricPotential::fubini_study(1, 2.5),
            ToricPotential::separable_cosh(2),
            ToricPotential::separable_exp(3),
            ToricPotential::sum({ToricPotential::flat(2), ToricPotential::separable_cosh(2)}),
            ToricPotential::scale(0.7, ToricPotential::fubini_study(2, 1.0))};
}

}  // namespace

TEST_CASE("eval closed forms") {
    CHECK(ToricPotential::flat(2).eval(vec({0, 0})) == 0.0);
    CHECK(ToricPotential::fubini_study(1).eval(vec({0})) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
    const auto s = ToricPotential::sum({ToricPotential::flat(1), ToricPotential::separable_exp(1)});
    CHECK(s.eval(vec({0})) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grad closed forms") {
    const VectorXd g = ToricPotential::flat(3).grad(vec({1, -2, 0}));
    CHECK(g.isApprox(vec({1, -2, 0})));
    const VectorXd gfs = ToricPotential::fubini_study(2).grad(vec({0, 0}));
    CHECK(gfs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(gfs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(ToricPotential::separable_exp(1).grad(vec({0}))[0] == doctest::Approx(1.0));
}

TEST_CASE("hess closed forms") {
    CHECK(ToricPotential::flat(2).hess(vec({0.3, -4.0})).isIdentity(1e-15));
    CHECK(ToricPotential::fubini_study(1).hess(vec({0}))(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    const MatrixXd hc = ToricPotential::separable_cosh(2).hess(vec({0, 0}));
    CHECK(hc.isIdentity(1e-15));
}

TEST_CASE("finite differences match exact derivatives") {
    Rng rng(12345);
    for (const auto& P : builtins()) {
        const int n = P.dimension();
        for (int trial = 0; trial < 100; ++trial) {
            VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = rng.uniform(-2.0, 2.0);

            const VectorXd g = P.grad(x);
            const MatrixXd H = P.hess(x);
            CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);

            VectorXd h(n), hg(n);
            const double gscale = std::cbrt(std::numeric_limits<double>::epsilon());
            for (int i = 0; i < n; ++i) {
                h[i] = 1e-4 * (1.0 + std::abs(x[i]));
                hg[i] = gscale * (1.0 + std::abs(x[i]));
            }
            const auto f = [&P](const VectorXd& y) { return P.eval(y); };
            const VectorXd gfd = detail::fd_gradient(f, x, hg);
            const MatrixXd Hfd = detail::fd_hessian(f, x, h);

            CHECK((gfd - g).cwiseAbs().maxCoeff() / (1.0 + g.cwiseAbs().maxCoeff()) < 1e-8);
            CHECK((Hfd - H).cwiseAbs().maxCoeff() / (1.0 + H.cwiseAbs().maxCoeff()) < 1e-6);

            Eigen::SelfAdjointEigenSolver<MatrixXd> es(H, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("scale algebra") {
    const auto P = ToricPotential::fubini_study(2, 1.0);
    const auto Q = ToricPotential::scale(3.0, P);
    const VectorXd x = vec({0.4, -0.9});
    CHECK(Q.eval(x) == doctest::Approx(3.0 * P.eval(x)).epsilon(1e-14));
    CHECK(Q.hess(x).isApprox(3.0 * P.hess(x), 1e-14));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q.hess(x), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("json round-trip is lossless") {
    for (const auto& P : builtins()) {
        const auto j = P.to_json();
        const auto Q = ToricPotential::from_json(j);
        CHECK(Q.to_json() == j);
        CHECK(Q == P);
    }
}

TEST_CASE("json rejects unknown keys and bad values") {
    CHECK_THROWS_AS(ToricPotential::from_json({{"kind", "flat"}, {"n", 2}, {"extra", 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ToricPotential::from_json({{"kind", "nope"}, {"n", 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ToricPotential::fubini_study(2, -1.0), std::invalid_argument);
}

TEST_CASE("dimension mismatch") {
    CHECK_THROWS_AS(ToricPotential::flat(2).eval(vec({1, 2, 3})), DimensionMismatch);
    CHECK_THROWS_AS(ToricPotential::sum({ToricPotential::flat(1), ToricPotential::flat(2)}),
                    DimensionMismatch);
}
