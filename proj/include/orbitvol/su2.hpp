#ifndef ORBITVOL_SU2_HPP
#define ORBITVOL_SU2_HPP

#include <array>
#include <complex>
#include <vector>

#include "orbitvol/common.hpp"
#include "orbitvol/convexity.hpp"

namespace orbitvol {

using Matrix2cd = Eigen::Matrix2cd;
using Matrix3cd = Eigen::Matrix3cd;
using complexd = std::complex<double>;

/// Unit quaternion q0 + q1 i + q2 j + q3 k, mapped to SU(2) via
/// q0 I + q1 (i sigma1) + q2 (i sigma2) + q3 (i sigma3).
struct SU2Element {
    double q0 = 1.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;

    double norm() const { return std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3); }

    SU2Element normalized() const {
        const double n = norm();
        return {q0 / n, q1 / n, q2 / n, q3 / n};
    }

    SU2Element operator*(const SU2Element& o) const {
        return {q0 * o.q0 - q1 * o.q1 - q2 * o.q2 - q3 * o.q3,
                q0 * o.q1 + q1 * o.q0 + q2 * o.q3 - q3 * o.q2,
                q0 * o.q2 - q1 * o.q3 + q2 * o.q0 + q3 * o.q1,
                q0 * o.q3 + q1 * o.q2 - q2 * o.q1 + q3 * o.q0};
    }

    Matrix2cd matrix() const {
        const complexd I(0.0, 1.0);
        Matrix2cd g;
        g << q0 + I * q3, q2 + I * q1,
            -q2 + I * q1, q0 - I * q3;
        return g;
    }
};

/// Basis X_k = sigma_k / (2i) of su(2); satisfies [X1, X2] = X3 cyclically.
/// (With +i sigma_k / 2 the bracket picks up a sign; all Gram/volume
/// quantities are invariant under the global sign choice.)
struct SU2LieBasis {
    std::array<Matrix2cd, 3> X;

    static SU2LieBasis standard() {
        const complexd I(0.0, 1.0);
        SU2LieBasis b;
        b.X[0] << 0.0, -0.5 * I, -0.5 * I, 0.0;         // sigma1 / 2i
        b.X[1] << 0.0, -0.5, 0.5, 0.0;                  // sigma2 / 2i
        b.X[2] << -0.5 * I, 0.0, 0.0, 0.5 * I;          // sigma3 / 2i
        return b;
    }
};

/// Euler-angle product rule integrating against normalized Haar measure on
/// SU(2): Gauss-Legendre in theta on [0, pi] with density sin(theta), and
/// periodic trapezoid in phi on [0, 2pi) and psi on [0, 4pi).
struct HaarQuadrature {
    std::vector<SU2Element> nodes;
    std::vector<Matrix2cd> matrices;  // cached node matrices
    std::vector<double> weights;      // normalized, positive
    int n_theta = 0, n_phi = 0, n_psi = 0;
    double total_weight = 0.0;

    /// Weighted average; dividing by the accumulated weight makes the
    /// integral of the constant 1 come out exactly 1.
    template <typename F>
    auto integrate(F&& f) const -> decltype(f(matrices[0]) * 1.0) {
        using R = decltype(f(matrices[0]) * 1.0);
        R acc = R(0.0);
        for (size_t i = 0; i < matrices.size(); ++i) acc += weights[i] * f(matrices[i]);
        return acc / total_weight;  // x / x == 1, so the constant 1 integrates exactly
    }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace detail

inline HaarQuadrature build_haar_quadrature(int n_theta, int n_phi, int n_psi) {
    if (n_theta < 4 || n_phi < 4 || n_psi < 4)
        throw std::invalid_argument("build_haar_quadrature: resolution too small (need >= 4)");

    std::vector<double> gx, gw;
    detail::gauss_legendre(n_theta, gx, gw);

    HaarQuadrature q;
    q.n_theta = n_theta;
    q.n_phi = n_phi;
    q.n_psi = n_psi;
    q.nodes.reserve(static_cast<size_t>(n_theta) * n_phi * n_psi);

    double raw_total = 0.0;
    std::vector<double> theta_w(n_theta);
    for (int a = 0; a < n_theta; ++a) {
        const double theta = 0.5 * M_PI * (gx[a] + 1.0);
        theta_w[a] = gw[a] * std::sin(theta);
        raw_total += theta_w[a];
    }

    for (int a = 0; a < n_theta; ++a) {
        const double theta = 0.5 * M_PI * (gx[a] + 1.0);
        const double wt = theta_w[a] / raw_total / n_phi / n_psi;
        for (int b = 0; b < n_phi; ++b) {
            const double phi = 2.0 * M_PI * b / n_phi;
            for (int c = 0; c < n_psi; ++c) {
                const double psi = 4.0 * M_PI * c / n_psi;
                // ZYZ Euler factorization as quaternions.
                const SU2Element qz1{std::cos(phi / 2.0), 0.0, 0.0, std::sin(phi / 2.0)};
                const SU2Element qy{std::cos(theta / 2.0), 0.0, std::sin(theta / 2.0), 0.0};
                const SU2Element qz2{std::cos(psi / 2.0), 0.0, 0.0, std::sin(psi / 2.0)};
                const SU2Element g = qz1 * qy * qz2;
                q.nodes.push_back(g);
                q.matrices.push_back(g.matrix());
                q.weights.push_back(wt);
            }
        }
    }
    // Kahan-renormalize so that even a naive re-sum of the weights lands
    // within ~1e-15 of 1.
    double total = 0.0, comp = 0.0;
    for (double w : q.weights) {
        const double y = w - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    for (double& w : q.weights) w /= total;
    total = 0.0;
    for (double w : q.weights) total += w;
    q.total_weight = total;
    return q;
}

/// Point of CP^3 = P(gl(2, C)) as a nonzero 2x2 complex matrix representative.
struct ProjectivePoint {
    Matrix2cd m;

    void validate() const {
        if (!(m.norm() > 0.0)) throw std::invalid_argument("ProjectivePoint: zero representative");
    }
};

namespace detail {

inline complexd frob_inner(const Matrix2cd& a, const Matrix2cd& b) {
    // <a, b> = tr(a b^dagger): linear in a, conjugate-linear in b.
    return (a.array() * b.array().conjugate()).sum();
}

inline double det3_hermitian(const Matrix3cd& g) {
    return std::max(g.determinant().real(), 0.0);
}

}  // namespace detail

/// Hermitian Gram matrix h(u_j, u_k) of the fundamental tangent vectors
/// u_k = p X_k under the Fubini-Study form
///   h(u, v) = lambda (<u,v><p,p> - <u,p><p,v>) / <p,p>^2,
/// scale-invariant in the homogeneous representative p.
inline Matrix3cd fs_tangent_gram(const ProjectivePoint& p, const SU2LieBasis& basis,
                                 double lambda = 1.0) {
    p.validate();
    std::array<Matrix2cd, 3> u;
    for (int k = 0; k < 3; ++k) u[k] = p.m * basis.X[k];

    const double pp = detail::frob_inner(p.m, p.m).real();
    std::array<complexd, 3> up;
    for (int k = 0; k < 3; ++k) up[k] = detail::frob_inner(u[k], p.m);

    Matrix3cd g;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            g(j, k) = lambda * (detail::frob_inner(u[j], u[k]) * pp - up[j] * std::conj(up[k])) /
                      (pp * pp);
    return ((g + g.adjoint()) / 2.0).eval();
}

/// sqrt(det) of the Hermitian Gram matrix: the J-volume density of the
/// right-SU(2) orbit through p. Zero exactly on degenerate (rank-1) orbits.
inline double jvol_density(const ProjectivePoint& p, const SU2LieBasis& basis,
                           double lambda = 1.0) {
    return std::sqrt(detail::det3_hermitian(fs_tangent_gram(p, basis, lambda)));
}

/// sqrt(det) of the real Gram matrix Re h(u_j, u_k): the Riemannian volume
/// density of the same orbit. Always >= jvol_density, with equality exactly
/// on Lagrangian orbits.
inline double riemannian_density(const ProjectivePoint& p, const SU2LieBasis& basis,
                                 double lambda = 1.0) {
    const Eigen::Matrix3d re = fs_tangent_gram(p, basis, lambda).real();
    return std::sqrt(std::max(re.determinant(), 0.0));
}

struct OrbitVolumes {
    double vol_J = 0.0;
    double vol = 0.0;
    double density_rel_stddev = 0.0;  // of jvol_density over orbit nodes
};

inline OrbitVolumes orbit_volumes(const ProjectivePoint& p, const SU2LieBasis& basis,
                                  double lambda, const HaarQuadrature& quad) {
    p.validate();
    OrbitVolumes out;
    std::vector<double> jd(quad.matrices.size());
    double mean = 0.0, vol = 0.0;
    for (size_t i = 0; i < quad.matrices.size(); ++i) {
        const ProjectivePoint pg{p.m * quad.matrices[i]};
        jd[i] = jvol_density(pg, basis, lambda);
        const double w = quad.weights[i] / quad.total_weight;
        mean += w * jd[i];
        vol += w * riemannian_density(pg, basis, lambda);
    }
    // two-pass variance: the one-pass form cancels catastrophically on
    // (near-)invariant densities, exactly the case the stddev is meant to flag
    double var = 0.0;
    for (size_t i = 0; i < jd.size(); ++i) {
        const double d = jd[i] - mean;
        var += (quad.weights[i] / quad.total_weight) * d * d;
    }
    out.vol_J = mean;
    out.vol = vol;
    out.density_rel_stddev = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    return out;
}

namespace detail {

// exp(i t X) for X in su(2): i t X is Hermitian, so diagonalize.
inline Matrix2cd exp_i_t(const Matrix2cd& X, double t) {
    const Matrix2cd A = complexd(0.0, t) * X;
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(A);
    const Eigen::Vector2d ev = es.eigenvalues();
    Matrix2cd D = Matrix2cd::Zero();
    D(0, 0) = std::exp(ev[0]);
    D(1, 1) = std::exp(ev[1]);
    return es.eigenvectors() * D * es.eigenvectors().adjoint();
}

}  // namespace detail

struct ProfileRow {
    double t = 0.0;
    double vol_J = 0.0;
    double vol = 0.0;
    double defect = 0.0;             // vol - vol_J
    double density_rel_stddev = 0.0;
    double second_diff = 0.0;        // of -log vol_J; valid on interior rows
    bool has_second_diff = false;
};

/// Orbit volumes along the geodesic p(t) = k0 exp(i t X) through [k0].
inline std::vector<ProfileRow> geodesic_profile(const Matrix2cd& X,
                                                const std::vector<double>& t_grid,
                                                double lambda, const HaarQuadrature& quad,
                                                const SU2LieBasis& basis = SU2LieBasis::standard(),
                                                const Matrix2cd& k0 = Matrix2cd::Identity()) {
    if (t_grid.size() < 5) throw std::invalid_argument("geodesic_profile: need >= 5 grid points");
    if (!(X.norm() > 0.0)) throw std::invalid_argument("geodesic_profile: X must be nonzero");
    const double step = t_grid[1] - t_grid[0];
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (std::abs(t_grid[i] - t_grid[i - 1] - step) > 1e-9 * (std::abs(step) + 1.0))
            throw std::invalid_argument("geodesic_profile: t_grid must be uniform");

    std::vector<ProfileRow> rows;
    rows.reserve(t_grid.size());
    for (double t : t_grid) {
        const ProjectivePoint p{k0 * detail::exp_i_t(X, t)};
        const OrbitVolumes ov = orbit_volumes(p, basis, lambda, quad);
        ProfileRow r;
        r.t = t;
        r.vol_J = ov.vol_J;
        r.vol = ov.vol;
        r.defect = ov.vol - ov.vol_J;
        r.density_rel_stddev = ov.density_rel_stddev;
        rows.push_back(r);
    }
    for (size_t i = 1; i + 1 < rows.size(); ++i) {
        rows[i].second_diff = (-std::log(rows[i - 1].vol_J) + 2.0 * std::log(rows[i].vol_J) -
                               std::log(rows[i + 1].vol_J)) /
                              (step * step);
        rows[i].has_second_diff = true;
    }
    return rows;
}

enum class LassalleFunction { FrobeniusLog, FirstRowLog };

inline const char* to_string(LassalleFunction f) {
    switch (f) {
        case LassalleFunction::FrobeniusLog: return "frobenius_log";
        case LassalleFunction::FirstRowLog: return "first_row_log";
    }
    return "?";
}

inline LassalleFunction lassalle_function_from_string(const std::string& s) {
    if (s == "frobenius_log") return LassalleFunction::FrobeniusLog;
    if (s == "first_row_log") return LassalleFunction::FirstRowLog;
    throw std::invalid_argument("unknown Lassalle function \"" + s + "\"");
}

struct LassalleResult {
    std::vector<double> t;
    std::vector<double> values;  // F(t) = integral of f(k(t) g) d mu(g)
    ConvexityReport report;
};

/// Haar average F([k]) of a PSH function f over the right-SU(2) orbit of
/// k(t) = k0 exp(i t X), plus a second-difference convexity verdict.
///   frobenius_log:  f(M) = log ||M||_F^2   (right-invariant)
///   first_row_log:  f(M) = log(|M11|^2 + |M12|^2)
inline LassalleResult lassalle_average(LassalleFunction fid, const Matrix2cd& X,
                                       const std::vector<double>& t_grid,
                                       const HaarQuadrature& quad,
                                       const Matrix2cd& k0 = Matrix2cd::Identity()) {
    if (t_grid.size() < 3) throw std::invalid_argument("lassalle_average: need >= 3 grid points");
    const double step = t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 1.0;

    const auto f = [fid](const Matrix2cd& M) {
        switch (fid) {
            case LassalleFunction::FrobeniusLog:
                return std::log(M.squaredNorm());
            case LassalleFunction::FirstRowLog:
                return std::log(std::norm(M(0, 0)) + std::norm(M(0, 1)));
        }
        return 0.0;
    };

    LassalleResult out;
    out.t = t_grid;
    out.values.reserve(t_grid.size());
    for (double t : t_grid) {
        const Matrix2cd k = (X.norm() > 0.0) ? (k0 * detail::exp_i_t(X, t)).eval() : k0;
        if (std::abs(k.determinant()) < 1e-300)
            throw std::invalid_argument("lassalle_average: singular matrix on path");
        out.values.push_back(quad.integrate([&](const Matrix2cd& g) { return f(k * g); }));
    }
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(out.values.data(), out.values.size());
    out.report = classify_values(to_string(fid), v, step);
    return out;
}

}  // namespace orbitvol

#endif  // ORBITVOL_SU2_HPP
