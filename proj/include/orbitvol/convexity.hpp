#ifndef ORBITVOL_CONVEXITY_HPP
#define ORBITVOL_CONVEXITY_HPP

#include <algorithm>
#include <string>

#include "orbitvol/common.hpp"
#include "orbitvol/toric.hpp"

namespace orbitvol {

/// Straight line in the orbit space R^n (a geodesic of G^c/G in the Abelian
/// case), sampled at m uniform parameters.
struct LineSegment {
    Eigen::VectorXd x0;
    Eigen::VectorXd d;  // unit
    double t_min = 0.0;
    double t_max = 1.0;
    int m = 5;

    void validate() const {
        if (d.size() != x0.size()) throw DimensionMismatch("LineSegment: x0/d sizes disagree");
        if (!(t_min < t_max)) throw std::invalid_argument("LineSegment: t_min >= t_max");
        if (m < 5) throw std::invalid_argument("LineSegment: need m >= 5");
        if (std::abs(d.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("LineSegment: direction must be unit");
    }

    double step() const { return (t_max - t_min) / (m - 1); }

    Eigen::VectorXd point(int i) const { return x0 + (t_min + i * step()) * d; }
};

enum class Functional { LogVol, Vol, NegLogVol, InvVol };

inline const char* to_string(Functional f) {
    switch (f) {
        case Functional::LogVol: return "logVol";
        case Functional::Vol: return "Vol";
        case Functional::NegLogVol: return "negLogVol";
        case Functional::InvVol: return "invVol";
    }
    return "?";
}

inline Functional functional_from_string(const std::string& s) {
    if (s == "logVol") return Functional::LogVol;
    if (s == "Vol") return Functional::Vol;
    if (s == "negLogVol") return Functional::NegLogVol;
    if (s == "invVol") return Functional::InvVol;
    throw std::invalid_argument("unknown functional \"" + s + "\"");
}

inline double apply_functional(Functional f, double log_vol) {
    switch (f) {
        case Functional::LogVol: return log_vol;
        case Functional::Vol: return std::exp(log_vol);
        case Functional::NegLogVol: return -log_vol;
        case Functional::InvVol: return std::exp(-log_vol);
    }
    return 0.0;
}

inline Eigen::VectorXd sample_functional(const ToricPotential& P, Functional f,
                                         const LineSegment& seg) {
    seg.validate();
    Eigen::VectorXd v(seg.m);
    for (int i = 0; i < seg.m; ++i) {
        const Eigen::VectorXd x = seg.point(i);
        try {
            v[i] = apply_functional(f, orbit_log_volume(P, x));
        } catch (const NotKaehler& e) {
            throw NotKaehler(std::string("sample_functional: ") + e.what() +
                                 " at t = " + std::to_string(seg.t_min + i * seg.step()),
                             x);
        }
    }
    return v;
}

/// Delta_i = (v_{i-1} - 2 v_i + v_{i+1}) / step^2, i = 1..m-2.
/// Exact (to rounding) for quadratics on a uniform grid.
inline Eigen::VectorXd second_differences(const Eigen::VectorXd& values, double step) {
    if (values.size() < 3) throw std::invalid_argument("second_differences: need >= 3 values");
    if (!(step > 0.0)) throw std::invalid_argument("second_differences: step must be > 0");
    Eigen::VectorXd d(values.size() - 2);
    for (int i = 1; i + 1 < values.size(); ++i)
        d[i - 1] = (values[i - 1] - 2.0 * values[i] + values[i + 1]) / (step * step);
    return d;
}

enum class ConvexityVerdict { StrictlyConvex, Convex, Affine, Concave, StrictlyConcave, Neither };

inline const char* to_string(ConvexityVerdict v) {
    switch (v) {
        case ConvexityVerdict::StrictlyConvex: return "StrictlyConvex";
        case ConvexityVerdict::Convex: return "Convex";
        case ConvexityVerdict::Affine: return "Affine";
        case ConvexityVerdict::Concave: return "Concave";
        case ConvexityVerdict::StrictlyConcave: return "StrictlyConcave";
        case ConvexityVerdict::Neither: return "Neither";
    }
    return "?";
}

struct ConvexityReport {
    std::string functional_name;
    ConvexityVerdict verdict = ConvexityVerdict::Neither;
    double min_second_difference = 0.0;
    double max_second_difference = 0.0;
    Eigen::VectorXd argmin_location;  // sample point realizing the min
    double eps_num = 0.0;
    double eps_strict = 0.0;
    int lines_tested = 0;
    std::uint64_t seed = 0;
    long ill_conditioned_nodes = 0;  // Hess F condition number > 1e10
};

namespace detail {

inline ConvexityVerdict convexity_verdict(double min_d, double max_d, double eps_num,
                                          double eps_strict) {
    if (std::max(std::abs(min_d), std::abs(max_d)) <= eps_num) return ConvexityVerdict::Affine;
    if (min_d > eps_strict) return ConvexityVerdict::StrictlyConvex;
    if (min_d > -eps_num) return ConvexityVerdict::Convex;
    if (max_d < -eps_strict) return ConvexityVerdict::StrictlyConcave;
    if (max_d < eps_num) return ConvexityVerdict::Concave;
    return ConvexityVerdict::Neither;
}

}  // namespace detail

/// Verdict for one precomputed value sequence on a uniform grid. Used by the
/// line sampler below and by the Lassalle averaging check.
inline ConvexityReport classify_values(const std::string& name, const Eigen::VectorXd& values,
                                       double step) {
    const Eigen::VectorXd d = second_differences(values, step);
    const double scale = values.cwiseAbs().maxCoeff() + 1.0;
    ConvexityReport r;
    r.functional_name = name;
    r.min_second_difference = d.minCoeff();
    r.max_second_difference = d.maxCoeff();
    r.eps_num = 1e-7 * scale;
    r.eps_strict = 1e-4 * scale;
    r.lines_tested = 1;
    r.verdict = detail::convexity_verdict(r.min_second_difference, r.max_second_difference,
                                          r.eps_num, r.eps_strict);
    return r;
}

struct SamplerSettings {
    int lines = 100;
    int m = 33;
    std::uint64_t seed = 0;
    Eigen::VectorXd lo;  // box region for base points
    Eigen::VectorXd hi;
};

/// Draws seeded random segments inside the box, aggregates second differences
/// of the chosen functional over all of them. Deterministic in the seed.
inline ConvexityReport check_convexity(const ToricPotential& P, Functional f,
                                       const SamplerSettings& s) {
    if (s.lo.size() != P.dimension() || s.hi.size() != P.dimension())
        throw DimensionMismatch("check_convexity: box dimension mismatch");
    if (s.lines < 1 || s.m < 5) throw std::invalid_argument("check_convexity: bad sampler settings");

    Rng rng(s.seed);
    const double diam = (s.hi - s.lo).norm();

    double min_d = std::numeric_limits<double>::infinity();
    double max_d = -std::numeric_limits<double>::infinity();
    double max_abs_v = 0.0;
    Eigen::VectorXd argmin;
    long ill = 0;

    for (int line = 0; line < s.lines; ++line) {
        Eigen::VectorXd a, b;
        double dist = 0.0;
        do {
            a = rng.uniform_in_box(s.lo, s.hi);
            b = rng.uniform_in_box(s.lo, s.hi);
            dist = (b - a).norm();
        } while (dist < 1e-6 * (diam + 1.0));

        LineSegment seg;
        seg.x0 = a;
        seg.d = (b - a) / dist;
        seg.t_min = 0.0;
        seg.t_max = dist;
        seg.m = s.m;

        Eigen::VectorXd v;
        try {
            v = sample_functional(P, f, seg);
        } catch (const NotKaehler& e) {
            throw NotKaehler("check_convexity: line " + std::to_string(line) + ": " + e.what(),
                             e.point);
        }
        max_abs_v = std::max(max_abs_v, v.cwiseAbs().maxCoeff());

        const Eigen::VectorXd d = second_differences(v, seg.step());
        for (int i = 0; i < d.size(); ++i) {
            if (d[i] < min_d) {
                min_d = d[i];
                argmin = seg.point(i + 1);
            }
            max_d = std::max(max_d, d[i]);
        }

        // Conditioning flag near the polytope boundary (reported, not fatal).
        for (int i = 0; i < seg.m; ++i) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.hess(seg.point(i)),
                                                              Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues().minCoeff();
            const double hi = es.eigenvalues().maxCoeff();
            if (!(lo > 0.0) || hi / lo > 1e10) ++ill;
        }
    }

    const double scale = max_abs_v + 1.0;
    ConvexityReport r;
    r.functional_name = to_string(f);
    r.verdict = detail::convexity_verdict(min_d, max_d, 1e-7 * scale, 1e-4 * scale);
    r.min_second_difference = min_d;
    r.max_second_difference = max_d;
    r.argmin_location = argmin;
    r.eps_num = 1e-7 * scale;
    r.eps_strict = 1e-4 * scale;
    r.lines_tested = s.lines;
    r.seed = s.seed;
    r.ill_conditioned_nodes = ill;
    return r;
}

struct AffineFit {
    Eigen::VectorXd a;
    double b = 0.0;
    double max_residual = 0.0;
};

/// Least-squares affine fit of logVol over the grid. A small residual means
/// Vol is exponential, the Ricci-flat normal form e^{sum a_i x_i + b}.
inline AffineFit fit_log_affine(const ToricPotential& P, const GridRegion& region) {
    region.validate();
    const int n = P.dimension();
    if (region.dim() != n) throw DimensionMismatch("fit_log_affine: region dimension mismatch");
    const long nodes = region.node_count();
    if (nodes < n + 1) throw DegenerateGrid("fit_log_affine: need at least n+1 nodes");

    Eigen::MatrixXd A(nodes, n + 1);
    Eigen::VectorXd y(nodes);
    for (long k = 0; k < nodes; ++k) {
        const Eigen::VectorXd x = region.node(k);
        A.row(k).head(n) = x.transpose();
        A(k, n) = 1.0;
        y[k] = orbit_log_volume(P, x);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < n + 1)
        throw DegenerateGrid("fit_log_affine: grid nodes are affinely dependent");
    const Eigen::VectorXd coef = qr.solve(y);

    AffineFit fit;
    fit.a = coef.head(n);
    fit.b = coef[n];
    fit.max_residual = (A * coef - y).cwiseAbs().maxCoeff();
    return fit;
}

}  // namespace orbitvol

#endif  // ORBITVOL_CONVEXITY_HPP
