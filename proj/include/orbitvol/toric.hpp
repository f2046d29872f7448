#ifndef ORBITVOL_TORIC_HPP
#define ORBITVOL_TORIC_HPP

#include <functional>
#include <optional>

#include "orbitvol/common.hpp"
#include "orbitvol/potential.hpp"

namespace orbitvol {

/// H(x) = det Hess F(x) up to a fixed positive constant; this returns log H.
inline double log_H(const ToricPotential& P, const Eigen::VectorXd& x) {
    return detail::log_det_spd(P.hess(x), x);
}

/// log of the Riemannian volume of the torus orbit over x:
/// (1/2) log H + n log(2 pi). In the Abelian case Vol = Vol_J.
inline double orbit_log_volume(const ToricPotential& P, const Eigen::VectorXd& x) {
    return 0.5 * log_H(P, x) + P.dimension() * std::log(2.0 * M_PI);
}

/// Step rule for outer finite differences of scalars whose evaluation is
/// exact: h_i = scale * (1 + |x_i|), scale defaulting to eps^{1/4}.
struct FdStepRule {
    double scale = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    double max_step = 0.5;
    bool richardson = false;

    Eigen::VectorXd steps(const Eigen::VectorXd& x) const {
        Eigen::VectorXd h(x.size());
        for (int i = 0; i < x.size(); ++i) {
            h[i] = scale * (1.0 + std::abs(x[i]));
            if (h[i] > max_step)
                throw StencilTooWide("finite-difference step exceeds configured bound");
        }
        return h;
    }
};

namespace detail {

/// Central second-difference Hessian of a scalar function, per-axis steps h.
template <typename F>
Eigen::MatrixXd fd_hessian(F&& f, const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd A(n, n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h[i];
        xm[i] -= h[i];
        A(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
        for (int j = i + 1; j < n; ++j) {
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h[i]; xpp[j] += h[j];
            xpm[i] += h[i]; xpm[j] -= h[j];
            xmp[i] -= h[i]; xmp[j] += h[j];
            xmm[i] -= h[i]; xmm[j] -= h[j];
            A(i, j) = A(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h[i] * h[j]);
        }
    }
    return A;
}

template <typename F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h[i];
        xm[i] -= h[i];
        g[i] = (f(xp) - f(xm)) / (2.0 * h[i]);
    }
    return g;
}

}  // namespace detail

/// Quadratic form -Hess_x(log H) together with its spectrum; its sign is the
/// sign of the Ricci form on the dense torus orbit.
struct RicciSample {
    Eigen::VectorXd x;
    Eigen::MatrixXd form;         // symmetric
    Eigen::VectorXd eigenvalues;  // ascending
};

inline RicciSample ricci_form(const ToricPotential& P, const Eigen::VectorXd& x,
                              const FdStepRule& rule = {}) {
    const auto f = [&P](const Eigen::VectorXd& y) { return log_H(P, y); };
    const Eigen::VectorXd h = rule.steps(x);
    Eigen::MatrixXd A = detail::fd_hessian(f, x, h);
    if (rule.richardson) {
        const Eigen::MatrixXd Ahalf = detail::fd_hessian(f, x, (0.5 * h).eval());
        A = (4.0 * Ahalf - A) / 3.0;
    }
    RicciSample s;
    s.x = x;
    s.form = -0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.form, Eigen::EigenvaluesOnly);
    s.eigenvalues = es.eigenvalues();  // ascending
    return s;
}

enum class RicciVerdict { PositiveDefinite, NegativeDefinite, Zero, Indefinite, Mixed };

inline const char* to_string(RicciVerdict v) {
    switch (v) {
        case RicciVerdict::PositiveDefinite: return "PositiveDefinite";
        case RicciVerdict::NegativeDefinite: return "NegativeDefinite";
        case RicciVerdict::Zero: return "Zero";
        case RicciVerdict::Indefinite: return "Indefinite";
        case RicciVerdict::Mixed: return "Mixed";
    }
    return "?";
}

struct RicciClassification {
    RicciVerdict verdict;
    double tau;
    long nodes = 0;
    double min_eigenvalue = 0.0;  // over all nodes
    double max_eigenvalue = 0.0;
    Eigen::VectorXd argmin_node;  // where min_eigenvalue occurred
    Eigen::VectorXd argmax_node;
};

/// Grid classification of the Ricci sign. tau < 0 requests the automatic
/// threshold 1e-6 * (1 + max |R entry| over the grid).
inline RicciClassification classify_ricci(const ToricPotential& P, const GridRegion& region,
                                          double tau = -1.0, const FdStepRule& rule = {}) {
    region.validate();
    if (region.dim() != P.dimension())
        throw DimensionMismatch("classify_ricci: region dimension mismatch");

    RicciClassification out;
    out.nodes = region.node_count();
    double min_eig = std::numeric_limits<double>::infinity();
    double max_eig = -std::numeric_limits<double>::infinity();
    double max_entry = 0.0;
    bool node_indefinite = false;
    std::vector<std::pair<double, double>> spectra;  // (min, max) per node
    spectra.reserve(static_cast<size_t>(out.nodes));

    for (long k = 0; k < out.nodes; ++k) {
        const Eigen::VectorXd x = region.node(k);
        RicciSample s;
        try {
            s = ricci_form(P, x, rule);
        } catch (const NotKaehler& e) {
            throw NotKaehler(std::string("classify_ricci: ") + e.what(), x);
        }
        const double lo = s.eigenvalues.minCoeff();
        const double hi = s.eigenvalues.maxCoeff();
        spectra.emplace_back(lo, hi);
        max_entry = std::max(max_entry, s.form.cwiseAbs().maxCoeff());
        if (lo < min_eig) { min_eig = lo; out.argmin_node = x; }
        if (hi > max_eig) { max_eig = hi; out.argmax_node = x; }
    }

    out.tau = tau >= 0.0 ? tau : 1e-6 * (1.0 + max_entry);
    out.min_eigenvalue = min_eig;
    out.max_eigenvalue = max_eig;

    for (const auto& [lo, hi] : spectra)
        if (lo < -out.tau && hi > out.tau) node_indefinite = true;

    if (node_indefinite)
        out.verdict = RicciVerdict::Indefinite;
    else if (min_eig > out.tau)
        out.verdict = RicciVerdict::PositiveDefinite;
    else if (max_eig < -out.tau)
        out.verdict = RicciVerdict::NegativeDefinite;
    else if (std::max(std::abs(min_eig), std::abs(max_eig)) <= out.tau)
        out.verdict = RicciVerdict::Zero;
    else
        out.verdict = RicciVerdict::Mixed;
    return out;
}

/// Toric moment map mu(x) = grad F(x); its Jacobian Hess F must be positive
/// definite (submersion property), which is asserted here.
inline Eigen::VectorXd moment_map(const ToricPotential& P, const Eigen::VectorXd& x) {
    Eigen::LLT<Eigen::MatrixXd> llt(P.hess(x));
    if (llt.info() != Eigen::Success)
        throw SubmersionFailure("moment_map: Hess F is singular at the given point");
    return P.grad(x);
}

}  // namespace orbitvol

#endif  // ORBITVOL_TORIC_HPP
