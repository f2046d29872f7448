#ifndef ORBITVOL_OPTIMIZER_HPP
#define ORBITVOL_OPTIMIZER_HPP

#include <algorithm>
#include <vector>

#include "orbitvol/common.hpp"
#include "orbitvol/toric.hpp"

namespace orbitvol {

struct NewtonOptions {
    double tol = 1e-8;
    int max_iter = 100;
    double diverge_radius = 50.0;  // iterate norm beyond which we declare divergence
    FdStepRule fd;
};

enum class SolveStatus { Converged, MaxIterations, Diverged };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterations: return "MaxIterations";
        case SolveStatus::Diverged: return "Diverged";
    }
    return "?";
}

struct CriticalOrbitResult {
    Eigen::VectorXd x_star;
    double grad_norm = 0.0;
    int newton_iterations = 0;
    Eigen::MatrixXd hessian_at_solution;  // of phi = -log Vol, symmetric
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterations;
    bool hessian_pd = false;
    std::vector<double> phi_trace;  // phi value per accepted iterate
};

/// Damped Newton minimization of phi(x) = -orbit_log_volume(P, x), with
/// Armijo backtracking (factor 1/2, c1 = 1e-4). Derivatives of phi come from
/// central differences of orbit_log_volume. For Ric <= 0 potentials there is
/// no interior maximizer of Vol and the iteration diverges or stalls; the
/// result then carries converged = false rather than a fabricated point.
inline CriticalOrbitResult find_critical_orbit(const ToricPotential& P,
                                               const Eigen::VectorXd& x0,
                                               const NewtonOptions& opts = {}) {
    const auto phi = [&P](const Eigen::VectorXd& x) { return -orbit_log_volume(P, x); };
    const auto phi_or_inf = [&phi](const Eigen::VectorXd& x) {
        try {
            return phi(x);
        } catch (const NotKaehler&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    CriticalOrbitResult res;
    Eigen::VectorXd x = x0;
    double fx = phi(x);  // propagate NotKaehler at the start point
    res.phi_trace.push_back(fx);

    const auto fd_grad = [&](const Eigen::VectorXd& y) {
        return detail::fd_gradient(phi, y, opts.fd.steps(y));
    };
    const auto fd_hess = [&](const Eigen::VectorXd& y) {
        Eigen::MatrixXd H = detail::fd_hessian(phi, y, opts.fd.steps(y));
        return ((H + H.transpose()) / 2.0).eval();
    };

    Eigen::VectorXd g = fd_grad(x);
    Eigen::MatrixXd H = fd_hess(x);

    int iter = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    for (; iter < opts.max_iter; ++iter) {
        if (g.norm() < opts.tol) {
            status = SolveStatus::Converged;
            break;
        }

        Eigen::VectorXd dir;
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        if (llt.info() == Eigen::Success)
            dir = llt.solve(-g);
        else
            dir = -g;  // Hessian not PD: fall back to steepest descent
        if (dir.dot(g) >= 0.0) dir = -g;

        // Armijo backtracking; infinite phi (outside the Kaehler domain)
        // rejects the trial step the same way an insufficient decrease does.
        const double slope = g.dot(dir);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Eigen::VectorXd trial = x + alpha * dir;
            const double ft = phi_or_inf(trial);
            if (ft <= fx + 1e-4 * alpha * slope) {
                x = trial;
                fx = ft;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            status = SolveStatus::MaxIterations;
            ++iter;
            break;
        }

        res.phi_trace.push_back(fx);
        g = fd_grad(x);
        H = fd_hess(x);

        if (x.norm() > opts.diverge_radius) {
            status = SolveStatus::Diverged;
            ++iter;
            break;
        }
    }
    if (status == SolveStatus::MaxIterations && g.norm() < opts.tol)
        status = SolveStatus::Converged;

    res.x_star = x;
    res.grad_norm = g.norm();
    res.newton_iterations = iter;
    res.hessian_at_solution = H;
    res.status = status;
    res.converged = (status == SolveStatus::Converged);
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    res.hessian_pd = (llt.info() == Eigen::Success);
    return res;
}

struct MultistartResult {
    bool unique = false;
    double spread = 0.0;  // max pairwise distance of converged iterates
    std::vector<CriticalOrbitResult> results;
    bool all_converged = false;
};

inline MultistartResult multistart_uniqueness(const ToricPotential& P,
                                              const std::vector<Eigen::VectorXd>& starts,
                                              const NewtonOptions& opts = {}) {
    if (starts.size() < 2)
        throw std::invalid_argument("multistart_uniqueness: need at least 2 starts");
    MultistartResult out;
    out.results.reserve(starts.size());
    for (const auto& x0 : starts) out.results.push_back(find_critical_orbit(P, x0, opts));

    out.all_converged = std::all_of(out.results.begin(), out.results.end(),
                                    [](const auto& r) { return r.converged; });
    double spread = 0.0;
    for (size_t i = 0; i < out.results.size(); ++i)
        for (size_t j = i + 1; j < out.results.size(); ++j)
            spread = std::max(spread, (out.results[i].x_star - out.results[j].x_star).norm());
    out.spread = spread;
    out.unique = out.all_converged && spread < 10.0 * opts.tol;
    return out;
}

struct DecayProfile {
    std::vector<double> radii;
    std::vector<double> sup_vol;  // sup of Vol over sampled sphere points
    bool decays_to_zero = false;
    double floor = 0.0;
};

/// Samples Vol on spheres ||x|| = R for increasing radii; decays_to_zero
/// requires a non-increasing tail that ends below floor_factor times the
/// sup at the smallest radius.
inline DecayProfile boundary_decay_check(const ToricPotential& P,
                                         const std::vector<double>& radii,
                                         int samples_per_sphere, std::uint64_t seed = 0,
                                         double floor_factor = 1e-3) {
    if (radii.size() < 2) throw std::invalid_argument("boundary_decay_check: need >= 2 radii");
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw std::invalid_argument("boundary_decay_check: radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw std::invalid_argument("boundary_decay_check: radii must be increasing");
    }
    if (samples_per_sphere < 1)
        throw std::invalid_argument("boundary_decay_check: samples_per_sphere < 1");

    const int n = P.dimension();
    Rng rng(seed);
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(samples_per_sphere);
    for (int i = 0; i < samples_per_sphere; ++i) dirs.push_back(rng.unit_direction(n));

    DecayProfile out;
    out.radii = radii;
    for (double R : radii) {
        double sup_log = -std::numeric_limits<double>::infinity();
        for (const auto& d : dirs) sup_log = std::max(sup_log, orbit_log_volume(P, (R * d).eval()));
        out.sup_vol.push_back(std::exp(sup_log));
    }

    out.floor = floor_factor * out.sup_vol.front();
    bool monotone = true;
    for (size_t i = 1; i < out.sup_vol.size(); ++i)
        if (out.sup_vol[i] > out.sup_vol[i - 1] * (1.0 + 1e-12)) monotone = false;
    out.decays_to_zero = monotone && out.sup_vol.back() < out.floor;
    return out;
}

}  // namespace orbitvol

#endif  // ORBITVOL_OPTIMIZER_HPP
