#ifndef ORBITVOL_COMMON_HPP
#define ORBITVOL_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitvol {

inline constexpr const char* kVersion = "0.1.0";

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when Hess F fails to be positive definite at an evaluation point.
struct NotKaehler : std::runtime_error {
    explicit NotKaehler(const std::string& what, Eigen::VectorXd where = {})
        : std::runtime_error(what), point(std::move(where)) {}
    Eigen::VectorXd point;
};

struct SubmersionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StencilTooWide : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Axis-aligned box in R^n sampled on a uniform lattice.
struct GridRegion {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    std::vector<int> counts;  // nodes per axis, >= 1

    int dim() const { return static_cast<int>(lo.size()); }

    void validate() const {
        if (hi.size() != lo.size() || static_cast<int>(counts.size()) != lo.size())
            throw DimensionMismatch("GridRegion: lo/hi/counts sizes disagree");
        for (int i = 0; i < dim(); ++i) {
            if (!(lo[i] <= hi[i])) throw std::invalid_argument("GridRegion: lo > hi");
            if (counts[i] < 1) throw std::invalid_argument("GridRegion: counts < 1");
        }
    }

    long node_count() const {
        long total = 1;
        for (int c : counts) total *= c;
        return total;
    }

    // Row-major flat index: last axis varies fastest.
    Eigen::VectorXd node(long flat) const {
        const int n = dim();
        Eigen::VectorXd x(n);
        for (int a = n - 1; a >= 0; --a) {
            const long c = counts[a];
            const long k = flat % c;
            flat /= c;
            x[a] = (c == 1) ? lo[a] : lo[a] + (hi[a] - lo[a]) * static_cast<double>(k) / (c - 1);
        }
        return x;
    }
};

/// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
/// standard, and the transforms below avoid std::*_distribution so the same
/// seed yields the same stream on any conforming implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller, one deviate per call (the pair's partner is discarded).
    double gaussian() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd uniform_in_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        Eigen::VectorXd x(lo.size());
        for (int i = 0; i < lo.size(); ++i) x[i] = uniform(lo[i], hi[i]);
        return x;
    }

    Eigen::VectorXd unit_direction(int n) {
        Eigen::VectorXd d(n);
        double norm = 0.0;
        do {
            for (int i = 0; i < n; ++i) d[i] = gaussian();
            norm = d.norm();
        } while (norm < 1e-8);
        return d / norm;
    }

private:
    std::mt19937_64 eng_;
};

namespace detail {

/// log det of a symmetric positive-definite matrix via Cholesky.
/// Throws NotKaehler on a non-positive pivot.
inline double log_det_spd(const Eigen::MatrixXd& m, const Eigen::VectorXd& where = {}) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw NotKaehler("matrix is not positive definite", where);
    double acc = 0.0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < m.rows(); ++i) {
        const double piv = L(i, i);
        if (!(piv > 0.0) || !std::isfinite(piv))
            throw NotKaehler("non-positive Cholesky pivot", where);
        acc += 2.0 * std::log(piv);
    }
    return acc;
}

}  // namespace detail

}  // namespace orbitvol

#endif  // ORBITVOL_COMMON_HPP
