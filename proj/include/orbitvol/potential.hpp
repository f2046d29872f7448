#ifndef ORBITVOL_POTENTIAL_HPP
#define ORBITVOL_POTENTIAL_HPP

#include <json.hpp>

#include <memory>
#include <utility>
#include <vector>

#include "orbitvol/common.hpp"

namespace orbitvol {

/// Torus-invariant Kaehler potential F : R^n -> R in logarithmic holomorphic
/// coordinates (z = x + i theta on C^n / 2 pi i Z^n). Immutable value object;
/// eval/grad/hess are exact closed forms, never numeric differences.
///
/// Built-in normalizations:
///   Flat            F(x) = ||x||^2 / 2
///   FubiniStudy     F(x) = (lambda/2) log(1 + sum_i e^{2 x_i})
///   SeparableCosh   F(x) = sum_i cosh(2 x_i) / 4
///   SeparableExp    F(x) = sum_i e^{x_i}
/// plus the closed algebra Sum(...) and Scale(lambda > 0, .).
class ToricPotential {
public:
    enum class Kind { Flat, FubiniStudy, SeparableCosh, SeparableExp, Sum, Scale };

    static ToricPotential flat(int n) { return ToricPotential(Kind::Flat, n, 1.0); }

    static ToricPotential fubini_study(int n, double lambda = 1.0) {
        require_positive(lambda);
        return ToricPotential(Kind::FubiniStudy, n, lambda);
    }

    static ToricPotential separable_cosh(int n) {
        return ToricPotential(Kind::SeparableCosh, n, 1.0);
    }

    static ToricPotential separable_exp(int n) {
        return ToricPotential(Kind::SeparableExp, n, 1.0);
    }

    static ToricPotential sum(std::vector<ToricPotential> terms) {
        if (terms.empty()) throw std::invalid_argument("sum: no terms");
        const int n = terms.front().dimension();
        for (const auto& t : terms)
            if (t.dimension() != n) throw DimensionMismatch("sum: member dimensions differ");
        ToricPotential p(Kind::Sum, n, 1.0);
        p.children_ = std::move(terms);
        return p;
    }

    static ToricPotential scale(double lambda, ToricPotential inner) {
        require_positive(lambda);
        ToricPotential p(Kind::Scale, inner.dimension(), lambda);
        p.children_.push_back(std::move(inner));
        return p;
    }

    int dimension() const { return n_; }
    Kind kind() const { return kind_; }

    double eval(const Eigen::VectorXd& x) const {
        check_dim(x);
        switch (kind_) {
            case Kind::Flat:
                return 0.5 * x.squaredNorm();
            case Kind::FubiniStudy:
                return 0.5 * lambda_ * std::log1p((2.0 * x).array().exp().sum());
            case Kind::SeparableCosh:
                return (2.0 * x).array().cosh().sum() / 4.0;
            case Kind::SeparableExp:
                return x.array().exp().sum();
            case Kind::Sum: {
                double acc = 0.0;
                for (const auto& c : children_) acc += c.eval(x);
                return acc;
            }
            case Kind::Scale:
                return lambda_ * children_.front().eval(x);
        }
        return 0.0;
    }

    Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
        check_dim(x);
        switch (kind_) {
            case Kind::Flat:
                return x;
            case Kind::FubiniStudy:
                return lambda_ * softmax_open(x);
            case Kind::SeparableCosh:
                return ((2.0 * x).array().sinh() / 2.0).matrix();
            case Kind::SeparableExp:
                return x.array().exp().matrix();
            case Kind::Sum: {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_);
                for (const auto& c : children_) acc += c.grad(x);
                return acc;
            }
            case Kind::Scale:
                return lambda_ * children_.front().grad(x);
        }
        return {};
    }

    Eigen::MatrixXd hess(const Eigen::VectorXd& x) const {
        check_dim(x);
        switch (kind_) {
            case Kind::Flat:
                return Eigen::MatrixXd::Identity(n_, n_);
            case Kind::FubiniStudy: {
                const Eigen::VectorXd s = softmax_open(x);
                Eigen::MatrixXd h = -2.0 * lambda_ * (s * s.transpose());
                h.diagonal() += 2.0 * lambda_ * s;
                return h;
            }
            case Kind::SeparableCosh:
                return (2.0 * x).array().cosh().matrix().asDiagonal();
            case Kind::SeparableExp:
                return x.array().exp().matrix().asDiagonal();
            case Kind::Sum: {
                Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_, n_);
                for (const auto& c : children_) acc += c.hess(x);
                return acc;
            }
            case Kind::Scale:
                return lambda_ * children_.front().hess(x);
        }
        return {};
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind_) {
            case Kind::Flat:
                j = {{"kind", "flat"}, {"n", n_}};
                break;
            case Kind::FubiniStudy:
                j = {{"kind", "fubini_study"}, {"n", n_}, {"lambda", lambda_}};
                break;
            case Kind::SeparableCosh:
                j = {{"kind", "separable_cosh"}, {"n", n_}};
                break;
            case Kind::SeparableExp:
                j = {{"kind", "separable_exp"}, {"n", n_}};
                break;
            case Kind::Sum: {
                nlohmann::json terms = nlohmann::json::array();
                for (const auto& c : children_) terms.push_back(c.to_json());
                j = {{"kind", "sum"}, {"terms", std::move(terms)}};
                break;
            }
            case Kind::Scale:
                j = {{"kind", "scale"}, {"lambda", lambda_}, {"inner", children_.front().to_json()}};
                break;
        }
        return j;
    }

    static ToricPotential from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("kind"))
            throw std::invalid_argument("potential: expected object with \"kind\"");
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "flat") {
            reject_unknown(j, {"kind", "n"});
            return flat(j.at("n").get<int>());
        }
        if (kind == "fubini_study") {
            reject_unknown(j, {"kind", "n", "lambda"});
            return fubini_study(j.at("n").get<int>(),
                                j.value("lambda", 1.0));
        }
        if (kind == "separable_cosh") {
            reject_unknown(j, {"kind", "n"});
            return separable_cosh(j.at("n").get<int>());
        }
        if (kind == "separable_exp") {
            reject_unknown(j, {"kind", "n"});
            return separable_exp(j.at("n").get<int>());
        }
        if (kind == "sum") {
            reject_unknown(j, {"kind", "terms"});
            std::vector<ToricPotential> terms;
            for (const auto& t : j.at("terms")) terms.push_back(from_json(t));
            return sum(std::move(terms));
        }
        if (kind == "scale") {
            reject_unknown(j, {"kind", "lambda", "inner"});
            return scale(j.at("lambda").get<double>(), from_json(j.at("inner")));
        }
        throw std::invalid_argument("potential: unknown kind \"" + kind + "\"");
    }

    bool operator==(const ToricPotential& other) const { return to_json() == other.to_json(); }

private:
    ToricPotential(Kind k, int n, double lambda) : kind_(k), n_(n), lambda_(lambda) {
        if (n < 1) throw std::invalid_argument("potential: dimension must be positive");
    }

    static void require_positive(double lambda) {
        if (!(lambda > 0.0)) throw std::invalid_argument("potential: lambda must be > 0");
    }

    void check_dim(const Eigen::VectorXd& x) const {
        if (x.size() != n_) throw DimensionMismatch("potential: point has wrong dimension");
    }

    // s_i = e^{2 x_i} / (1 + sum_j e^{2 x_j}); the open-simplex moment image.
    Eigen::VectorXd softmax_open(const Eigen::VectorXd& x) const {
        const Eigen::ArrayXd e2 = (2.0 * x).array().exp();
        return (e2 / (1.0 + e2.sum())).matrix();
    }

    static void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool known = false;
            for (const char* k : keys)
                if (it.key() == k) { known = true; break; }
            if (!known)
                throw std::invalid_argument("potential: unknown key \"" + it.key() + "\"");
        }
    }

    Kind kind_;
    int n_;
    double lambda_;
    std::vector<ToricPotential> children_;
};

}  // namespace orbitvol

#endif  // ORBITVOL_POTENTIAL_HPP
