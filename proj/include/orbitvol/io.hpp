#ifndef ORBITVOL_IO_HPP
#define ORBITVOL_IO_HPP

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orbitvol/convexity.hpp"
#include "orbitvol/optimizer.hpp"
#include "orbitvol/su2.hpp"
#include "orbitvol/toric.hpp"

namespace orbitvol {

using json = nlohmann::json;

inline json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Eigen::VectorXd vec_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
    return v;
}

inline json mat_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const GridRegion& r) {
    return {{"lo", vec_to_json(r.lo)}, {"hi", vec_to_json(r.hi)}, {"counts", r.counts}};
}

inline GridRegion grid_region_from_json(const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "lo" && it.key() != "hi" && it.key() != "counts")
            throw std::invalid_argument("region: unknown key \"" + it.key() + "\"");
    GridRegion r;
    r.lo = vec_from_json(j.at("lo"));
    r.hi = vec_from_json(j.at("hi"));
    r.counts = j.at("counts").get<std::vector<int>>();
    r.validate();
    return r;
}

inline json to_json(const RicciClassification& c) {
    return {{"verdict", to_string(c.verdict)},
            {"tau", c.tau},
            {"nodes", c.nodes},
            {"min_eigenvalue", c.min_eigenvalue},
            {"max_eigenvalue", c.max_eigenvalue},
            {"argmin_node", vec_to_json(c.argmin_node)},
            {"argmax_node", vec_to_json(c.argmax_node)}};
}

inline json to_json(const ConvexityReport& r) {
    return {{"functional", r.functional_name},
            {"verdict", to_string(r.verdict)},
            {"min_second_difference", r.min_second_difference},
            {"max_second_difference", r.max_second_difference},
            {"argmin_location", vec_to_json(r.argmin_location)},
            {"eps_num", r.eps_num},
            {"eps_strict", r.eps_strict},
            {"lines_tested", r.lines_tested},
            {"seed", r.seed},
            {"ill_conditioned_nodes", r.ill_conditioned_nodes}};
}

inline json to_json(const CriticalOrbitResult& r) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.hessian_at_solution,
                                                      Eigen::EigenvaluesOnly);
    return {{"x_star", vec_to_json(r.x_star)},
            {"grad_norm", r.grad_norm},
            {"newton_iterations", r.newton_iterations},
            {"converged", r.converged},
            {"status", to_string(r.status)},
            {"hessian_pd", r.hessian_pd},
            {"hessian_eigenvalues", vec_to_json(es.eigenvalues())}};
}

inline json to_json(const MultistartResult& r) {
    json results = json::array();
    for (const auto& m : r.results) results.push_back(to_json(m));
    return {{"unique", r.unique},
            {"spread", r.spread},
            {"all_converged", r.all_converged},
            {"results", std::move(results)}};
}

inline json to_json(const DecayProfile& d) {
    return {{"radii", d.radii},
            {"sup_vol", d.sup_vol},
            {"decays_to_zero", d.decays_to_zero},
            {"floor", d.floor}};
}

inline json to_json(const OrbitVolumes& v) {
    return {{"vol_J", v.vol_J}, {"vol", v.vol}, {"density_rel_stddev", v.density_rel_stddev}};
}

// ---------------------------------------------------------------------------
// CSV. '.' decimal, '\n' line endings, header row; fixed shortest round-trip
// formatting via the default ostream with max_digits10 precision.

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace detail

inline std::string profile_csv(const Eigen::VectorXd& t, const Eigen::VectorXd& values,
                               const Eigen::VectorXd& second_diffs) {
    std::ostringstream os;
    os << "t,value,second_difference\n";
    for (int i = 0; i < t.size(); ++i) {
        os << detail::fmt(t[i]) << ',' << detail::fmt(values[i]) << ',';
        if (i >= 1 && i + 1 < t.size()) os << detail::fmt(second_diffs[i - 1]);
        os << '\n';
    }
    return os.str();
}

inline std::string su2_profile_csv(const std::vector<ProfileRow>& rows) {
    std::ostringstream os;
    os << "t,vol_J,vol,defect,second_diff_neg_log_volJ\n";
    for (const auto& r : rows) {
        os << detail::fmt(r.t) << ',' << detail::fmt(r.vol_J) << ',' << detail::fmt(r.vol) << ','
           << detail::fmt(r.defect) << ',';
        if (r.has_second_diff) os << detail::fmt(r.second_diff);
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

/// FNV-1a 64-bit digest, hex-encoded; used to stamp reports with the config.
inline std::string fnv1a_digest(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Write via temp file + rename so readers never observe partial output.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace orbitvol

#endif  // ORBITVOL_IO_HPP
