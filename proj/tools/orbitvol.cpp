// Command-line harness: loads a JSON config, dispatches one analysis, and
// writes machine-readable JSON/CSV reports. One command per process.
//
// Exit codes: 0 success, 2 config error, 3 domain error, 4 nonconvergence.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "orbitvol/io.hpp"

namespace fs = std::filesystem;
using namespace orbitvol;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    bool quiet = false;
};

void reject_unknown_keys(const json& j, std::initializer_list<const char*> keys,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw std::invalid_argument(where + ": unknown key \"" + it.key() + "\"");
    }
}

struct LoadedConfig {
    json config;
    std::string digest;  // of the raw config bytes
};

LoadedConfig load_config(const CommonArgs& args) {
    std::ifstream is(args.config_path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open config file: " + args.config_path);
    std::string raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    LoadedConfig lc;
    lc.config = json::parse(raw);
    lc.digest = fnv1a_digest(raw);
    return lc;
}

json report_header(const LoadedConfig& lc) {
    return {{"library_version", kVersion}, {"config_digest", lc.digest}};
}

void emit(const CommonArgs& args, const std::string& filename, const std::string& content) {
    fs::create_directories(args.out_dir);
    const fs::path path = fs::path(args.out_dir) / filename;
    atomic_write(path, content);
    if (!args.quiet) std::cout << path.string() << "\n";
}

SamplerSettings sampler_from_config(const json& j, const GridRegion& region,
                                    const CommonArgs& args) {
    reject_unknown_keys(j, {"lines", "m", "seed"}, "sampler");
    SamplerSettings s;
    s.lines = j.value("lines", 100);
    s.m = j.value("m", 33);
    s.seed = j.value("seed", std::uint64_t{0});
    if (args.seed_override) s.seed = *args.seed_override;
    s.lo = region.lo;
    s.hi = region.hi;
    return s;
}

ConvexityVerdict expected_logvol_verdict(RicciVerdict r) {
    switch (r) {
        case RicciVerdict::NegativeDefinite: return ConvexityVerdict::StrictlyConvex;
        case RicciVerdict::PositiveDefinite: return ConvexityVerdict::StrictlyConcave;
        case RicciVerdict::Zero: return ConvexityVerdict::Affine;
        default: return ConvexityVerdict::Neither;
    }
}

int cmd_analyze(const CommonArgs& args) {
    const LoadedConfig lc = load_config(args);
    reject_unknown_keys(lc.config, {"potential", "region", "sampler", "tau"}, "config");
    const ToricPotential P = ToricPotential::from_json(lc.config.at("potential"));
    const GridRegion region = grid_region_from_json(lc.config.at("region"));
    const double tau = lc.config.value("tau", -1.0);
    const SamplerSettings sampler =
        sampler_from_config(lc.config.value("sampler", json::object()), region, args);

    const RicciClassification ricci = classify_ricci(P, region, tau);
    json convexity;
    ConvexityVerdict logvol_verdict = ConvexityVerdict::Neither;
    for (Functional f :
         {Functional::LogVol, Functional::Vol, Functional::NegLogVol, Functional::InvVol}) {
        const ConvexityReport r = check_convexity(P, f, sampler);
        if (f == Functional::LogVol) logvol_verdict = r.verdict;
        convexity[to_string(f)] = to_json(r);
    }

    json report = report_header(lc);
    report["potential"] = P.to_json();
    report["region"] = to_json(region);
    report["ricci"] = to_json(ricci);
    report["convexity"] = convexity;
    report["consistency"] = (expected_logvol_verdict(ricci.verdict) == logvol_verdict);

    emit(args, "analyze.json", report.dump(2) + "\n");
    return 0;
}

int cmd_critical(const CommonArgs& args) {
    const LoadedConfig lc = load_config(args);
    reject_unknown_keys(lc.config, {"potential", "optimizer", "region"}, "config");
    const ToricPotential P = ToricPotential::from_json(lc.config.at("potential"));
    const int n = P.dimension();

    const json opt = lc.config.value("optimizer", json::object());
    reject_unknown_keys(opt, {"tol", "max_iter", "starts"}, "optimizer");
    NewtonOptions nopts;
    nopts.tol = opt.value("tol", 1e-8);
    nopts.max_iter = opt.value("max_iter", 100);

    std::vector<Eigen::VectorXd> starts;
    const json jstarts = opt.value("starts", json{{"count", 8}});
    if (jstarts.is_array()) {
        for (const auto& s : jstarts) starts.push_back(vec_from_json(s));
    } else {
        reject_unknown_keys(jstarts, {"count", "lo", "hi", "seed"}, "starts");
        const int count = jstarts.value("count", 8);
        Eigen::VectorXd lo = jstarts.contains("lo") ? vec_from_json(jstarts.at("lo"))
                                                    : Eigen::VectorXd::Constant(n, -1.0);
        Eigen::VectorXd hi = jstarts.contains("hi") ? vec_from_json(jstarts.at("hi"))
                                                    : Eigen::VectorXd::Constant(n, 1.0);
        std::uint64_t seed = jstarts.value("seed", std::uint64_t{0});
        if (args.seed_override) seed = *args.seed_override;
        Rng rng(seed);
        for (int i = 0; i < count; ++i) starts.push_back(rng.uniform_in_box(lo, hi));
    }

    const MultistartResult ms = multistart_uniqueness(P, starts, nopts);

    // Outcome classification for the structured verdict field.
    std::string outcome;
    if (ms.unique) {
        outcome = "unique_maximum";
    } else if (ms.all_converged) {
        outcome = "every_orbit_critical";
    } else {
        // Divergent iterates end up where phi flattens out, so probe the
        // phi-Hessian at the configured starts: a negative direction there
        // means Vol has no interior maximum (as opposed to no critical
        // point at all, e.g. the Ricci-flat exponential case).
        const auto phi = [&P](const Eigen::VectorXd& y) { return -orbit_log_volume(P, y); };
        bool negative_direction = false;
        for (const auto& x0 : starts) {
            Eigen::MatrixXd H = detail::fd_hessian(phi, x0, nopts.fd.steps(x0));
            H = (H + H.transpose()) / 2.0;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
            const double scale = H.cwiseAbs().maxCoeff() + 1.0;
            if (es.eigenvalues().minCoeff() < -1e-6 * scale) negative_direction = true;
        }
        outcome = negative_direction ? "no_interior_maximum" : "no_critical_point";
    }

    json report = report_header(lc);
    report["potential"] = P.to_json();
    report["multistart"] = to_json(ms);
    report["outcome"] = outcome;
    if (ms.unique) {
        const auto& best = ms.results.front();
        report["x_star"] = vec_to_json(best.x_star);
        report["moment_map"] = vec_to_json(moment_map(P, best.x_star));
    }

    int code = 0;
    if (!ms.unique && lc.config.contains("region")) {
        const GridRegion region = grid_region_from_json(lc.config.at("region"));
        const RicciClassification ricci = classify_ricci(P, region);
        report["ricci_verdict"] = to_string(ricci.verdict);
        if (ricci.verdict == RicciVerdict::PositiveDefinite) code = 4;
    }

    emit(args, "critical.json", report.dump(2) + "\n");
    return code;
}

int cmd_profile(const CommonArgs& args) {
    const LoadedConfig lc = load_config(args);
    reject_unknown_keys(lc.config, {"potential", "functional", "segment"}, "config");
    const ToricPotential P = ToricPotential::from_json(lc.config.at("potential"));
    const Functional f =
        functional_from_string(lc.config.value("functional", std::string("logVol")));

    const json seg_j = lc.config.at("segment");
    reject_unknown_keys(seg_j, {"x0", "d", "t_min", "t_max", "m"}, "segment");
    LineSegment seg;
    seg.x0 = vec_from_json(seg_j.at("x0"));
    seg.d = vec_from_json(seg_j.at("d"));
    if (seg.d.norm() > 0.0) seg.d.normalize();
    seg.t_min = seg_j.at("t_min").get<double>();
    seg.t_max = seg_j.at("t_max").get<double>();
    seg.m = seg_j.value("m", 33);

    const Eigen::VectorXd values = sample_functional(P, f, seg);
    const Eigen::VectorXd diffs = second_differences(values, seg.step());
    Eigen::VectorXd t(seg.m);
    for (int i = 0; i < seg.m; ++i) t[i] = seg.t_min + i * seg.step();

    emit(args, "profile.csv", profile_csv(t, values, diffs));
    return 0;
}

struct Su2Settings {
    double lambda = 1.0;
    double t_lo = -1.5, t_hi = 1.5;
    int points = 25;
    int n_theta = 24, n_phi = 24, n_psi = 48;
    Eigen::Vector3d direction{0.0, 0.0, 1.0};  // coefficients in the X_k basis
};

Su2Settings su2_from_config(const json& j) {
    reject_unknown_keys(j, {"lambda", "t_range", "points", "resolutions", "direction"}, "su2");
    Su2Settings s;
    s.lambda = j.value("lambda", 1.0);
    if (j.contains("t_range")) {
        s.t_lo = j.at("t_range").at(0).get<double>();
        s.t_hi = j.at("t_range").at(1).get<double>();
    }
    s.points = j.value("points", 25);
    if (j.contains("resolutions")) {
        s.n_theta = j.at("resolutions").at(0).get<int>();
        s.n_phi = j.at("resolutions").at(1).get<int>();
        s.n_psi = j.at("resolutions").at(2).get<int>();
    }
    if (j.contains("direction"))
        for (int k = 0; k < 3; ++k) s.direction[k] = j.at("direction").at(k).get<double>();
    return s;
}

std::vector<double> t_grid_of(const Su2Settings& s) {
    std::vector<double> t(s.points);
    for (int i = 0; i < s.points; ++i)
        t[i] = s.t_lo + (s.t_hi - s.t_lo) * i / (s.points - 1);
    return t;
}

Matrix2cd direction_matrix(const Su2Settings& s) {
    const SU2LieBasis basis = SU2LieBasis::standard();
    Matrix2cd X = Matrix2cd::Zero();
    for (int k = 0; k < 3; ++k) X += s.direction[k] * basis.X[k];
    return X;
}

int cmd_su2(const CommonArgs& args) {
    const LoadedConfig lc = load_config(args);
    reject_unknown_keys(lc.config, {"su2"}, "config");
    const Su2Settings s = su2_from_config(lc.config.value("su2", json::object()));
    const HaarQuadrature quad = build_haar_quadrature(s.n_theta, s.n_phi, s.n_psi);
    const std::vector<ProfileRow> rows =
        geodesic_profile(direction_matrix(s), t_grid_of(s), s.lambda, quad);

    double best_t = rows.front().t, best_v = rows.front().vol_J;
    double min_sd = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (r.vol_J > best_v) { best_v = r.vol_J; best_t = r.t; }
        if (r.has_second_diff) min_sd = std::min(min_sd, r.second_diff);
    }
    double defect_at_argmax = 0.0;
    for (const auto& r : rows)
        if (r.t == best_t) defect_at_argmax = r.defect;

    json summary = report_header(lc);
    summary["lambda"] = s.lambda;
    summary["resolutions"] = {s.n_theta, s.n_phi, s.n_psi};
    summary["argmax_t"] = best_t;
    summary["defect_at_argmax"] = defect_at_argmax;
    summary["min_second_diff_neg_log_volJ"] = min_sd;
    summary["convexity_verdict"] = min_sd > 0.0 ? "StrictlyConvex" : "Neither";

    emit(args, "su2_profile.csv", su2_profile_csv(rows));
    emit(args, "su2_summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_lassalle(const CommonArgs& args) {
    const LoadedConfig lc = load_config(args);
    reject_unknown_keys(lc.config, {"su2", "function"}, "config");
    const Su2Settings s = su2_from_config(lc.config.value("su2", json::object()));
    const LassalleFunction fid =
        lassalle_function_from_string(lc.config.value("function", std::string("first_row_log")));
    const HaarQuadrature quad = build_haar_quadrature(s.n_theta, s.n_phi, s.n_psi);
    const LassalleResult res = lassalle_average(fid, direction_matrix(s), t_grid_of(s), quad);

    Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(res.t.data(), res.t.size());
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(res.values.data(), res.values.size());
    const double step = res.t[1] - res.t[0];

    json summary = report_header(lc);
    summary["function"] = to_string(fid);
    summary["report"] = to_json(res.report);

    emit(args, "lassalle.csv", profile_csv(t, v, second_differences(v, step)));
    emit(args, "lassalle.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbit-volume analysis harness"};
    app.require_subcommand(1);

    CommonArgs args;
    std::uint64_t seed_value = 0;
    bool seed_given = false;
    for (auto* name : {"analyze", "critical", "profile", "su2", "lassalle"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "JSON config path")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", seed_value, "override sampler seed")
            ->each([&seed_given](const std::string&) { seed_given = true; });
        sub->add_flag("--quiet", args.quiet, "suppress stdout");
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_given) args.seed_override = seed_value;
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        if (sub == "analyze") return cmd_analyze(args);
        if (sub == "critical") return cmd_critical(args);
        if (sub == "profile") return cmd_profile(args);
        if (sub == "su2") return cmd_su2(args);
        if (sub == "lassalle") return cmd_lassalle(args);
    } catch (const NotKaehler& e) {
        std::cerr << json{{"error", "not_kaehler"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    } catch (const SubmersionFailure& e) {
        std::cerr << json{{"error", "submersion_failure"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    } catch (const DegenerateGrid& e) {
        std::cerr << json{{"error", "degenerate_grid"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 1;
}
