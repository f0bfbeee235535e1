#include "hsricc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hsricc/hardy.hpp"
#include "hsricc/rng.hpp"

namespace hsricc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

struct RunConfig {
    json doc;
    std::uint64_t seed = 0;
    fs::path out_dir;
    std::string config_hash;
};

double parse_number_or_inf(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "Inf" || s == "Infinity")
            return std::numeric_limits<double>::infinity();
    }
    throw ConfigError(std::string(what) + ": expected a number or \"inf\"");
}

Eigen::VectorXd parse_vector(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(what) + ": expected numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
    const size_t rows = j.size();
    const size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ConfigError(std::string(what) + ": expected rows of numbers");
    Eigen::MatrixXd m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(std::string(what) + ": ragged rows");
        for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

SolverConfig parse_solver_config(const json& doc) {
    SolverConfig cfg = SolverConfig::defaults();
    if (!doc.contains("solver")) return cfg;
    const json& s = doc.at("solver");
    if (s.contains("lambda_schedule")) {
        const json& ls = s.at("lambda_schedule");
        if (ls.is_array()) {
            cfg.lambda_schedule.assign(ls.begin(), ls.end());
        } else {
            cfg.lambda_schedule = geometric_schedule(ls.value("start", 1.0),
                                                     ls.value("ratio", 0.5),
                                                     ls.value("stages", 20));
        }
    }
    if (s.contains("omega_schedule")) {
        const json& os = s.at("omega_schedule");
        if (os.is_array()) {
            cfg.omega_schedule.assign(os.begin(), os.end());
        } else {
            cfg.omega_schedule = half_power_schedule(os.value("kmax", 12));
        }
    }
    cfg.fp_tol = s.value("fp_tol", cfg.fp_tol);
    cfg.cauchy_tol = s.value("cauchy_tol", cfg.cauchy_tol);
    cfg.residual_tol = s.value("residual_tol", cfg.residual_tol);
    cfg.max_fp_iter = s.value("max_fp_iter", cfg.max_fp_iter);
    cfg.max_outer = s.value("max_outer", cfg.max_outer);
    cfg.validate();
    return cfg;
}

HardyPlantSpec parse_hardy_spec(const json& p, std::optional<int> modes_override) {
    HardyPlantSpec spec;
    spec.space_dim = p.value("space_dim", 3);
    spec.lambda_hardy = p.value("lambda_hardy", 0.1);
    spec.modes = modes_override.value_or(p.value("modes", 32));
    if (p.contains("gamma_perf")) spec.gamma_perf = parse_number_or_inf(p.at("gamma_perf"),
                                                                        "gamma_perf");
    if (p.contains("b_profile")) {
        const json& b = p.at("b_profile");
        if (b.is_array()) {
            spec.b_profile = parse_vector(b, "b_profile");
        } else {
            const double decay = b.value("decay", 2.0);
            const double scale = b.value("scale", 1.0);
            spec.b_profile.resize(spec.modes);
            for (int j = 0; j < spec.modes; ++j)
                spec.b_profile[j] = scale * std::pow(j + 1.0, -decay);
        }
    }
    if (p.contains("c1_weyl")) spec.c1_weyl = p.at("c1_weyl").get<double>();
    if (p.contains("domain_measure"))
        spec.domain_measure = p.at("domain_measure").get<double>();
    return spec;
}

TripletPtr parse_triplet(const json& p) {
    if (!p.contains("rho_sq")) throw ConfigError("problem: missing rho_sq");
    Eigen::VectorXd rho_sq = parse_vector(p.at("rho_sq"), "rho_sq");
    if (p.contains("kappa1") || p.contains("kappa2")) {
        const double r1 = std::sqrt(rho_sq[0]);
        return std::make_shared<const SpectralTriplet>(std::move(rho_sq),
                                                       p.value("kappa1", 1.0 / r1),
                                                       p.value("kappa2", 1.0 / r1));
    }
    return make_triplet(std::move(rho_sq));
}

// problem sources for `solve` / `study`
struct ProblemSource {
    RiccatiProblem prob;
    std::optional<HardyPlant> hardy;  // kept when the problem came from a hardy spec
};

ProblemSource parse_problem(const json& doc, std::optional<int> modes_override) {
    if (!doc.contains("problem")) throw ConfigError("config: missing \"problem\"");
    const json& p = doc.at("problem");
    const std::string type = p.value("type", "");
    if (type == "scalar") {
        const double a = p.value("a", 1.0), g = p.value("g", 1.0), f = p.value("f", 3.0);
        auto t = make_triplet(Eigen::VectorXd::Constant(1, p.value("rho_sq", 1.0)));
        return ProblemSource{
            RiccatiProblem::checked(
                LyapunovOperator{Eigen::MatrixXd::Constant(1, 1, a), a > 0.0 ? a : 0.0},
                QuadraticOperator{Eigen::MatrixXd::Constant(1, 1, g),
                                  g > 0.0 ? std::optional<double>(g) : std::nullopt},
                HsOperator(t, Eigen::MatrixXd::Constant(1, 1, f))),
            {}};
    }
    if (type == "matrices") {
        auto t = parse_triplet(p);
        Eigen::MatrixXd a = parse_matrix(p.at("a_mat"), "a_mat");
        Eigen::MatrixXd g = parse_matrix(p.at("gamma_mat"), "gamma_mat");
        Eigen::MatrixXd f = parse_matrix(p.at("f_mat"), "f_mat");
        const double omega = p.contains("omega")
                                 ? p.at("omega").get<double>()
                                 : std::max(0.0, LyapunovOperator::coercivity_constant(a, *t));
        LyapunovOperator l =
            omega > 0.0 ? LyapunovOperator::certified(std::move(a), *t, omega)
                        : LyapunovOperator{std::move(a), 0.0};
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()),
                                                          Eigen::EigenvaluesOnly);
        const double gmin = es.eigenvalues().minCoeff();
        return ProblemSource{
            RiccatiProblem::checked(std::move(l),
                                    QuadraticOperator{std::move(g),
                                                      gmin > 0.0 ? std::optional<double>(gmin)
                                                                 : std::nullopt},
                                    HsOperator(t, std::move(f))),
            {}};
    }
    if (type == "hardy") {
        HardyPlant hp = build_hardy_plant(parse_hardy_spec(p, modes_override));
        RiccatiProblem prob = build_riccati_problem(hp.plant);
        return ProblemSource{std::move(prob), std::move(hp)};
    }
    throw ConfigError("problem.type must be one of scalar | matrices | hardy");
}

ControlPlant parse_plant(const json& doc, std::optional<int> modes_override,
                         std::optional<HardyPlant>* hardy_out) {
    if (!doc.contains("plant")) throw ConfigError("config: missing \"plant\"");
    const json& p = doc.at("plant");
    const std::string type = p.value("type", "");
    if (type == "scalar") {
        auto t = make_triplet(Eigen::VectorXd::Constant(1, p.value("rho_sq", 1.0)));
        return ControlPlant::checked(
            t, Eigen::MatrixXd::Constant(1, 1, p.value("a", 1.0)),
            Eigen::MatrixXd::Constant(1, 1, p.value("b1", 1.0)),
            Eigen::MatrixXd::Constant(1, 1, p.value("b2", 1.0)),
            Eigen::MatrixXd::Constant(1, 1, p.value("c1", 1.0)),
            p.contains("gamma_perf") ? parse_number_or_inf(p.at("gamma_perf"), "gamma_perf")
                                     : 2.0);
    }
    if (type == "matrices") {
        auto t = parse_triplet(p);
        return ControlPlant::checked(
            t, parse_matrix(p.at("a_mat"), "a_mat"),
            p.contains("b1_mat") ? parse_matrix(p.at("b1_mat"), "b1_mat")
                                 : Eigen::MatrixXd::Zero(t->dim(), 0),
            parse_matrix(p.at("b2_mat"), "b2_mat"), parse_matrix(p.at("c1_mat"), "c1_mat"),
            p.contains("gamma_perf") ? parse_number_or_inf(p.at("gamma_perf"), "gamma_perf")
                                     : 1.0);
    }
    if (type == "hardy") {
        HardyPlant hp = build_hardy_plant(parse_hardy_spec(p, modes_override));
        ControlPlant plant = hp.plant;
        if (hardy_out) *hardy_out = std::move(hp);
        return plant;
    }
    throw ConfigError("plant.type must be one of scalar | matrices | hardy");
}

json checklist_to_json(const std::map<std::string, bool>& checklist) {
    json j = json::object();
    for (const auto& [k, v] : checklist) j[k] = v;
    return j;
}

json report_header(const RunConfig& rc, const std::string& command) {
    json j;
    j["tool"] = {{"name", "hsricc"}, {"version", kVersion}};
    j["command"] = command;
    j["config_hash"] = rc.config_hash;
    j["seed"] = rc.seed;
    return j;
}

std::string csv_header_comment(const RunConfig& rc, const std::map<std::string, bool>* checklist) {
    std::string line = "# hsricc " + std::string(kVersion) + " config_hash=" + rc.config_hash +
                       " seed=" + std::to_string(rc.seed);
    if (checklist) {
        line += " bounds=";
        bool first = true;
        for (const auto& [k, v] : *checklist) {
            if (!first) line += ",";
            line += k + (v ? ":pass" : ":FAIL");
            first = false;
        }
    }
    return line + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << content;
}

void write_history_csv(const RunConfig& rc, const SolutionReport& report, const fs::path& path) {
    std::string csv = csv_header_comment(rc, &report.bounds_checklist);
    csv += "stage,kind,value,iterations,observed_contraction,theoretical_contraction,"
           "stage_gap,residual,p_norm_hh\n";
    const char* kind = report.route == "noncoercive" ? "omega" : "lambda";
    for (size_t i = 0; i < report.history.size(); ++i) {
        const StageRecord& r = report.history[i];
        csv += std::to_string(i) + "," + kind + "," + fmt17(r.stage_value) + "," +
               std::to_string(r.iterations) + "," + fmt17(r.observed_contraction) + "," +
               fmt17(r.theoretical_contraction) + "," + fmt17(r.stage_gap) + "," +
               fmt17(r.residual) + "," + fmt17(r.p_norm_hh) + "\n";
    }
    write_file(path, csv);
}

json solution_to_json(const SolutionReport& report, bool include_matrix = true) {
    json j;
    j["route"] = report.route;
    j["converged"] = report.converged;
    j["residual_hs"] = report.residual_hs;
    j["min_eig"] = report.min_eig;
    j["stages"] = report.history.size();
    j["extrapolation_order"] = report.extrapolation_order;
    j["bounds_checklist"] = checklist_to_json(report.bounds_checklist);
    if (include_matrix) j["p_mat"] = matrix_to_json(report.P.mat());
    return j;
}

bool checklist_all(const std::map<std::string, bool>& checklist) {
    for (const auto& [k, v] : checklist)
        if (!v) return false;
    return true;
}

json hardy_to_json(const HardyPlant& hp) {
    json j;
    j["space_dim"] = hp.spec.space_dim;
    j["lambda_hardy"] = hp.spec.lambda_hardy;
    j["modes"] = hp.spec.modes;
    j["hardy_constant"] = hardy_constant(hp.spec.space_dim);
    j["omega"] = hp.omega;
    j["coercivity_margin"] = hp.coercivity_margin;
    j["c1_weyl"] = hp.c1_weyl;
    j["domain_measure"] = hp.domain_measure;
    j["reduction"] = "radially symmetric subspace of the unit ball";
    const Lemma51Record lem = lemma51_condition(hp);
    j["lemma51"] = {{"zeta_lower", lem.zeta.lower},
                    {"zeta_upper", lem.zeta.upper},
                    {"rhs", lem.rhs},
                    {"condition_holds", lem.condition_holds},
                    {"condition_fails", lem.condition_fails},
                    {"gamma_min_eig", lem.gamma_min_eig},
                    {"gamma_psd_direct", lem.gamma_psd},
                    {"consistent", lem.consistent}};
    const HsMembershipReport mem = hs_membership_report(hp);
    j["hs_membership"] = {{"mode_counts", mem.mode_counts},
                          {"b1b1_hs", mem.b1b1_hs},
                          {"c1c1_hs", mem.c1c1_hs},
                          {"b2b2_hs", mem.b2b2_hs},
                          {"gamma_hs", mem.gamma_hs},
                          {"b2b2_parseval_dev", mem.b2b2_parseval_dev},
                          {"b1_trace_sum", mem.b1_trace_sum},
                          {"weyl_trace_cap", mem.weyl_trace_cap},
                          {"trace_bounded", mem.trace_bounded},
                          {"gamma_growth_last", mem.gamma_growth_last}};
    return j;
}

SimOptions parse_sim_options(const json& doc) {
    SimOptions opt;
    if (!doc.contains("simulation")) return opt;
    const json& s = doc.at("simulation");
    opt.horizon = s.value("horizon", 0.0);
    opt.dt = s.value("dt", 0.0);
    opt.energy_start = s.value("energy_start", 0.0);
    return opt;
}

void write_gain_csv(const RunConfig& rc, const GainReport& gain, const fs::path& path) {
    std::string csv = csv_header_comment(rc, nullptr);
    csv += "label,ratio,energy_w,energy_out\n";
    for (const GainRow& row : gain.rows)
        csv += "\"" + row.label + "\"," + fmt17(row.ratio) + "," + fmt17(row.energy_w) + "," +
               fmt17(row.energy_out) + "\n";
    write_file(path, csv);
}

void write_trajectory_csv(const RunConfig& rc, const TrajectoryRecord& rec,
                          const fs::path& path) {
    std::string csv = csv_header_comment(rc, nullptr);
    csv += "t,y_norm,z_norm,u_norm,running_ratio\n";
    for (size_t i = 0; i < rec.times.size(); ++i)
        csv += fmt17(rec.times[i]) + "," + fmt17(rec.y_norm[i]) + "," + fmt17(rec.z_norm[i]) +
               "," + fmt17(rec.u_norm[i]) + "," + fmt17(rec.running_ratio[i]) + "\n";
    write_file(path, csv);
}

int cmd_solve(const RunConfig& rc, std::optional<int> modes_override) {
    const SolverConfig cfg = parse_solver_config(rc.doc);
    ProblemSource src = parse_problem(rc.doc, modes_override);
    json out = report_header(rc, "solve");
    if (src.hardy) out["hardy"] = hardy_to_json(*src.hardy);
    try {
        const bool coercive_ok =
            src.prob.L.omega > 0.0 &&
            min_sym_eig(HsOperator(src.prob.F.triplet_ptr(), src.prob.Q.gamma_mat)) >=
                -kPsdTol * (1.0 + src.prob.Q.gamma_mat.norm());
        const SolutionReport report =
            coercive_ok ? solve_coercive(src.prob, cfg) : solve_noncoercive(src.prob, cfg);
        out["solution"] = solution_to_json(report);
        write_history_csv(rc, report, rc.out_dir / "history.csv");
        const bool ok = report.converged && report.residual_hs <= cfg.residual_tol &&
                        checklist_all(report.bounds_checklist);
        out["exit_code"] = ok ? kOk : kSolverFailure;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        return ok ? kOk : kSolverFailure;
    } catch (const Error& e) {
        out["error"] = e.what();
        out["exit_code"] = kSolverFailure;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        std::cerr << json{{"error", e.what()}, {"code", kSolverFailure}}.dump() << "\n";
        return kSolverFailure;
    }
}

int run_synthesis(const RunConfig& rc, std::optional<int> modes_override, bool with_gain,
                  const std::string& command) {
    const SolverConfig cfg = parse_solver_config(rc.doc);
    std::optional<HardyPlant> hardy;
    const ControlPlant plant = parse_plant(rc.doc, modes_override, &hardy);
    json out = report_header(rc, command);
    if (hardy) out["hardy"] = hardy_to_json(*hardy);
    try {
        const SynthesisResult syn = synthesize(plant, cfg);
        out["solution"] = solution_to_json(syn.report, plant.dim() <= 64);
        out["closed_loop"] = {{"spectral_abscissa", syn.loop.spectral_abscissa},
                              {"feedback_mat", matrix_to_json(syn.loop.feedback_mat)}};
        write_history_csv(rc, syn.report, rc.out_dir / "history.csv");
        int code = kOk;
        if (with_gain) {
            const json& sim = rc.doc.contains("simulation") ? rc.doc.at("simulation")
                                                            : json::object();
            const int count = sim.value("disturbances", 50);
            const SimOptions opt = parse_sim_options(rc.doc);
            const auto family = standard_disturbance_family(plant, syn.loop, count, rc.seed);
            const GainReport gain = verify_gain(syn.loop, plant, family, opt);
            out["gain"] = {{"max_ratio", gain.max_ratio},
                           {"pass", gain.pass},
                           {"worst", gain.worst_label},
                           {"disturbances", gain.rows.size()}};
            write_gain_csv(rc, gain, rc.out_dir / "gain.csv");
            if (!gain.rows.empty()) {
                // trajectory of the worst disturbance, for inspection
                for (const Disturbance& d : family) {
                    if (d.label == gain.worst_label) {
                        write_trajectory_csv(rc, simulate_closed_loop(syn.loop, plant, d, opt),
                                             rc.out_dir / "trajectory.csv");
                        break;
                    }
                }
            }
            if (!gain.pass) code = kVerificationFail;
        }
        out["exit_code"] = code;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        return code;
    } catch (const UnstableLoopError& e) {
        json spectrum = json::array();
        for (size_t i = 0; i < e.spectrum_re.size(); ++i)
            spectrum.push_back({{"re", e.spectrum_re[i]}, {"im", e.spectrum_im[i]}});
        out["error"] = e.what();
        out["spectrum"] = spectrum;
        out["exit_code"] = kUnstableLoop;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        std::cerr << json{{"error", e.what()}, {"code", kUnstableLoop}}.dump() << "\n";
        return kUnstableLoop;
    } catch (const Error& e) {
        out["error"] = e.what();
        out["exit_code"] = kSolverFailure;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        std::cerr << json{{"error", e.what()}, {"code", kSolverFailure}}.dump() << "\n";
        return kSolverFailure;
    }
}

int cmd_hardy_demo(const RunConfig& rc, std::optional<int> modes_override) {
    // built-in demo spec, overridable through config
    json doc = rc.doc;
    if (!doc.contains("problem")) {
        doc["problem"] = {{"type", "hardy"},
                          {"space_dim", 3},
                          {"lambda_hardy", 0.1},
                          {"modes", 32},
                          {"gamma_perf", 1e6},
                          {"b_profile", {{"decay", 2.0}, {"scale", 1.0}}}};
    }
    const SolverConfig cfg = parse_solver_config(doc);
    ProblemSource src = parse_problem(doc, modes_override);
    if (!src.hardy) throw ConfigError("hardy-demo: problem.type must be \"hardy\"");
    const HardyPlant& hp = *src.hardy;
    json out = report_header(rc, "hardy-demo");
    out["hardy"] = hardy_to_json(hp);

    const bool gamma_psd = out["hardy"]["lemma51"]["gamma_psd_direct"].get<bool>();
    try {
        if (gamma_psd) {
            const SolutionReport report = solve_coercive(src.prob, cfg);
            out["solution"] = solution_to_json(report, hp.spec.modes <= 64);
            write_history_csv(rc, report, rc.out_dir / "history.csv");
            const SynthesisResult syn = synthesize(hp.plant, cfg);
            out["closed_loop"] = {{"spectral_abscissa", syn.loop.spectral_abscissa}};
            const auto family =
                standard_disturbance_family(hp.plant, syn.loop, 16, rc.seed);
            const GainReport gain = verify_gain(syn.loop, hp.plant, family, SimOptions{});
            out["gain"] = {{"max_ratio", gain.max_ratio}, {"pass", gain.pass}};
            write_gain_csv(rc, gain, rc.out_dir / "gain.csv");
            const bool ok = report.residual_hs <= cfg.residual_tol && gain.pass;
            out["exit_code"] = ok ? kOk : kVerificationFail;
            write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
            return ok ? kOk : kVerificationFail;
        }
        out["note"] = "Gamma is not PSD at this gamma_perf; solve skipped, diagnostics only";
        out["exit_code"] = kOk;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        return kOk;
    } catch (const Error& e) {
        out["error"] = e.what();
        out["exit_code"] = kSolverFailure;
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        std::cerr << json{{"error", e.what()}, {"code", kSolverFailure}}.dump() << "\n";
        return kSolverFailure;
    }
}

int cmd_study(const RunConfig& rc, std::optional<int> modes_override) {
    const json study = rc.doc.contains("study") ? rc.doc.at("study") : json::object();
    const std::string kind = study.value("kind", "lambda");
    const SolverConfig base = parse_solver_config(rc.doc);
    json out = report_header(rc, "study");
    out["kind"] = kind;

    if (kind == "lambda" || kind == "omega") {
        ProblemSource src = parse_problem(rc.doc, modes_override);
        SolverConfig cfg = base;
        cfg.residual_tol = study.value("residual_tol", base.residual_tol);
        const SolutionReport report = kind == "omega" ? solve_noncoercive(src.prob, cfg)
                                                      : solve_coercive(src.prob, cfg);
        // stage table plus the fitted Cauchy constant of the Step 3 estimate
        double cauchy_fit = 0.0;
        for (size_t i = 1; i < report.history.size(); ++i) {
            const double denom =
                report.history[i].stage_value + report.history[i - 1].stage_value;
            if (std::isfinite(report.history[i].stage_gap) && denom > 0.0)
                cauchy_fit = std::max(cauchy_fit, report.history[i].stage_gap / denom);
        }
        out["fitted_cauchy_constant"] = cauchy_fit;
        out["solution"] = solution_to_json(report, false);
        write_history_csv(rc, report, rc.out_dir / ("study_" + kind + ".csv"));
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        return kOk;
    }
    if (kind == "hardy-sweep") {
        std::vector<double> grid = study.contains("lambda_hardy_grid")
                                       ? std::vector<double>(study.at("lambda_hardy_grid").begin(),
                                                             study.at("lambda_hardy_grid").end())
                                       : std::vector<double>{0.0, 0.05, 0.1, 0.15, 0.2};
        const int modes = modes_override.value_or(study.value("modes", 16));
        std::string csv = csv_header_comment(rc, nullptr);
        csv += "lambda_hardy,omega,coercivity_margin,gamma_min_eig,p_norm_hh,residual\n";
        json rows = json::array();
        for (double lh : grid) {
            HardyPlantSpec spec;
            spec.lambda_hardy = lh;
            spec.modes = modes;
            spec.gamma_perf = study.value("gamma_perf", 1e6);
            const HardyPlant hp = build_hardy_plant(spec);
            const RiccatiProblem prob = build_riccati_problem(hp.plant);
            const Lemma51Record lem = lemma51_condition(hp);
            double p_norm = std::numeric_limits<double>::quiet_NaN();
            double residual = std::numeric_limits<double>::quiet_NaN();
            if (lem.gamma_psd) {
                const SolutionReport rep = solve_coercive(prob, base);
                p_norm = hs_norm(rep.P, HsNormKind::HH);
                residual = rep.residual_hs;
            }
            csv += fmt17(lh) + "," + fmt17(hp.omega) + "," + fmt17(hp.coercivity_margin) + "," +
                   fmt17(lem.gamma_min_eig) + "," + fmt17(p_norm) + "," + fmt17(residual) + "\n";
            rows.push_back({{"lambda_hardy", lh},
                            {"omega", hp.omega},
                            {"p_norm_hh", p_norm},
                            {"residual", residual}});
        }
        out["rows"] = rows;
        write_file(rc.out_dir / "study_hardy_sweep.csv", csv);
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        return kOk;
    }
    if (kind == "modes") {
        std::vector<int> grid = study.contains("modes_grid")
                                    ? std::vector<int>(study.at("modes_grid").begin(),
                                                       study.at("modes_grid").end())
                                    : std::vector<int>{8, 16, 32, 64};
        const double lh = study.value("lambda_hardy", 0.1);
        std::string csv = csv_header_comment(rc, nullptr);
        csv += "modes,p_norm_hh,residual,block_gap_vs_previous\n";
        json rows = json::array();
        Eigen::MatrixXd prev;
        for (int m : grid) {
            HardyPlantSpec spec;
            spec.lambda_hardy = lh;
            spec.modes = m;
            spec.gamma_perf = study.value("gamma_perf", 1e6);
            const HardyPlant hp = build_hardy_plant(spec);
            const RiccatiProblem prob = build_riccati_problem(hp.plant);
            const SolutionReport rep = solve_coercive(prob, base);
            double gap = std::numeric_limits<double>::quiet_NaN();
            if (prev.size() > 0)
                gap = (rep.P.mat().topLeftCorner(prev.rows(), prev.cols()) - prev).norm();
            csv += std::to_string(m) + "," + fmt17(hs_norm(rep.P, HsNormKind::HH)) + "," +
                   fmt17(rep.residual_hs) + "," + fmt17(gap) + "\n";
            rows.push_back({{"modes", m}, {"residual", rep.residual_hs}, {"gap", gap}});
            prev = rep.P.mat();
        }
        out["rows"] = rows;
        write_file(rc.out_dir / "study_modes.csv", csv);
        write_file(rc.out_dir / "report.json", out.dump(2) + "\n");
        return kOk;
    }
    throw ConfigError("study.kind must be one of lambda | omega | hardy-sweep | modes");
}

}  // namespace

int run(const std::vector<std::string>& argv) {
    CLI::App app{"operator Riccati solver and H-infinity synthesis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int modes = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* copt = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (config_required) copt->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for randomized suites")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--modes", modes, "override truncation dimension");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve a Riccati problem");
    add_common(solve, true);
    CLI::App* synth = app.add_subcommand("synthesize", "synthesize the state feedback");
    add_common(synth, true);
    CLI::App* verify =
        app.add_subcommand("verify", "synthesize, simulate and verify the gain bound");
    add_common(verify, true);
    CLI::App* demo = app.add_subcommand("hardy-demo", "singular-potential heat equation demo");
    add_common(demo, false);
    CLI::App* study = app.add_subcommand("study", "convergence studies");
    add_common(study, true);

    std::vector<std::string> args_reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(args_reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << nlohmann::json{{"error", e.what()}, {"code", kConfigError}}.dump() << "\n";
        return kConfigError;
    }

    try {
        RunConfig rc;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file " + config_path);
            try {
                rc.doc = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        } else {
            rc.doc = json::object();
        }
        rc.seed = seed_set ? seed : rc.doc.value("seed", 0ULL);
        std::string dir = rc.doc.value("output_dir", out_dir);
        if (out_dir != "out") dir = out_dir;  // explicit flag wins
        rc.out_dir = dir;
        std::error_code ec;
        fs::create_directories(rc.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + rc.out_dir.string());
        json hashed = rc.doc;
        hashed["seed"] = rc.seed;
        rc.config_hash = hex64(fnv1a(hashed.dump()));

        const std::optional<int> modes_override =
            modes > 0 ? std::optional<int>(modes) : std::nullopt;
        if (*solve) return cmd_solve(rc, modes_override);
        if (*synth) return run_synthesis(rc, modes_override, false, "synthesize");
        if (*verify) return run_synthesis(rc, modes_override, true, "verify");
        if (*demo) return cmd_hardy_demo(rc, modes_override);
        if (*study) return cmd_study(rc, modes_override);
        return kConfigError;
    } catch (const ConfigError& e) {
        std::cerr << nlohmann::json{{"error", e.what()}, {"code", kConfigError}}.dump() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << nlohmann::json{{"error", e.what()}, {"code", kSolverFailure}}.dump() << "\n";
        return kSolverFailure;
    }
}

}  // namespace hsricc::cli
