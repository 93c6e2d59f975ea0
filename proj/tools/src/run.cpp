#include "shearmix_cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shearmix/chains.hpp"
#include "shearmix/ergodicity.hpp"
#include "shearmix/errors.hpp"
#include "shearmix/flow.hpp"
#include "shearmix/lie.hpp"
#include "shearmix/lyapunov.hpp"
#include "shearmix/mixing.hpp"
#include "shearmix/observable.hpp"
#include "shearmix/rng.hpp"
#include "shearmix/steering.hpp"

namespace shearmix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Non-finite numbers become null so the JSON stays valid.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    // Preamble: the hash line, then the full config as "# key=value" lines.
    CsvWriter(const fs::path& path, const std::string& hash, const KeyValues& config,
              const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << "# config_hash=" << hash << "\n";
        for (const auto& [k, v] : config) out_ << "# " << k << "=" << v << "\n";
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

struct Output {
    const RunConfig& cfg;
    std::string hash;
    fs::path dir;

    fs::path path(const char* ext) const { return dir / (cfg.subcommand + ext); }
    CsvWriter csv(const std::vector<std::string>& header) const { return {path(".csv"), hash, to_kv(cfg), header}; }
    void write_json(json results) const {
        json doc;
        doc["config"] = to_kv(cfg);
        doc["config_hash"] = hash;
        doc["results"] = std::move(results);
        std::ofstream out(path(".json"));
        if (!out) throw std::runtime_error("cannot open " + path(".json").string());
        out << doc.dump(2) << "\n";
    }
};

TorusPoint random_point(std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed, tags::initial, stream);
    const double q = rng.uniform(0.0, kTwoPi);
    return {q, rng.uniform(0.0, kTwoPi)};
}

json point_json(TorusPoint x) { return json::array({x.q, x.p}); }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

json certificate_json(const RankCertificate& c) {
    json j;
    j["family"] = to_string(c.family);
    j["point"] = vector_json(c.point);
    j["columns"] = c.columns;
    j["singular_values"] = vector_json(c.singular_values);
    j["rank"] = c.rank;
    j["target"] = c.target;
    j["det"] = c.det ? num(*c.det) : json(nullptr);
    j["pass"] = c.pass;
    return j;
}

int run_simulate(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    auto csv = o.csv({"sample", "step", "q", "p"});
    json finals = json::array();
    for (std::uint64_t s = 0; s < *c.samples; ++s) {
        const Schedule sched = sample_schedule(c.seed, *c.m, c.T, s);
        TorusPoint x = random_point(c.seed, s);
        csv.row({std::to_string(s), "0", cell(x.q), cell(x.p)});
        for (std::size_t i = 0; i < sched.steps(); ++i) {
            x = step_point(x, sched.horizontal(i), sched.vertical(i), model);
            csv.row({std::to_string(s), std::to_string(i + 1), cell(x.q), cell(x.p)});
        }
        finals.push_back(point_json(x));
    }
    o.write_json({{"model", model.name}, {"steps", *c.m}, {"samples", *c.samples}, {"final_points", finals}});
    return kOk;
}

int run_lyapunov(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    const std::vector<double> grid = c.T_grid.empty() ? std::vector<double>{c.T} : c.T_grid;
    auto csv = o.csv({"T", "m", "n_samples", "lambda1", "stderr", "ci_lo", "ci_hi", "seed"});
    json rows = json::array();
    bool positive = true;
    for (double T : grid) {
        const auto e = estimate_lambda1(model, T, *c.m, *c.samples, c.seed, {c.horizontal_only});
        csv.row({cell(T), std::to_string(e.m), std::to_string(e.n_samples), cell(e.lambda1), cell(e.stderr_),
                 cell(e.ci_lo), cell(e.ci_hi), std::to_string(e.seed)});
        const double lsum = estimate_lambda_sum(model, T, *c.m, *c.samples, c.seed);
        rows.push_back({{"T", T},
                        {"lambda1", num(e.lambda1)},
                        {"lambda1_per_time", num(e.lambda1_per_time())},
                        {"stderr", num(e.stderr_)},
                        {"ci", {num(e.ci_lo), num(e.ci_hi)}},
                        {"lambda_sum", num(lsum)}});
        if (T > 0.0 && !(e.ci_lo > 0.0)) positive = false;
    }
    o.write_json({{"model", model.name},
                  {"horizontal_only", c.horizontal_only},
                  {"estimates", rows},
                  {"positive_exponent_established", positive}});
    return positive ? kOk : kNonFinding;
}

int run_hypotheses(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    json res;
    res["model"] = model.name;
    const auto h1_f1 = check_h1(model.f1);
    const auto h1_f2 = check_h1(model.f2);
    res["H1"] = {{"f1", {{"pass", h1_f1.pass}, {"min_gap", num(h1_f1.min_gap)}}},
                 {"f2", {{"pass", h1_f2.pass}, {"min_gap", num(h1_f2.min_gap)}}}};

    auto csv = o.csv({"hypothesis", "family", "status", "rank", "target", "points_tried"});
    const std::pair<const char*, FieldFamily> checks[] = {{"base", FieldFamily::base},
                                                          {"H2", FieldFamily::lifted},
                                                          {"H2", FieldFamily::projective},
                                                          {"H3", FieldFamily::two_point}};
    json hyps = json::array();
    bool all = true;
    for (const auto& [label, fam] : checks) {
        const auto r = check_hypothesis(fam, model, *c.samples, c.seed);
        json j{{"hypothesis", label},
               {"family", to_string(fam)},
               {"status", to_string(r.status)},
               {"points_tried", r.points_tried},
               {"reason", r.reason}};
        j["witness"] = r.witness ? certificate_json(*r.witness) : json(nullptr);
        hyps.push_back(j);
        csv.row({label, to_string(fam), to_string(r.status), r.witness ? std::to_string(r.witness->rank) : "",
                 std::to_string(target_rank(fam)), std::to_string(r.points_tried)});
        if (r.status == HypothesisStatus::not_established) all = false;
    }
    res["hypotheses"] = hyps;

    json refs = json::array();
    for (const auto& rc : reference_cases()) {
        std::vector<BracketWord> cols;
        for (const auto& s : rc.columns) cols.push_back(BracketWord::parse(s));
        auto cert = certificate_json(rank_certificate(rc.family, rc.model, rc.point, cols));
        cert["name"] = rc.name;
        refs.push_back(cert);
    }
    res["reference_determinants"] = refs;

    const InvariantSet delta = build_invariant_set(model);
    json comps = json::array();
    for (const auto& comp : delta.components) comps.push_back(comp.describe());
    res["invariant_set"] = comps;
    const auto probe = probe_recurrence(model, delta, 256, 200, c.T, c.seed);
    res["recurrence_probe"] = {{"pairs", probe.pairs},
                               {"unexplained", probe.unexplained},
                               {"min_distance", num(probe.min_distance)}};
    o.write_json(res);
    return all ? kOk : kNonFinding;
}

int run_drift(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    DriftSpec spec = default_drift_spec(model);
    spec.beta = c.beta;
    spec.T = c.T;
    spec.eps0 = c.eps0;
    json res;
    res["model"] = model.name;
    res["beta"] = spec.beta;
    res["K"] = spec.K;
    res["T"] = spec.T;
    std::optional<double> t_star;
    if (spec.beta < 0.25) t_star = find_min_T(spec.K, spec.beta);
    res["T_star"] = t_star ? num(*t_star) : json(nullptr);
    if (spec.T > 0.0) {
        res["bounds"] = {{"case1", num(drift_bound(1, spec.K, spec.beta, spec.T))},
                         {"case2", num(drift_bound(2, spec.K, spec.beta, spec.T))}};
    } else {
        res["bounds"] = nullptr;
    }

    auto csv = o.csv({"q", "p", "radius", "angle", "ratio", "stderr", "upper95", "clipped"});
    const auto survey = drift_survey(model, spec, *c.samples, c.seed);
    double alpha = 0.0, worst_upper = 0.0;
    for (const auto& row : survey) {
        const double upper = row.ratio.ratio + 1.96 * row.ratio.stderr_;
        alpha = std::max(alpha, row.ratio.ratio);
        worst_upper = std::max(worst_upper, upper);
        csv.row({cell(row.point.x.q), cell(row.point.x.p), cell(row.point.radius), cell(row.point.angle),
                 cell(row.ratio.ratio), cell(row.ratio.stderr_), cell(upper), std::to_string(row.ratio.clipped)});
    }
    res["empirical_alpha"] = num(alpha);
    res["empirical_alpha_upper95"] = num(worst_upper);
    res["points"] = survey.size();

    // Two-point drift at a pair 0.1 off the diagonal, away from F.
    TwoPointDriftSpec spec2;
    spec2.s_star = c.s_star;
    spec2.a = c.a;
    spec2.c0 = c.c0;
    spec2.eps = c.eps0;
    const TorusPoint x{1.0, 2.0};
    const double off = 0.1 / std::sqrt(2.0);
    const TwoPointState s{x, wrap({x.q + off, x.p + off})};
    json rows2 = json::array();
    for (const auto& r : empirical_two_point_drift(s, model, spec, spec2, *c.samples, c.seed, c.h))
        rows2.push_back({{"h", r.h}, {"ratio", num(r.ratio)}, {"stderr", num(r.stderr_)}});
    res["two_point"] = {{"x", point_json(s.x)}, {"y", point_json(s.y)}, {"rows", rows2}};
    o.write_json(res);
    return worst_upper < 1.0 ? kOk : kNonFinding;
}

int run_correlations(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    const Observable g = Observable::parse(c.u0);
    const Ball ball{{c.ball_q, c.ball_p}, c.ball_radius};
    const auto series = correlation_series(model, g, ball, *c.samples, *c.m, c.T, c.seed);
    auto csv = o.csv({"m", "c_m", "stderr"});
    for (std::size_t m = 0; m < series.c.size(); ++m)
        csv.row({std::to_string(m), cell(series.c[m]), cell(series.stderr_[m])});
    o.write_json({{"model", model.name},
                  {"observable", g.describe()},
                  {"ball", {{"center", point_json(ball.center)}, {"radius", ball.radius}}},
                  {"window", series.window},
                  {"fitted", series.fitted},
                  {"lambda_hat", series.fitted ? num(series.lambda_hat) : json(nullptr)},
                  {"r2", series.fitted ? num(series.r2) : json(nullptr)}});
    return series.fitted ? kOk : kNonFinding;
}

int run_steer(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    auto pick = [&](const std::vector<double>& given, std::size_t dim, std::uint64_t stream) {
        if (!given.empty()) return given;
        CounterRng rng(c.seed, tags::initial, stream);
        std::vector<double> v(dim);
        for (auto& e : v) e = rng.uniform(0.0, kTwoPi);
        return v;
    };
    const std::size_t dim = c.chain == "one_point" ? 2 : c.chain == "projective" ? 3 : 4;
    const auto a = pick(c.start, dim, 0);
    const auto b = pick(c.target, dim, 1);
    SteeringPlan plan;
    double tolerance = 1e-8;
    if (c.chain == "one_point") {
        plan = steer_to(wrap({a[0], a[1]}), wrap({b[0], b[1]}), model, c.t_cap);
    } else if (c.chain == "projective") {
        const ProjectiveState s{wrap({a[0], a[1]}), {std::cos(a[2]), std::sin(a[2])}};
        const ProjectiveState t{wrap({b[0], b[1]}), {std::cos(b[2]), std::sin(b[2])}};
        plan = numeric_steer(model, s, t, c.n_steps, c.seed);
        tolerance = NumericSteerOptions{}.success;
    } else {
        const TwoPointState s{wrap({a[0], a[1]}), wrap({a[2], a[3]})};
        const TwoPointState t{wrap({b[0], b[1]}), wrap({b[2], b[3]})};
        plan = numeric_steer(model, s, t, c.n_steps, c.seed);
        tolerance = NumericSteerOptions{}.success;
    }
    auto csv = o.csv({"leg", "direction", "duration"});
    for (std::size_t i = 0; i < plan.legs.durations.size(); ++i)
        csv.row({std::to_string(i), i % 2 == 0 ? "horizontal" : "vertical", cell(plan.legs.durations[i])});
    const bool reached = plan.residual <= tolerance;
    o.write_json({{"model", model.name},
                  {"chain", c.chain},
                  {"start", a},
                  {"target", b},
                  {"method", to_string(plan.method)},
                  {"durations", plan.legs.durations},
                  {"residual", num(plan.residual)},
                  {"tolerance", tolerance},
                  {"reached", reached}});
    return reached ? kOk : kNonFinding;
}

int run_mix(const Output& o, const Model& model) {
    const auto& c = o.cfg;
    const Observable u0 = Observable::parse(c.u0);
    const Schedule sched = sample_schedule(c.seed, *c.m, c.T);
    const std::vector<double> radii = c.radii.empty() ? default_radii(c.grid) : c.radii;
    const auto rep = mix_run(model, u0, sched, *c.m, c.grid, radii, c.threshold);
    auto csv = o.csv({"m", "mix_scale", "grad_norm_l1_cum", "eta_hat_running"});
    for (const auto& r : rep.rows)
        csv.row({std::to_string(r.m), cell(r.mix_scale), cell(r.grad_norm_l1_cum), cell(r.eta_hat_running)});
    o.write_json({{"model", model.name},
                  {"observable", u0.describe()},
                  {"grid", c.grid},
                  {"radii", radii},
                  {"slope", num(rep.slope)},
                  {"intercept", num(rep.intercept)},
                  {"r2", num(rep.r2)},
                  {"eta_hat", num(rep.eta_hat)},
                  {"xi_hat", num(rep.xi_hat)},
                  {"m_star", rep.m_star},
                  {"mixing_observed", rep.mixing_observed},
                  {"sup_initial", num(rep.sup_initial)},
                  {"sup_final", num(rep.sup_final)}});
    return rep.mixing_observed ? kOk : kNonFinding;
}

}  // namespace

int run(const RunConfig& config) {
    const RunConfig c = resolve(config);
    const Model model = make_model(c);
    Output o{c, config_hash(c), fs::path(c.out)};
    fs::create_directories(o.dir);
    const std::string& s = c.subcommand;
    if (s == "simulate") return run_simulate(o, model);
    if (s == "lyapunov") return run_lyapunov(o, model);
    if (s == "hypotheses") return run_hypotheses(o, model);
    if (s == "drift") return run_drift(o, model);
    if (s == "correlations") return run_correlations(o, model);
    if (s == "steer") return run_steer(o, model);
    return run_mix(o, model);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Command-line values are collected as text and merged over the config file,
// so both routes share from_kv's parsing and error messages.
void add_options(CLI::App& app, KeyValues& cli) {
    const std::vector<std::pair<std::string, std::string>> opts{
        {"model", "pierrehumbert, chirikov or custom"},
        {"f1", "custom horizontal profile: identity or cos=a0,a1,..;sin=b1,.."},
        {"f2", "custom vertical profile"},
        {"T", "duration bound"},
        {"seed", "root seed"},
        {"m", "number of steps"},
        {"samples", "samples, pairs or candidate points"},
        {"grid", "mixing grid size"},
        {"beta", "drift exponent"},
        {"h", "two-point drift exponents (comma separated)"},
        {"radii", "ball radii, descending (comma separated)"},
        {"out", "output directory"},
        {"T_grid", "lyapunov T sweep (comma separated)"},
        {"horizontal_only", "lyapunov: zero every vertical duration"},
        {"eps0", "distance to F for the drift survey"},
        {"s_star", "two-point cutoff distance to the invariant set"},
        {"a", "two-point weight"},
        {"c0", "two-point constant"},
        {"u0", "observable: sine:A, checkerboard:A[:cells] or zero"},
        {"threshold", "mixing-scale threshold"},
        {"ball_q", "correlation ball centre q"},
        {"ball_p", "correlation ball centre p"},
        {"ball_radius", "correlation ball radius"},
        {"chain", "steer: one_point, projective or two_point"},
        {"start", "steer start state (comma separated)"},
        {"target", "steer target state (comma separated)"},
        {"n_steps", "numeric steering steps"},
        {"t_cap", "exact steering duration cap"},
    };
    for (const auto& [key, help] : opts) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (key == "horizontal_only") {
            app.add_flag_function(flag, [&cli, key](std::int64_t) { cli[key] = "true"; }, help);
            continue;
        }
        app.add_option_function<std::string>(flag, [&cli, key](const std::string& v) { cli[key] = v; }, help);
    }
}

}  // namespace

int main(const std::vector<std::string>& args) {
    CLI::App app{"Random alternating shears on the torus"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    std::string config_path;
    KeyValues cli;
    std::string chosen;
    const std::map<std::string, std::string> about{
        {"simulate", "sample trajectories of the random shear map"},
        {"lyapunov", "top Lyapunov exponent with a 95% interval"},
        {"hypotheses", "bracket-rank certificates and the invariant set"},
        {"drift", "drift bounds and an empirical drift survey near F"},
        {"correlations", "decay of correlations for a ball of initial pairs"},
        {"steer", "exact or numeric steering between states"},
        {"mix", "mixing scale of an advected scalar"},
    };
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config_path, "key=value configuration file");
        add_options(*sub, cli);
        sub->callback([&chosen, name] { chosen = name; });
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    try {
        KeyValues kv;
        if (!config_path.empty()) kv = parse_kv_text(read_file(config_path));
        for (const auto& [k, v] : cli) kv[k] = v;
        if (const auto it = kv.find("subcommand"); it != kv.end() && it->second != chosen)
            throw ConfigError("subcommand: config file names '" + it->second + "' but '" + chosen + "' was run");
        kv["subcommand"] = chosen;
        const int code = run(from_kv(kv));
        if (code == kNonFinding) std::cerr << "shearmix: statistical target not established (see results)\n";
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "shearmix: configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const PreconditionError& e) {
        std::cerr << "shearmix: configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalIntegrityError& e) {
        std::cerr << "shearmix: numerical integrity failure: " << e.what() << "\n";
        return kIntegrityError;
    } catch (const std::exception& e) {
        std::cerr << "shearmix: " << e.what() << "\n";
        return kRuntimeError;
    }
}

}  // namespace shearmix::cli
