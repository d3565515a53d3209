#include "geobeam/runner.hpp"

#include <cmath>
#include <filesystem>

#include "geobeam/assembler.hpp"
#include "geobeam/errors.hpp"
#include "geobeam/evolution.hpp"
#include "geobeam/floquet.hpp"
#include "geobeam/hierarchy.hpp"
#include "geobeam/io.hpp"

namespace geobeam {

namespace {

const char* const kSubcommands[] = {"floquet", "cascade", "residual-scan", "evolve", "instability"};

// JSON has no NaN or infinity; map them to null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

FloquetFrame frame_for(const RunConfig& c) {
    HillOptions o;
    o.ode_tol = c.numerics.ode_tol;
    o.nodes = c.numerics.hill_nodes;
    return solve_hill(c.model, o);
}

DiophantineCert cert_for(const RunConfig& c, const FloquetFrame& f) {
    return certify_diophantine(f, c.numerics.tau, c.numerics.N, c.numerics.near_floor);
}

json cert_json(const DiophantineCert& d) {
    return {{"verdict", to_string(d.verdict)}, {"ratio", d.ratio},     {"mu_lower", d.mu_lower},
            {"worst_pair", {d.p, d.q}},        {"tau", d.tau},         {"N", d.N},
            {"min_gap", d.min_gap},            {"near_floor", d.near_floor}};
}

ModeProblem problem_for(const RunConfig& c, const FloquetFrame& f, const DiophantineCert& cert, double delta, Policy policy) {
    ModeProblem P;
    P.frame = f;
    P.model = c.model;
    P.k0 = c.mode.k0;
    P.epsilon = c.mode.epsilon;
    P.delta = delta;
    P.order_max = c.mode.p;
    P.J_max = c.numerics.J_max;
    P.L_max = c.numerics.L_max;
    P.divisor_floor = c.numerics.divisor_floor;
    P.tail_tol = c.numerics.tail_tol;
    P.auto_refine = c.numerics.auto_refine;
    P.force = c.numerics.force;
    P.certificate = cert;
    P.policy = policy;
    return P;
}

json cascade_json(const HierarchySolution& s) {
    const CascadeDiagnostics& d = s.diagnostics;
    return {{"E", vec(s.E)},
            {"E_imag", vec(s.E_imag)},
            {"tails", {{"j", vec(d.j_tails)}, {"l", vec(d.l_tails)}}},
            {"smallest_divisor", {{"value", num(d.smallest_divisor)}, {"j", d.smallest_j}, {"l", d.smallest_l}}},
            {"divisor_floor", d.divisor_floor},
            {"pde_residuals", vec(d.pde_residuals)},
            {"J_used", d.J_used},
            {"grid", {{"ns", d.grid.ns}, {"nx", d.grid.x.n}, {"x_extent", d.grid.x.X}}}};
}

json floquet_json(const FloquetFrame& f, const DiophantineCert& cert, const RunConfig& c) {
    return {{"lambda", f.lambda},
            {"trace", f.monodromy.trace()},
            {"stability", to_string(f.stability)},
            {"mu_lower", cert.mu_lower},
            {"worst_pair", {cert.p, cert.q}},
            {"wronskian_defect", f.wronskian_defect},
            {"monodromy", {f.monodromy.m[0], f.monodromy.m[1], f.monodromy.m[2], f.monodromy.m[3]}},
            {"alpha_mismatch", f.alpha_mismatch},
            {"theta_mismatch", f.theta_mismatch},
            {"E0_k0", mode_energy(f, c.model, c.mode.k0)},
            {"certificate", cert_json(cert)}};
}

Quasimode quasimode_for(const RunConfig& c, const FloquetFrame& f, const DiophantineCert& cert, const MetricStrip& metric,
                        double kappa, Policy policy, json& cascade_out) {
    const double h = c.mode.h;
    const double delta = kappa * std::pow(h, c.mode.sigma);
    const HierarchySolution s = solve_cascade(problem_for(c, f, cert, delta, policy));
    cascade_out = cascade_json(s);
    return assemble(s, f, c.model, h, kappa, c.mode.sigma, metric, policy);
}

json quasimode_json(const Quasimode& q) {
    return {{"h", q.h},           {"kappa", q.kappa},       {"delta", q.delta}, {"lambda_p", q.lambda_p},
            {"l2_norm", q.l2_norm}, {"E", vec(q.E)},       {"carrier", q.grid.carrier},
            {"cutoff", {q.cutoff_inner, q.cutoff_outer}}, {"model_hash", hex64(q.model_hash)}};
}

EvolutionConfig evolution_for(const RunConfig& c, double t_end, Policy policy) {
    EvolutionConfig e;
    e.t_end = t_end;
    e.dt = c.numerics.dt;
    e.safety = c.numerics.safety;
    e.samples = c.numerics.samples;
    e.sigma_track = c.mode.sigma;
    e.edge_tol = c.numerics.edge_tol;
    e.track_energy = true;
    e.policy = policy;
    return e;
}

json gronwall_json(const GronwallDiagnostic& g) {
    return {{"alpha", g.alpha},           {"c_forcing", g.c_forcing},
            {"c_linear", g.c_linear},     {"c_cubic", g.c_cubic},
            {"linear_coefficient", g.linear_coefficient},
            {"crossover", g.crossover},   {"crossover_t", num(g.crossover_t)},
            {"window_end", g.window_end}};
}

double max_ratio(const std::vector<double>& v, double ref) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x / ref);
    return m;
}

std::string field_dump(const StripGrid& g, const std::vector<cplx>& U) {
    return encode_binary({static_cast<std::uint32_t>(g.ns), static_cast<std::uint32_t>(g.nr)}, U);
}

RunArtifacts run_floquet(const RunConfig& c) {
    const FloquetFrame f = frame_for(c);
    RunArtifacts a;
    a.report = floquet_json(f, cert_for(c, f), c);
    CsvTable t{{"s", "alpha", "alpha_dot", "theta", "beta"}, {}};
    for (int k = 0; k < f.nodes; ++k) {
        const double s = f.node(k);
        t.rows.push_back({s, f.alpha[k], f.alpha_dot[k], f.theta[k], f.beta_at(s)});
    }
    a.csv = t.str();
    return a;
}

RunArtifacts run_cascade(const RunConfig& c, Policy policy) {
    const FloquetFrame f = frame_for(c);
    const DiophantineCert cert = cert_for(c, f);
    const double delta = c.mode.kappa * std::pow(c.mode.h, c.mode.sigma);
    const HierarchySolution s = solve_cascade(problem_for(c, f, cert, delta, policy));
    RunArtifacts a;
    a.report = cascade_json(s);
    a.report["delta"] = delta;
    a.report["lambda"] = f.lambda;
    a.report["certificate"] = cert_json(cert);

    CsvTable t{{"p", "j", "frequency", "re", "im"}, {}};
    const int J = s.v.empty() ? 0 : s.v.front().J;
    const int ns = s.v.empty() ? 0 : s.v.front().ns;
    std::vector<cplx> dump;
    for (int p = 0; p < static_cast<int>(s.v.size()); ++p) {
        const ModeExpansion& v = s.v[p];
        for (int j = 0; j <= J; ++j)
            for (int i = 0; i < ns; ++i) {
                const int b = (i - ns / 2 + ns) % ns;  // ascending frequency
                const cplx d = j <= v.J && v.ns == ns ? v.d[static_cast<std::size_t>(j) * ns + b] : cplx{};
                dump.push_back(d);
                if (d != cplx{}) t.rows.push_back({double(p), double(j), v.frequency(b), d.real(), d.imag()});
            }
    }
    a.csv = t.str();
    a.binary = encode_binary({static_cast<std::uint32_t>(s.v.size()), static_cast<std::uint32_t>(J + 1),
                              static_cast<std::uint32_t>(ns)},
                             dump);
    return a;
}

RunArtifacts run_scan(const RunConfig& c, Policy policy) {
    const FloquetFrame f = frame_for(c);
    const DiophantineCert cert = cert_for(c, f);
    ScanOptions o;
    o.h_list = c.experiment.h_list;
    o.kappa = c.mode.kappa;
    o.sigma = c.mode.sigma;
    o.ns = c.numerics.ns;
    o.nr = c.numerics.nr;
    o.policy = policy;
    const ResidualReport r = residual_scan(problem_for(c, f, cert, c.mode.kappa, policy), o);
    auto slope = [](const SlopeFit& s) {
        return json{{"slope", s.slope}, {"intercept", s.intercept}, {"stderr", s.stderr_slope}, {"ci", {s.ci_low, s.ci_high}}};
    };
    auto fit = [](const EigenvalueFit& f) {
        return json{{"a", f.a}, {"b", f.b}, {"c", f.c}, {"E0", f.E0}, {"E1", f.E1}};
    };
    RunArtifacts a;
    a.report = {{"slopes", {{"L2", slope(r.L2)}, {"H1", slope(r.H1)}, {"H2", slope(r.H2)}}},
                {"norm_ratio", {r.norm_ratio_min, r.norm_ratio_max}},
                {"eigenvalue_fit", fit(r.eigen)},
                {"rayleigh_fit", fit(r.rayleigh)},
                {"metric_a_range", {r.metric_a_min, r.metric_a_max}},
                {"lambda", f.lambda},
                {"certificate", cert_json(cert)}};
    CsvTable t{{"h", "L2res", "H1res", "H2res", "L2norm", "lambda_p", "rayleigh"}, {}};
    for (const ResidualRow& row : r.rows)
        t.rows.push_back({row.h, row.L2, row.H1, row.H2, row.norm, row.lambda_p, row.rayleigh});
    a.csv = t.str();
    return a;
}

RunArtifacts run_evolve(const RunConfig& c, Policy policy) {
    const FloquetFrame f = frame_for(c);
    const DiophantineCert cert = cert_for(c, f);
    const MetricStrip metric = synthesize_metric(c.model, default_strip_grid(c.model, c.numerics.ns, c.numerics.nr));
    json casc;
    const Quasimode q = quasimode_for(c, f, cert, metric, c.mode.kappa, policy, casc);
    const double T = c.experiment.t_end > 0.0 ? c.experiment.t_end : approximation_window(c.mode.h, c.mode.sigma);
    const EvolutionResult r = evolve_nls(q, metric, evolution_for(c, T, policy));
    const GronwallDiagnostic g = gronwall_tracker(r, q);
    RunArtifacts a;
    a.report = {{"t_end", T},
                {"dt", r.dt},
                {"steps", r.steps},
                {"lambda_ref", r.lambda_ref},
                {"max_relative_deviation", max_ratio(r.dev_L2, r.ref_L2)},
                {"final_relative_deviation", r.dev_L2.back() / r.ref_L2},
                {"mass_drift", r.mass_drift},
                {"window_end", g.window_end},
                {"gronwall", gronwall_json(g)},
                {"quasimode", quasimode_json(q)},
                {"cascade", casc}};
    CsvTable t{{"t", "mass", "dev_L2", "dev_Hsigma", "energy", "edge_mass"}, {}};
    for (std::size_t k = 0; k < r.t.size(); ++k)
        t.rows.push_back({r.t[k], r.mass[k], r.dev_L2[k], r.dev_Hsigma[k], r.energy[k], r.edge_mass[k]});
    a.csv = t.str();
    a.binary = field_dump(q.grid, r.final_U);
    return a;
}

RunArtifacts run_instability(const RunConfig& c, Policy policy) {
    const FloquetFrame f = frame_for(c);
    const DiophantineCert cert = cert_for(c, f);
    const MetricStrip metric = synthesize_metric(c.model, default_strip_grid(c.model, c.numerics.ns, c.numerics.nr));
    json c1, c2;
    const Quasimode q1 = quasimode_for(c, f, cert, metric, c.mode.kappa, policy, c1);
    const Quasimode q2 = quasimode_for(c, f, cert, metric, c.experiment.kappa_prime, policy, c2);
    const double dl = std::abs(q2.lambda_p - q1.lambda_p);
    if (c.experiment.t_end <= 0.0 && !(dl > 0.0))
        throw ConfigInvalid("/experiment/kappa_prime", "both runs share lambda_p; set experiment.t_end");
    const double T = c.experiment.t_end > 0.0 ? c.experiment.t_end : 1.3 * kPi / dl;
    const InstabilityResult r = instability_pair(q1, q2, metric, evolution_for(c, T, policy));
    const GronwallDiagnostic g = gronwall_tracker(r.run1, q1);
    RunArtifacts a;
    a.report = {{"first_extremum_t", r.extremum_found ? json(r.first_extremum_t) : json(nullptr)},
                {"ratio", r.extremum_found ? json(r.ratio) : json(nullptr)},
                {"window_end", g.window_end},
                {"t_end", T},
                {"delta_lambda", r.delta_lambda},
                {"profile_norm", r.profile_norm},
                {"initial_separation", r.initial_separation},
                {"final_separation", r.final_separation},
                {"triangle_margin", r.triangle_margin},
                {"mass_drift", {r.run1.mass_drift, r.run2.mass_drift}},
                {"dt", r.run1.dt},
                {"quasimodes", {quasimode_json(q1), quasimode_json(q2)}},
                {"cascades", {c1, c2}}};
    CsvTable t{{"t", "mass", "dev_L2", "dev_Hsigma", "sep_Hsigma", "predicted_sep"}, {}};
    for (std::size_t k = 0; k < r.t.size(); ++k)
        t.rows.push_back({r.t[k], r.run1.mass[k], r.run1.dev_L2[k], r.run1.dev_Hsigma[k], r.separation[k], r.predicted[k]});
    a.csv = t.str();
    std::vector<cplx> both = r.run1.final_U;
    both.insert(both.end(), r.run2.final_U.begin(), r.run2.final_U.end());
    a.binary = encode_binary({2u, static_cast<std::uint32_t>(q1.grid.ns), static_cast<std::uint32_t>(q1.grid.nr)}, both);
    return a;
}

json header(const std::string& name, const RunConfig* cfg) {
    json j;
    j["tool"] = "geobeam";
    j["version"] = kVersion;
    j["subcommand"] = name;
    j["config_hash"] = cfg ? json(cfg->hash()) : json(nullptr);
    return j;
}

}  // namespace

bool known_subcommand(const std::string& name) {
    for (const char* s : kSubcommands)
        if (name == s) return true;
    return false;
}

RunArtifacts run_subcommand(const std::string& name, const RunConfig& cfg, Policy policy) {
    RunArtifacts a;
    if (name == "floquet") a = run_floquet(cfg);
    else if (name == "cascade") a = run_cascade(cfg, policy);
    else if (name == "residual-scan") a = run_scan(cfg, policy);
    else if (name == "evolve") a = run_evolve(cfg, policy);
    else if (name == "instability") a = run_instability(cfg, policy);
    else throw ConfigInvalid("/", "unknown subcommand " + name);
    json report = header(name, &cfg);
    report["status"] = "ok";
    report["model_hash"] = hex64(model_hash(cfg.model));
    report["result"] = std::move(a.report);
    report["config"] = cfg.echo();
    a.report = std::move(report);
    return a;
}

json error_report(const std::string& name, const RunConfig* cfg, const std::exception& e, int code) {
    json report = header(name, cfg);
    report["status"] = "error";
    json err = {{"message", e.what()}, {"exit_code", code}};
    if (const auto* ge = dynamic_cast<const Error*>(&e)) err["kind"] = kind_name(ge->kind());
    else err["kind"] = "Internal";
    if (const auto* sd = dynamic_cast<const SmallDivisorBreach*>(&e))
        err["resonance"] = {{"j", sd->j}, {"l", sd->l}, {"divisor", sd->divisor}, {"coefficient", sd->coefficient}};
    if (const auto* ci = dynamic_cast<const ConfigInvalid*>(&e)) err["pointer"] = ci->pointer;
    report["error"] = err;
    if (cfg) report["config"] = cfg->echo();
    return report;
}

void write_artifacts(const std::string& name, const RunConfig& cfg, const RunArtifacts& art) {
    const std::filesystem::path dir(cfg.output.dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "cannot create output directory " + cfg.output.dir);
    const std::string stem = (dir / (cfg.output.prefix.empty() ? name : cfg.output.prefix)).string();
    if (cfg.output.json) write_atomic(stem + ".json", art.report.dump(2) + "\n");
    if (cfg.output.csv && art.csv) write_atomic(stem + ".csv", *art.csv);
    if (cfg.output.binary && art.binary) write_atomic(stem + ".bin", *art.binary);
}

}  // namespace geobeam
