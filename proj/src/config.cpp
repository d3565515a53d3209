#include "geobeam/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "geobeam/errors.hpp"
#include "geobeam/floquet.hpp"
#include "geobeam/io.hpp"

namespace geobeam {

namespace {

class Block {
public:
    Block(const json& doc, std::string pointer) : ptr_(std::move(pointer)) {
        if (!doc.is_object()) throw ConfigInvalid(ptr_.empty() ? "/" : ptr_, "expected an object");
        doc_ = &doc;
    }

    bool has(const std::string& key) const { return doc_->contains(key); }
    std::string at(const std::string& key) const { return ptr_ + "/" + key; }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) throw ConfigInvalid(at(key), "required field is missing");
        return (*doc_)[key];
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        seen_.insert(key);
        if (!has(key)) {
            if (!fallback) throw ConfigInvalid(at(key), "required field is missing");
            return *fallback;
        }
        const json& v = (*doc_)[key];
        if (!v.is_number()) throw ConfigInvalid(at(key), "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
        seen_.insert(key);
        if (!has(key)) {
            if (!fallback) throw ConfigInvalid(at(key), "required field is missing");
            return *fallback;
        }
        const json& v = (*doc_)[key];
        if (!v.is_number_integer()) throw ConfigInvalid(at(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = (*doc_)[key];
        if (!v.is_boolean()) throw ConfigInvalid(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        seen_.insert(key);
        if (!has(key)) {
            if (!fallback) throw ConfigInvalid(at(key), "required field is missing");
            return *fallback;
        }
        const json& v = (*doc_)[key];
        if (!v.is_string()) throw ConfigInvalid(at(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (auto it = doc_->begin(); it != doc_->end(); ++it)
            if (!seen_.count(it.key())) throw ConfigInvalid(at(it.key()), "unknown field");
    }

private:
    const json* doc_ = nullptr;
    std::string ptr_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& pointer, const std::string& why) {
    if (!ok) throw ConfigInvalid(pointer, why);
}

// A number (constant) or a list of [cos, sin] pairs indexed by frequency.
FourierSeries series(const json& v, const std::string& pointer, bool half_frequency) {
    if (v.is_number()) return FourierSeries::constant(v.get<double>());
    require(v.is_array() && !v.empty(), pointer, "expected a number or a non-empty list of [cos, sin] pairs");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const json& e = v[k];
        const std::string p = pointer + "/" + std::to_string(k);
        require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(), p,
                "expected a [cos, sin] pair of numbers");
        pairs.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return FourierSeries::from_cos_sin(pairs, half_frequency);
}

json series_echo(const json& v) {
    if (v.is_number()) return v.get<double>();
    json out = json::array();
    for (const auto& e : v) out.push_back(json::array({e[0].get<double>(), e[1].get<double>()}));
    return out;
}

}  // namespace

CurvatureModel build_model(const json& surface) {
    Block b(surface, "/surface");
    const std::string type = b.string("type");
    require(type == "constant" || type == "fourier" || type == "curvature", b.at("type"),
            "expected \"constant\", \"fourier\" or \"curvature\"");
    const double r0 = b.number("r0");
    const int omega = b.integer("omega", 1);
    require(omega == 1 || omega == -1, b.at("omega"), "must be 1 or -1");
    const bool half = b.boolean("half_frequency", false);

    CurvatureModel m;
    if (type == "constant") {
        const json& R = b.raw("R");
        require(R.is_number(), b.at("R"), "expected a number");
        m = CurvatureModel::constant(R.get<double>(), r0, omega);
    } else if (type == "fourier") {
        m.R = series(b.raw("R"), b.at("R"), half);
        m.r0 = r0;
        m.omega = omega;
    } else {
        const json& K = b.raw("K");
        require(K.is_array() && !K.empty(), b.at("K"), "expected a list of curvature coefficients");
        std::vector<FourierSeries> ks;
        for (std::size_t n = 0; n < K.size(); ++n) ks.push_back(series(K[n], b.at("K") + "/" + std::to_string(n), half));
        m = CurvatureModel::from_curvature(ks, r0, omega);
    }
    if (b.has("higher")) {
        const json& hi = b.raw("higher");
        require(hi.is_object(), b.at("higher"), "expected an object keyed by order");
        for (auto it = hi.begin(); it != hi.end(); ++it) {
            const std::string p = b.at("higher") + "/" + it.key();
            int j = 0;
            try {
                std::size_t used = 0;
                j = std::stoi(it.key(), &used);
                require(used == it.key().size(), p, "order must be an integer");
            } catch (const std::logic_error&) {
                throw ConfigInvalid(p, "order must be an integer");
            }
            require(j >= 3, p, "order must be at least 3");
            require(type != "curvature", p, "higher orders are derived from K for curvature surfaces");
            m.higher[j] = series(it.value(), p, half);
        }
    }
    if (b.has("taylor_order")) {
        const int t = b.integer("taylor_order");
        require(t >= 2, b.at("taylor_order"), "must be at least 2");
        m.taylor_order = t;
    }
    m.validate();
    if (b.has("tune_ratio")) m = tune_mean_curvature(m, b.number("tune_ratio"));
    b.finish();
    return m;
}

RunConfig parse_config(const json& doc) {
    Block root(doc, "");
    RunConfig c;
    {
        const json& s = root.raw("surface");
        c.model = build_model(s);
        json e = json::object();
        e["type"] = s["type"];
        if (s.contains("R")) e["R"] = series_echo(s["R"]);
        if (s.contains("K")) {
            e["K"] = json::array();
            for (const auto& k : s["K"]) e["K"].push_back(series_echo(k));
        }
        e["half_frequency"] = s.value("half_frequency", false);
        e["higher"] = json::object();
        if (s.contains("higher"))
            for (auto it = s["higher"].begin(); it != s["higher"].end(); ++it) e["higher"][it.key()] = series_echo(it.value());
        e["omega"] = c.model.omega;
        e["r0"] = c.model.r0;
        e["taylor_order"] = c.model.taylor_order ? json(*c.model.taylor_order) : json(nullptr);
        e["tune_ratio"] = s.contains("tune_ratio") ? s["tune_ratio"] : json(nullptr);
        c.surface = e;
    }
    if (root.has("mode")) {
        Block b(root.raw("mode"), "/mode");
        ModeBlock& m = c.mode;
        m.k0 = b.integer("k0", m.k0);
        m.p = b.integer("p", m.p);
        m.epsilon = b.number("epsilon", m.epsilon);
        m.kappa = b.number("kappa", m.kappa);
        m.sigma = b.number("sigma", m.sigma);
        m.h = b.number("h", m.h);
        require(m.k0 >= 0, b.at("k0"), "must be non-negative");
        require(m.p >= 0 && m.p <= 8, b.at("p"), "must be between 0 and 8");
        require(m.kappa > 0.0, b.at("kappa"), "must be positive");
        require(m.sigma >= 0.0 && m.sigma < 0.25, b.at("sigma"), "must lie in [0, 1/4)");
        require(m.h > 0.0 && m.h < 1.0, b.at("h"), "must lie in (0, 1)");
        b.finish();
    }
    if (root.has("numerics")) {
        Block b(root.raw("numerics"), "/numerics");
        NumericsBlock& n = c.numerics;
        n.ode_tol = b.number("ode_tol", n.ode_tol);
        n.hill_nodes = b.integer("hill_nodes", n.hill_nodes);
        n.tau = b.number("tau", n.tau);
        n.N = b.integer("N", n.N);
        n.near_floor = b.number("near_floor", n.near_floor);
        n.divisor_floor = b.number("divisor_floor", n.divisor_floor);
        n.J_max = b.integer("J_max", n.J_max);
        n.L_max = b.integer("L_max", n.L_max);
        n.tail_tol = b.number("tail_tol", n.tail_tol);
        n.auto_refine = b.boolean("auto_refine", n.auto_refine);
        n.force = b.boolean("force", n.force);
        n.ns = b.integer("ns", n.ns);
        n.nr = b.integer("nr", n.nr);
        n.dt = b.number("dt", n.dt);
        n.safety = b.number("safety", n.safety);
        n.edge_tol = b.number("edge_tol", n.edge_tol);
        n.samples = b.integer("samples", n.samples);
        require(n.ode_tol > 0.0, b.at("ode_tol"), "must be positive");
        require(n.hill_nodes >= 16 && n.hill_nodes % 2 == 0, b.at("hill_nodes"), "must be an even number >= 16");
        require(n.tau > 0.0, b.at("tau"), "must be positive");
        require(n.N >= 1, b.at("N"), "must be at least 1");
        require(n.J_max >= 2 && n.J_max <= 160, b.at("J_max"), "must be between 2 and 160");
        require(n.L_max >= 2, b.at("L_max"), "must be at least 2");
        require(n.tail_tol > 0.0, b.at("tail_tol"), "must be positive");
        require(n.ns >= 8 && n.ns % 2 == 0, b.at("ns"), "must be an even number >= 8");
        require(n.nr >= 16 && n.nr % 2 == 0, b.at("nr"), "must be an even number >= 16");
        require(n.dt >= 0.0, b.at("dt"), "must be non-negative");
        require(n.safety > 0.0 && n.safety <= 1.0, b.at("safety"), "must lie in (0, 1]");
        require(n.edge_tol > 0.0, b.at("edge_tol"), "must be positive");
        require(n.samples >= 2, b.at("samples"), "must be at least 2");
        b.finish();
    }
    require(c.mode.k0 <= c.numerics.J_max, "/mode/k0", "must not exceed numerics.J_max");
    if (root.has("experiment")) {
        Block b(root.raw("experiment"), "/experiment");
        ExperimentBlock& x = c.experiment;
        if (b.has("h_list")) {
            const json& l = b.raw("h_list");
            require(l.is_array() && l.size() >= 3, b.at("h_list"), "expected at least three step sizes");
            x.h_list.clear();
            for (std::size_t i = 0; i < l.size(); ++i) {
                const std::string p = b.at("h_list") + "/" + std::to_string(i);
                require(l[i].is_number() && l[i].get<double>() > 0.0 && l[i].get<double>() < 1.0, p, "must lie in (0, 1)");
                x.h_list.push_back(l[i].get<double>());
            }
        }
        x.t_end = b.number("t_end", x.t_end);
        x.kappa_prime = b.number("kappa_prime", x.kappa_prime);
        require(x.t_end >= 0.0, b.at("t_end"), "must be non-negative");
        require(x.kappa_prime > 0.0, b.at("kappa_prime"), "must be positive");
        b.finish();
    }
    if (root.has("output")) {
        Block b(root.raw("output"), "/output");
        OutputBlock& o = c.output;
        o.dir = b.string("dir", o.dir);
        o.prefix = b.string("prefix", o.prefix);
        o.json = b.boolean("json", o.json);
        o.csv = b.boolean("csv", o.csv);
        o.binary = b.boolean("binary", o.binary);
        b.finish();
    }
    root.finish();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigInvalid("/", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

json RunConfig::echo() const {
    json j;
    j["surface"] = surface;
    j["mode"] = {{"k0", mode.k0}, {"p", mode.p}, {"epsilon", mode.epsilon}, {"kappa", mode.kappa},
                 {"sigma", mode.sigma}, {"h", mode.h}};
    const NumericsBlock& n = numerics;
    j["numerics"] = {{"ode_tol", n.ode_tol},     {"hill_nodes", n.hill_nodes},   {"tau", n.tau},
                     {"N", n.N},                 {"near_floor", n.near_floor},   {"divisor_floor", n.divisor_floor},
                     {"J_max", n.J_max},         {"L_max", n.L_max},             {"tail_tol", n.tail_tol},
                     {"auto_refine", n.auto_refine}, {"force", n.force},         {"ns", n.ns},
                     {"nr", n.nr},               {"dt", n.dt},                   {"safety", n.safety},
                     {"edge_tol", n.edge_tol},   {"samples", n.samples}};
    j["experiment"] = {{"h_list", experiment.h_list}, {"t_end", experiment.t_end},
                       {"kappa_prime", experiment.kappa_prime}};
    j["output"] = {{"dir", output.dir}, {"prefix", output.prefix}, {"json", output.json},
                   {"csv", output.csv}, {"binary", output.binary}};
    return j;
}

std::string RunConfig::hash() const {
    json j = echo();
    j.erase("output");
    return hex64(fnv1a(j.dump()));
}

}  // namespace geobeam
