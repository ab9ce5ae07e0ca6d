#include "reslab/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "reslab/errors.hpp"

namespace reslab::cli {

namespace {

std::string join(std::string_view prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

void reject_unknown(const toml::table& t, std::string_view prefix, std::initializer_list<std::string_view> allowed) {
    const std::set<std::string_view> ok(allowed);
    for (const auto& [k, v] : t) {
        if (!ok.contains(k.str())) throw ConfigError(join(prefix, k.str()), "unknown key");
    }
}

const toml::table* sub_table(const toml::table& t, std::string_view key, std::string_view prefix) {
    const toml::node* n = t.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(join(prefix, key), "expected a table");
    return n->as_table();
}

void read_double(const toml::table& t, std::string_view key, std::string_view prefix, double& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    if (auto f = n->value_exact<double>())
        out = *f;
    else if (auto i = n->value_exact<std::int64_t>())
        out = static_cast<double>(*i);
    else
        throw ConfigError(join(prefix, key), "expected a number");
    if (!std::isfinite(out)) throw ConfigError(join(prefix, key), "must be finite");
}

void read_int(const toml::table& t, std::string_view key, std::string_view prefix, int& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    auto i = n->value_exact<std::int64_t>();
    if (!i) throw ConfigError(join(prefix, key), "expected an integer");
    if (*i < INT32_MIN || *i > INT32_MAX) throw ConfigError(join(prefix, key), "integer out of range");
    out = static_cast<int>(*i);
}

void read_string(const toml::table& t, std::string_view key, std::string_view prefix, std::string& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    auto s = n->value_exact<std::string>();
    if (!s) throw ConfigError(join(prefix, key), "expected a string");
    out = *s;
}

void read_bool(const toml::table& t, std::string_view key, std::string_view prefix, bool& out) {
    const toml::node* n = t.get(key);
    if (!n) return;
    auto b = n->value_exact<bool>();
    if (!b) throw ConfigError(join(prefix, key), "expected a boolean");
    out = *b;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

void validate(const ExperimentConfig& c) {
    const auto& nl = c.nonlinearity;
    require(nl.kind == "log" || nl.kind == "linear" || nl.kind == "zero", "nonlinearity.kind",
            "must be one of log, linear, zero");
    if (nl.kind == "log") require(nl.alpha > 0.0, "nonlinearity.alpha", "must be positive");
    require(c.grid.dim >= 1 && c.grid.dim <= 3, "grid.dim", "must be 1, 2 or 3");
    require(c.grid.half_width > 0.0, "grid.half_width", "must be positive");
    require(c.grid.points >= 3, "grid.points", "must be at least 3");
    for (std::size_t i = 0; i < c.potential.wells.size(); ++i) {
        const auto& w = c.potential.wells[i];
        const std::string p = "potential.wells[" + std::to_string(i) + "]";
        require(w.shape == "square" || w.shape == "gaussian", p + ".shape", "must be square or gaussian");
        require(w.radius > 0.0, p + ".radius", "must be positive");
        require(w.center.empty() || static_cast<int>(w.center.size()) == c.grid.dim, p + ".center",
                "length must equal grid.dim");
    }
    const auto& s = c.solver;
    require(s.tolerance > 0.0, "solver.tolerance", "must be positive");
    require(s.max_iterations >= 1, "solver.max_iterations", "must be at least 1");
    require(s.eigen_method == "auto" || s.eigen_method == "iterative" || s.eigen_method == "dense",
            "solver.eigen_method", "must be auto, iterative or dense");
    require(s.eigen_tolerance > 0.0, "solver.eigen_tolerance", "must be positive");
    require(s.morse_tolerance > 0.0, "solver.morse_tolerance", "must be positive");
    require(s.k >= 1, "solver.k", "must be at least 1");
    const auto& k = c.continuation;
    require(k.lambda_start < k.lambda_end, "continuation.lambda_start", "must be below lambda_end");
    require(k.steps >= 1, "continuation.steps", "must be at least 1");
    require(c.probe.trials >= 1, "probe.trials", "must be at least 1");
    if (c.probe.alpha) require(*c.probe.alpha > 0.0, "probe.alpha", "must be positive");
}

std::string num(double v) {
    char buf[40];
    const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
    std::string s(buf, end);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.nonlinearity.alpha = 4.5;
    c.potential.wells.push_back(WellConfig{"square", 10.0, 1.4, {0.0}});
    c.probe.alpha = 1.0;
    return c;
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML syntax error at line " << e.source().begin.line << ": " << e.description();
        throw ConfigError("", os.str());
    }

    ExperimentConfig c;
    reject_unknown(root, "", {"seed", "nonlinearity", "potential", "grid", "solver", "continuation", "probe", "output"});
    if (const toml::node* n = root.get("seed")) {
        auto i = n->value_exact<std::int64_t>();
        if (!i || *i < 0) throw ConfigError("seed", "expected a non-negative integer");
        c.seed = static_cast<std::uint64_t>(*i);
    }
    if (auto t = sub_table(root, "nonlinearity", "")) {
        reject_unknown(*t, "nonlinearity", {"kind", "alpha", "slope"});
        read_string(*t, "kind", "nonlinearity", c.nonlinearity.kind);
        read_double(*t, "alpha", "nonlinearity", c.nonlinearity.alpha);
        read_double(*t, "slope", "nonlinearity", c.nonlinearity.slope);
    }
    if (auto t = sub_table(root, "potential", "")) {
        reject_unknown(*t, "potential", {"sigma0", "wells"});
        read_double(*t, "sigma0", "potential", c.potential.sigma0);
        if (const toml::node* w = t->get("wells")) {
            const toml::array* arr = w->as_array();
            if (!arr) throw ConfigError("potential.wells", "expected an array of tables");
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const std::string p = "potential.wells[" + std::to_string(i) + "]";
                const toml::table* wt = (*arr)[i].as_table();
                if (!wt) throw ConfigError(p, "expected a table");
                reject_unknown(*wt, p, {"shape", "depth", "radius", "center"});
                WellConfig wc;
                read_string(*wt, "shape", p, wc.shape);
                read_double(*wt, "depth", p, wc.depth);
                read_double(*wt, "radius", p, wc.radius);
                if (const toml::node* cn = wt->get("center")) {
                    const toml::array* ca = cn->as_array();
                    if (!ca) throw ConfigError(p + ".center", "expected an array of numbers");
                    for (std::size_t j = 0; j < ca->size(); ++j) {
                        const auto& e = (*ca)[j];
                        if (auto f = e.value_exact<double>())
                            wc.center.push_back(*f);
                        else if (auto iv = e.value_exact<std::int64_t>())
                            wc.center.push_back(static_cast<double>(*iv));
                        else
                            throw ConfigError(p + ".center[" + std::to_string(j) + "]", "expected a number");
                    }
                }
                c.potential.wells.push_back(std::move(wc));
            }
        }
    }
    if (auto t = sub_table(root, "grid", "")) {
        reject_unknown(*t, "grid", {"dim", "half_width", "points"});
        read_int(*t, "dim", "grid", c.grid.dim);
        read_double(*t, "half_width", "grid", c.grid.half_width);
        read_int(*t, "points", "grid", c.grid.points);
    }
    if (auto t = sub_table(root, "solver", "")) {
        reject_unknown(*t, "solver",
                       {"tolerance", "max_iterations", "eigen_method", "eigen_tolerance", "morse_tolerance", "k"});
        read_double(*t, "tolerance", "solver", c.solver.tolerance);
        read_int(*t, "max_iterations", "solver", c.solver.max_iterations);
        read_string(*t, "eigen_method", "solver", c.solver.eigen_method);
        read_double(*t, "eigen_tolerance", "solver", c.solver.eigen_tolerance);
        read_double(*t, "morse_tolerance", "solver", c.solver.morse_tolerance);
        read_int(*t, "k", "solver", c.solver.k);
    }
    if (auto t = sub_table(root, "continuation", "")) {
        reject_unknown(*t, "continuation", {"lambda_start", "lambda_end", "steps", "amplitude"});
        read_double(*t, "lambda_start", "continuation", c.continuation.lambda_start);
        read_double(*t, "lambda_end", "continuation", c.continuation.lambda_end);
        read_int(*t, "steps", "continuation", c.continuation.steps);
        read_double(*t, "amplitude", "continuation", c.continuation.amplitude);
    }
    if (auto t = sub_table(root, "probe", "")) {
        reject_unknown(*t, "probe", {"lambda", "trials", "alpha"});
        read_double(*t, "lambda", "probe", c.probe.lambda);
        read_int(*t, "trials", "probe", c.probe.trials);
        if (t->get("alpha")) {
            double a = 0.0;
            read_double(*t, "alpha", "probe", a);
            c.probe.alpha = a;
        }
    }
    if (auto t = sub_table(root, "output", "")) {
        reject_unknown(*t, "output", {"directory", "vectors"});
        read_string(*t, "directory", "output", c.output.directory);
        read_bool(*t, "vectors", "output", c.output.vectors);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "seed = " << c.seed << "\n\n";
    os << "[nonlinearity]\nkind = " << quoted(c.nonlinearity.kind) << "\nalpha = " << num(c.nonlinearity.alpha)
       << "\nslope = " << num(c.nonlinearity.slope) << "\n\n";
    os << "[potential]\nsigma0 = " << num(c.potential.sigma0) << "\n";
    for (const auto& w : c.potential.wells) {
        os << "\n[[potential.wells]]\nshape = " << quoted(w.shape) << "\ndepth = " << num(w.depth)
           << "\nradius = " << num(w.radius) << "\ncenter = [";
        for (std::size_t i = 0; i < w.center.size(); ++i) os << (i ? ", " : "") << num(w.center[i]);
        os << "]\n";
    }
    os << "\n[grid]\ndim = " << c.grid.dim << "\nhalf_width = " << num(c.grid.half_width)
       << "\npoints = " << c.grid.points << "\n\n";
    os << "[solver]\ntolerance = " << num(c.solver.tolerance) << "\nmax_iterations = " << c.solver.max_iterations
       << "\neigen_method = " << quoted(c.solver.eigen_method) << "\neigen_tolerance = " << num(c.solver.eigen_tolerance)
       << "\nmorse_tolerance = " << num(c.solver.morse_tolerance) << "\nk = " << c.solver.k << "\n\n";
    os << "[continuation]\nlambda_start = " << num(c.continuation.lambda_start)
       << "\nlambda_end = " << num(c.continuation.lambda_end) << "\nsteps = " << c.continuation.steps
       << "\namplitude = " << num(c.continuation.amplitude) << "\n\n";
    os << "[probe]\nlambda = " << num(c.probe.lambda) << "\ntrials = " << c.probe.trials << "\n";
    if (c.probe.alpha) os << "alpha = " << num(*c.probe.alpha) << "\n";
    os << "\n";
    os << "[output]\ndirectory = " << quoted(c.output.directory)
       << "\nvectors = " << (c.output.vectors ? "true" : "false") << "\n";
    return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : serialize_config(config)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

model::PotentialSpec make_potential(const ExperimentConfig& config) {
    std::vector<model::Well> wells;
    for (const auto& w : config.potential.wells) {
        model::Well well;
        well.shape = w.shape == "gaussian" ? model::Well::Shape::Gaussian : model::Well::Shape::Square;
        well.depth = w.depth;
        well.radius = w.radius;
        well.center = w.center;
        wells.push_back(std::move(well));
    }
    return model::PotentialSpec::from_wells(config.potential.sigma0, std::move(wells));
}

model::NonlinearitySpec make_nonlinearity(const ExperimentConfig& config) {
    const auto& nl = config.nonlinearity;
    if (nl.kind == "log") return model::build_log_nonlinearity(nl.alpha);
    if (nl.kind == "linear") return model::build_linear(nl.slope);
    return model::build_linear(0.0);
}

model::NonlinearitySpec make_probe_nonlinearity(const ExperimentConfig& config) {
    if (!config.probe.alpha) return make_nonlinearity(config);
    ExperimentConfig c = config;
    c.nonlinearity.alpha = *config.probe.alpha;
    return make_nonlinearity(c);
}

op::Grid make_grid(const ExperimentConfig& config) {
    return op::Grid(config.grid.dim, config.grid.half_width, config.grid.points);
}

op::EigenOptions make_eigen_options(const ExperimentConfig& config) {
    op::EigenOptions o;
    const auto& m = config.solver.eigen_method;
    o.method = m == "dense" ? op::EigenMethod::Dense : m == "iterative" ? op::EigenMethod::Iterative : op::EigenMethod::Auto;
    o.tolerance = config.solver.eigen_tolerance;
    o.seed = config.seed;
    return o;
}

solve::SolverCaps make_caps(const ExperimentConfig& config) {
    solve::SolverCaps caps;
    caps.tolerance = config.solver.tolerance;
    caps.max_iterations = config.solver.max_iterations;
    caps.morse_tolerance = config.solver.morse_tolerance;
    caps.eigen = make_eigen_options(config);
    return caps;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
    if (!config.output.directory.empty()) return config.output.directory;
    if (const char* env = std::getenv("RESLAB_OUTPUT_DIR"); env && *env) return env;
    return "reslab_out";
}

}  // namespace reslab::cli
