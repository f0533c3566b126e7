#include "relucoll/config.hpp"

#include <cmath>
#include <filesystem>

#include "relucoll/errors.hpp"
#include "relucoll/expr.hpp"

namespace rc {

namespace {

const Json* field(const Json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const Json& obj, const char* key, const std::string& path, std::optional<double> fallback = {}) {
    const Json* f = field(obj, key);
    if (!f) {
        if (fallback) return *fallback;
        throw ConfigError(path + key + ": missing");
    }
    return parse_double(*f, path + key);
}

long long integer(const Json& obj, const char* key, const std::string& path, std::optional<long long> fallback = {}) {
    const Json* f = field(obj, key);
    if (!f) {
        if (fallback) return *fallback;
        throw ConfigError(path + key + ": missing");
    }
    if (f->is_number_integer()) return f->get<long long>();
    const double v = parse_double(*f, path + key);
    if (v != std::floor(v)) throw ConfigError(path + key + ": expected an integer");
    return static_cast<long long>(v);
}

void require(bool ok, const std::string& path, const std::string& msg) {
    if (!ok) throw ConfigError(path + ": " + msg);
}

}  // namespace

std::string ExperimentConfig::hash() const {
    Json j = raw;
    if (j.is_object()) j.erase("output");
    return json_hash(j);
}

ExperimentConfig parse_config(const Json& j) {
    require(j.is_object(), "config", "expected a JSON object");
    ExperimentConfig c;
    c.raw = j;

    const Json* prob = field(j, "problem");
    require(prob && prob->is_object(), "problem", "missing section");
    const std::string pp = "problem.";
    const long long mesh_n = integer(*prob, "mesh_n", pp, 63);
    require(mesh_n >= 3 && mesh_n <= 1'000'000, "problem.mesh_n", "must be between 3 and 1e6");
    c.problem.mesh_n = static_cast<int>(mesh_n);

    if (const Json* f = field(*prob, "f")) {
        if (f->is_string() && f->get<std::string>() == "one") {
            c.problem.f = [](double) { return 1.0; };
            c.problem.f_text = "one";
        } else if (f->is_object() && field(*f, "expr") && field(*f, "expr")->is_string()) {
            const Expr e = Expr::parse(field(*f, "expr")->get<std::string>());
            c.problem.f = [e](double x) { return e(x); };
            c.problem.f_text = e.text();
        } else {
            throw ConfigError("problem.f: expected \"one\" or {\"expr\": \"...\"}");
        }
    }

    const Json* psi = field(*prob, "psi");
    require(psi && psi->is_object(), "problem.psi", "missing section");
    if (const Json* file = field(*psi, "file")) {
        require(file->is_string(), "problem.psi.file", "expected a path");
        c.problem.psi = PsiFamily::from_csv(file->get<std::string>());
    } else {
        const Json* fam = field(*psi, "family");
        require(!fam || (fam->is_string() && fam->get<std::string>() == "sine"), "problem.psi.family",
                "only \"sine\" is supported");
        c.problem.psi.kind = PsiFamily::Kind::Sine;
        c.problem.psi.c = number(*psi, "c", "problem.psi.", 0.4);
        c.problem.psi.alpha = number(*psi, "alpha", "problem.psi.", 2.0);
        const long long dims = integer(*psi, "dims", "problem.psi.", 20);
        require(dims >= 1 && dims <= 100000, "problem.psi.dims", "must be positive");
        c.problem.psi.dims = static_cast<int>(dims);
        require(c.problem.psi.alpha > 1.0, "problem.psi.alpha", "must exceed 1");
    }

    const double q = number(*prob, "q", pp);
    require(q > 0.0 && q < 2.0, "problem.q", "must lie in (0,2)");
    const Json* rho = field(*prob, "rho");
    require(rho && rho->is_object(), "problem.rho", "missing section");
    const double rc_ = number(*rho, "c", "problem.rho.");
    const double rr = number(*rho, "r", "problem.rho.");
    require(rc_ > 0.0, "problem.rho.c", "must be positive");
    require(rr > 1.0 / q, "problem.rho.r", "must exceed 1/q for summability");

    const Json empty = Json::object();
    const Json* wj = field(j, "weights");
    const Json& w = wj ? *wj : empty;
    const double dflt_delta = number(w, "delta", "weights.", 1.0 / 6.0);
    require(dflt_delta > 0.0, "weights.delta", "must be positive");
    c.weights = WeightModel::with_defaults(q, rc_, rr, dflt_delta);
    if (const Json* ex = field(*rho, "explicit")) c.weights.rho_explicit = parse_float_array(*ex, "problem.rho.explicit");
    c.weights.theta = number(w, "theta", "weights.", c.weights.theta);
    require(c.weights.theta >= 0.0, "weights.theta", "must be non-negative");
    c.weights.eta = static_cast<int>(integer(w, "eta", "weights.", c.weights.eta));
    require(c.weights.eta >= 1, "weights.eta", "must be a positive integer");
    c.weights.lambda = number(w, "lambda", "weights.", c.weights.lambda);
    require(c.weights.lambda >= 0.0, "weights.lambda", "must be non-negative");
    try {
        c.weights.validate();
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("weights: ") + ex.what());
    }

    const Json* sweep = field(j, "xi_sweep");
    require(sweep && sweep->is_array() && !sweep->empty(), "xi_sweep", "expected a non-empty array");
    c.xi_sweep = parse_float_array(*sweep, "xi_sweep");
    for (std::size_t i = 0; i < c.xi_sweep.size(); ++i) {
        const std::string at = "xi_sweep[" + std::to_string(i) + "]";
        require(c.xi_sweep[i] > 1.0, at, "must exceed 1");
        require(i == 0 || c.xi_sweep[i] > c.xi_sweep[i - 1], at, "sweep must be strictly increasing");
    }

    if (const Json* d = field(j, "delta_mode")) {
        if (!(d->is_string() && d->get<std::string>() == "paper")) {
            const double v = parse_double(*d, "delta_mode");
            require(v > 0.0 && v < 1.0, "delta_mode", "fixed delta must lie in (0,1)");
            c.delta_fixed = v;
        }
    }
    if (const Json* o = field(j, "omega_mode")) {
        if (!(o->is_string() && o->get<std::string>() == "paper")) {
            const double v = parse_double(*o, "omega_mode");
            require(v >= 1.0 && v == std::floor(v), "omega_mode", "fixed omega must be a positive integer");
            c.omega_fixed = v;
        }
    }

    if (const Json* mc = field(j, "mc")) {
        const long long n = integer(*mc, "n_samples", "mc.", 256);
        require(n >= 16, "mc.n_samples", "must be at least 16");
        c.mc.n_samples = static_cast<std::size_t>(n);
        const long long seed = integer(*mc, "seed", "mc.", 1);
        require(seed >= 0, "mc.seed", "must be non-negative");
        c.mc.seed = static_cast<std::uint64_t>(seed);
        const long long tail = integer(*mc, "tail_dims", "mc.", 8);
        require(tail >= 0, "mc.tail_dims", "must be non-negative");
        c.mc.tail_dims = static_cast<std::size_t>(tail);
    }
    const long long refine = integer(j, "truth_refine", "", 8);
    require(refine >= 2 && refine <= 64, "truth_refine", "must be between 2 and 64");
    c.truth_refine = static_cast<int>(refine);
    const long long cap = integer(j, "lambda_cap", "", static_cast<long long>(kDefaultLambdaCap));
    require(cap >= 1, "lambda_cap", "must be positive");
    c.lambda_cap = static_cast<std::size_t>(cap);
    if (const Json* out = field(j, "output")) {
        require(out->is_string(), "output", "expected a path");
        c.output = out->get<std::string>();
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    Json j = read_json(path);
    // Relative psi tables are resolved against the config's directory.
    if (j.is_object() && j.contains("problem") && j["problem"].is_object() && j["problem"].contains("psi") &&
        j["problem"]["psi"].is_object() && j["problem"]["psi"].contains("file") &&
        j["problem"]["psi"]["file"].is_string()) {
        std::filesystem::path f = j["problem"]["psi"]["file"].get<std::string>();
        if (f.is_relative()) {
            const auto base = std::filesystem::path(path).parent_path();
            ExperimentConfig c;
            Json resolved = j;
            resolved["problem"]["psi"]["file"] = (base / f).string();
            c = parse_config(resolved);
            c.raw = j;
            return c;
        }
    }
    return parse_config(j);
}

}  // namespace rc
