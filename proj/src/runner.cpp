#include "relucoll/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>

#include "relucoll/errors.hpp"
#include "relucoll/lagrange.hpp"
#include "relucoll/parallel.hpp"
#include "relucoll/rng.hpp"
#include "relucoll/serialize.hpp"

namespace rc {

// Memo of truth evaluations keyed by the bytes of the sample matrix.
struct TruthCache {
    std::mutex mu;
    std::map<std::uint64_t, Mat> values;
};

namespace {

std::uint64_t matrix_key(const Mat& Y) {
    std::string_view bytes(reinterpret_cast<const char*>(Y.data.data()), Y.data.size() * sizeof(double));
    return fnv1a64(bytes) ^ (static_cast<std::uint64_t>(Y.rows) << 32) ^ Y.cols;
}

std::string na_or(double v, bool ok) { return ok ? format_double(v) : "NA"; }

}  // namespace

Experiment::Experiment(ExperimentConfig cfg, RunOptions opts)
    : cfg_(std::move(cfg)),
      opts_(std::move(opts)),
      coarse_(cfg_.problem),
      fine_(refined(cfg_.problem, cfg_.truth_refine)),
      truth_cache_(std::make_shared<TruthCache>()) {
    if (opts_.threads < 1) opts_.threads = 1;
}

std::string Experiment::out_dir() const { return opts_.out.empty() ? cfg_.output : opts_.out; }
std::uint64_t Experiment::seed() const { return opts_.seed ? *opts_.seed : cfg_.mc.seed; }

CollocationPlan Experiment::plan(double xi) const { return build_plan(xi, cfg_.weights, cfg_.lambda_cap); }

double Experiment::omega(double xi) const {
    if (cfg_.omega_fixed) return *cfg_.omega_fixed;
    if (!omega_k_) {
        const double expo = cfg_.weights.theta > 0.0 ? 1.0 / (cfg_.weights.theta * cfg_.weights.q) : 1.0;
        double k = 0.0;
        for (std::size_t i = 0; i < std::min<std::size_t>(2, cfg_.xi_sweep.size()); ++i) {
            const double x = cfg_.xi_sweep[i];
            const auto p = plan(x);
            k = std::max(k, p.m1 / std::pow(x, expo));
        }
        omega_k_ = k;
    }
    return std::max(1.0, std::floor(*omega_k_ * xi));
}

DeltaInfo Experiment::delta(const CollocationPlan& plan, double omega) const {
    if (cfg_.delta_fixed) {
        DeltaInfo d;
        d.delta = d.delta_formula = *cfg_.delta_fixed;
        d.log_inv_delta = -std::log(d.delta);
        return d;
    }
    int max_order = 0;
    for (const auto& s : plan.lambda_set)
        for (const auto& [j, v] : s.entries()) max_order = std::max<int>(max_order, static_cast<int>(v));
    return compute_delta(plan, omega, fit_node_sum_constant(max_order));
}

Mat Experiment::solve(const CollocationPlan& plan) const {
    return sample_points(
        plan, [this](const std::vector<double>& y) { return coarse_.solve(y).nodal; }, opts_.threads);
}

Mat Experiment::truth(const Mat& Y) const {
    auto* cache = truth_cache_.get();
    const std::uint64_t key = matrix_key(Y);
    {
        std::lock_guard<std::mutex> lock(cache->mu);
        auto it = cache->values.find(key);
        if (it != cache->values.end()) return it->second;
    }
    const int factor = cfg_.truth_refine;
    Mat out = pointwise(
        [this, factor](std::span<const double> y) { return restrict_nodal(fine_.solve(y).nodal, factor); },
        opts_.threads)(Y);
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values.emplace(key, out);
    return out;
}

BatchFn Experiment::truth_fn() const {
    return [this](const Mat& Y) { return truth(Y); };
}

NormFn Experiment::norm() const {
    const double h = coarse_.problem().h();
    return [h](std::span<const double> v) { return h1_seminorm(v, h); };
}

namespace {

SweepRow evaluate_plan(const Experiment& ex, std::shared_ptr<const CollocationPlan> plan, Mat values,
                       std::size_t dims, bool with_network) {
    const auto t0 = std::chrono::steady_clock::now();
    const int threads = ex.options().threads;
    const std::size_t n = ex.config().mc.n_samples;
    const std::uint64_t seed = ex.seed();
    const NormFn norm = ex.norm();

    SweepRow r;
    r.xi = plan->xi;
    const auto st = plan_stats(*plan);
    r.lambda_size = st.lambda_size;
    r.n_solvers = st.triple_count;
    r.n_unique = st.unique_points;
    r.m1 = st.m1;
    r.m_active = st.m_active;

    std::vector<double> point_norms(values.rows);
    for (std::size_t p = 0; p < values.rows; ++p) point_norms[p] = norm(values.row(p));

    const SparseInterpolant interp(plan, std::move(values));
    r.omega = ex.omega(plan->xi);
    const DeltaInfo d = ex.delta(*plan, r.omega);
    r.delta = d.delta;
    r.log_inv_delta_formula = d.log_inv_delta;

    const Mat G = gaussian_samples(n, dims, seed, "l2");
    const Mat truth_g = ex.truth(G);
    r.l2_interp = l2_from_values(truth_g, interpolant_fn(interp, threads)(G), norm);
    const double half = 2.0 * std::sqrt(r.omega);

    if (with_network) {
        const Surrogate phi(plan, interp.point_values(), r.omega, r.delta, threads);
        r.W = phi.bundle_size();
        r.W_unpadded = phi.bundle_unpadded_size();
        r.L = phi.bundle_depth();
        r.units = phi.unit_count();
        r.components = phi.component_count();
        r.l2 = l2_from_values(truth_g, phi.evaluate_batch(G, threads), norm);
        r.sup_error = weighted_sup_error(ex.truth_fn(), surrogate_fn(phi, threads), dims, n, seed, half,
                                         interp.box_dim(), norm);
        r.terms = error_decomposition(ex.truth_fn(), interp, phi, dims, n, seed, norm, threads);
        r.gap_bound = phi.gap_bound(point_norms);
    } else {
        r.l2 = r.l2_interp;
        r.sup_error = weighted_sup_error(ex.truth_fn(), interpolant_fn(interp, threads), dims, n, seed, half,
                                         interp.box_dim(), norm);
        r.terms.interp = r.l2_interp;
        const auto out = outside_samples(n, dims, interp.box_dim(), half, seed, "outside");
        r.terms.interp_tail = l2_from_values(interpolant_fn(interp, threads)(out.points), Mat(), norm, out.weights);
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string row_csv(const SweepRow& r, bool timing, bool network) {
    const bool ok = r.ok;
    const bool net = ok && network;
    std::string s = format_double(r.xi);
    auto add = [&s](const std::string& v) { s += "," + v; };
    add(ok ? std::to_string(r.n_solvers) : "NA");
    add(ok ? std::to_string(r.n_unique) : "NA");
    add(net ? std::to_string(r.W) : "NA");
    add(net ? std::to_string(r.L) : "NA");
    add(na_or(r.l2.value, ok));
    add(na_or(r.l2.stderr_, ok));
    add(na_or(r.sup_error, ok));
    add(na_or(r.terms.interp.value, ok));
    add(na_or(r.terms.interp_tail.value, ok));
    add(na_or(r.terms.network_gap.value, net));
    add(na_or(r.terms.network_tail.value, net));
    add(timing && r.wall_ms >= 0 ? format_double(std::round(r.wall_ms)) : "NA");
    return s + "\n";
}

const char* kSweepHeader =
    "xi,n_solvers,n_unique_points,W,L,l2_error,l2_stderr,sup_error,term1,term2,term3,term4,wall_ms\n";

Json load_artifact(const std::string& path, const std::string& kind, const std::string& config_hash) {
    Json j = read_json(path);
    if (!j.is_object() || j.value("kind", "") != kind) throw ConfigError(path + ": not a " + kind + " artifact");
    if (j.value("config_hash", "") != config_hash)
        throw ConfigError(path + ": config hash mismatch (artifact " + j.value("config_hash", "?") + ", config " +
                          config_hash + ")");
    return j;
}

std::string csv_report(const SweepRow& r, bool network, bool timing) {
    return std::string(kSweepHeader) + row_csv(r, timing, network);
}

}  // namespace

SweepResult run_sweep(const Experiment& ex) {
    const auto& cfg = ex.config();
    SweepResult res;
    std::vector<std::shared_ptr<const CollocationPlan>> plans(cfg.xi_sweep.size());
    std::vector<std::string> plan_errors(cfg.xi_sweep.size());
    int max_active = 0;
    for (std::size_t i = 0; i < cfg.xi_sweep.size(); ++i) {
        try {
            plans[i] = std::make_shared<const CollocationPlan>(ex.plan(cfg.xi_sweep[i]));
            max_active = std::max(max_active, plans[i]->m_active);
        } catch (const std::exception& e) {
            plan_errors[i] = e.what();
        }
    }
    res.sample_dims = std::max<std::size_t>(1, static_cast<std::size_t>(max_active) + cfg.mc.tail_dims);
    for (std::size_t i = 0; i < cfg.xi_sweep.size(); ++i) {
        SweepRow row;
        row.xi = cfg.xi_sweep[i];
        if (!plans[i]) {
            row.ok = false;
            row.error = plan_errors[i];
        } else {
            try {
                row = evaluate_plan(ex, plans[i], ex.solve(*plans[i]), res.sample_dims, true);
            } catch (const std::exception& e) {
                row = SweepRow{};
                row.xi = cfg.xi_sweep[i];
                row.ok = false;
                row.error = e.what();
            }
        }
        if (!row.ok) std::cerr << "sweep: xi=" << format_double(row.xi) << " failed: " << row.error << "\n";
        res.rows.push_back(std::move(row));
    }
    std::vector<std::pair<double, double>> by_g, by_w, interp_g;
    for (const auto& r : res.rows) {
        if (!r.ok) continue;
        if (r.l2.value > 0) {
            if (by_g.empty() || r.n_solvers > by_g.back().first) by_g.emplace_back(r.n_solvers, r.l2.value);
            if (by_w.empty() || r.W > by_w.back().first) by_w.emplace_back(r.W, r.l2.value);
        }
        if (r.l2_interp.value > 0 && (interp_g.empty() || r.n_solvers > interp_g.back().first))
            interp_g.emplace_back(r.n_solvers, r.l2_interp.value);
    }
    if (by_g.size() >= 3) res.error_vs_solvers = rate_fit(by_g);
    if (by_w.size() >= 3) res.error_vs_size = rate_fit(by_w);
    if (interp_g.size() >= 3) res.interp_error_vs_solvers = rate_fit(interp_g);
    return res;
}

std::string sweep_csv(const SweepResult& r, bool timing) {
    std::string s = kSweepHeader;
    for (const auto& row : r.rows) s += row_csv(row, timing, true);
    return s;
}

std::string sweep_details_csv(const SweepResult& r) {
    std::string s =
        "xi,status,lambda_size,m1,m_active,omega,delta,log_inv_delta_formula,W_unpadded,units,components,"
        "l2_interp,l2_interp_stderr,term1_stderr,term2_stderr,term3_stderr,term4_stderr,gap_bound\n";
    for (const auto& row : r.rows) {
        const bool ok = row.ok;
        s += format_double(row.xi) + "," + (ok ? "ok" : "failed");
        for (const std::string& v :
             {ok ? std::to_string(row.lambda_size) : "NA", ok ? std::to_string(row.m1) : "NA",
              ok ? std::to_string(row.m_active) : "NA", na_or(row.omega, ok), na_or(row.delta, ok),
              na_or(row.log_inv_delta_formula, ok), ok ? std::to_string(row.W_unpadded) : "NA",
              ok ? std::to_string(row.units) : "NA", ok ? std::to_string(row.components) : "NA",
              na_or(row.l2_interp.value, ok), na_or(row.l2_interp.stderr_, ok), na_or(row.terms.interp.stderr_, ok),
              na_or(row.terms.interp_tail.stderr_, ok), na_or(row.terms.network_gap.stderr_, ok),
              na_or(row.terms.network_tail.stderr_, ok), na_or(row.gap_bound, ok)})
            s += "," + v;
        s += "\n";
    }
    return s;
}

Json rates_json(const SweepResult& r) {
    auto fit = [](const std::optional<RateFit>& f) -> Json {
        if (!f) return nullptr;
        return Json{{"slope", format_double(f->slope)},
                    {"intercept", format_double(f->intercept)},
                    {"r_squared", format_double(f->r_squared)},
                    {"slope_stderr", format_double(f->slope_stderr)},
                    {"points", f->points.size()}};
    };
    return Json{{"error_vs_solvers", fit(r.error_vs_solvers)},
                {"error_vs_W", fit(r.error_vs_size)},
                {"interp_error_vs_solvers", fit(r.interp_error_vs_solvers)},
                {"sample_dims", r.sample_dims}};
}

int cmd_plan(const Experiment& ex) {
    const auto& cfg = ex.config();
    const std::string dir = ex.out_dir();
    std::string stats = "xi,lambda_size,n_triples,n_unique_points,m1,m_active,max_sigma,n_triples_recount\n";
    for (std::size_t i = 0; i < cfg.xi_sweep.size(); ++i) {
        const auto plan = ex.plan(cfg.xi_sweep[i]);
        const auto st = plan_stats(plan);
        const Json j{{"kind", "plan"}, {"config_hash", cfg.hash()}, {"plan", plan_to_json(plan)}};
        write_json(dir + "/plans/plan_" + std::to_string(i) + ".json", j);
        stats += format_double(plan.xi) + "," + std::to_string(st.lambda_size) + "," + std::to_string(st.triple_count) +
                 "," + std::to_string(st.unique_points) + "," + std::to_string(st.m1) + "," +
                 std::to_string(st.m_active) + "," + format_double(st.max_sigma) + "," +
                 std::to_string(count_triples(plan.lambda_set)) + "\n";
    }
    write_text(dir + "/plan_stats.csv", stats);
    return kExitOk;
}

namespace {

struct LoadedPlan {
    Json json;
    std::shared_ptr<const CollocationPlan> plan;
    std::string hash;
};

LoadedPlan load_plan(const Experiment& ex, const std::string& path) {
    LoadedPlan lp;
    lp.json = load_artifact(path, "plan", ex.config().hash());
    lp.plan = std::make_shared<const CollocationPlan>(plan_from_json(lp.json.at("plan")));
    lp.hash = json_hash(lp.json.at("plan"));
    return lp;
}

Mat load_samples(const Experiment& ex, const std::string& path, const LoadedPlan& lp) {
    const Json j = load_artifact(path, "samples", ex.config().hash());
    if (j.value("plan_hash", "") != lp.hash) throw ConfigError(path + ": samples belong to a different plan");
    Mat v = matrix_from_json(j.at("values"), "samples.values");
    if (v.rows != lp.plan->points.size()) throw ConfigError(path + ": one sample row per grid point required");
    return v;
}

}  // namespace

int cmd_solve(const Experiment& ex, const std::string& plan_path) {
    const auto lp = load_plan(ex, plan_path);
    const Mat values = ex.solve(*lp.plan);
    const std::string dir = ex.out_dir();
    const Json j{{"kind", "samples"},
                 {"config_hash", ex.config().hash()},
                 {"plan_hash", lp.hash},
                 {"n_points", values.rows},
                 {"value_dim", values.cols},
                 {"values", matrix_to_json(values)}};
    write_json(dir + "/samples.json", j);
    if (ex.options().dump_solutions) {
        const double h = ex.solver().problem().h();
        for (std::size_t p = 0; p < values.rows; ++p) {
            Mat xu(values.cols, 2);
            for (std::size_t i = 0; i < values.cols; ++i) {
                xu(i, 0) = static_cast<double>(i) * h;
                xu(i, 1) = values(p, i);
            }
            write_text(dir + "/solutions/point_" + std::to_string(p) + ".csv", csv_matrix(xu, {"x", "u"}));
        }
    }
    return kExitOk;
}

int cmd_compile(const Experiment& ex, const std::string& plan_path, const std::string& samples_path) {
    const auto lp = load_plan(ex, plan_path);
    Mat values = load_samples(ex, samples_path, lp);
    const double omega = ex.omega(lp.plan->xi);
    const DeltaInfo d = ex.delta(*lp.plan, omega);
    const Surrogate phi(lp.plan, std::move(values), omega, d.delta, ex.options().threads);
    Json nets = Json::array();
    Json labels = Json::array();
    for (std::size_t u = 0; u < phi.unit_count(); ++u) {
        nets.push_back(network_to_json(phi.build_unit_network(u)));
        labels.push_back(Json{{"s_minus_e", phi.unit(u).s_minus_e.str()}, {"k", phi.unit(u).k}});
    }
    std::vector<std::uint32_t> map(lp.plan->triples.size());
    for (std::size_t t = 0; t < map.size(); ++t) map[t] = phi.unit_of_triple(t);
    const Json j{{"kind", "bundle"},
                 {"config_hash", ex.config().hash()},
                 {"plan_hash", lp.hash},
                 {"xi", format_double(lp.plan->xi)},
                 {"omega", format_double(omega)},
                 {"delta", format_double(d.delta)},
                 {"log_inv_delta_formula", format_double(d.log_inv_delta)},
                 {"input_dim", phi.input_dim()},
                 {"meta", {{"W", phi.bundle_size()}, {"W_unpadded", phi.bundle_unpadded_size()}, {"L", phi.bundle_depth()}}},
                 {"labels", labels},
                 {"triple_network", map},
                 {"networks", nets}};
    write_json(ex.out_dir() + "/bundle.json", j);
    return kExitOk;
}

int cmd_evaluate(const Experiment& ex, const std::string& plan_path, const std::string& samples_path,
                 const std::string& mode) {
    if (mode != "interpolant" && mode != "network") throw ConfigError("mode: expected interpolant or network");
    const auto lp = load_plan(ex, plan_path);
    Mat values = load_samples(ex, samples_path, lp);
    const std::size_t dims =
        std::max<std::size_t>(1, static_cast<std::size_t>(lp.plan->m_active) + ex.config().mc.tail_dims);
    const SweepRow r = evaluate_plan(ex, lp.plan, std::move(values), dims, mode == "network");
    write_text(ex.out_dir() + "/report_" + mode + ".csv", csv_report(r, mode == "network", ex.options().timing));
    return kExitOk;
}

int cmd_sweep(const Experiment& ex) {
    const SweepResult r = run_sweep(ex);
    const std::string dir = ex.out_dir();
    write_text(dir + "/sweep.csv", sweep_csv(r, ex.options().timing));
    write_text(dir + "/sweep_details.csv", sweep_details_csv(r));
    write_json(dir + "/rates.json", rates_json(r));
    for (const auto& row : r.rows)
        if (!row.ok) return kExitNumeric;
    return kExitOk;
}

int cmd_net_eval(const std::string& net_path, const std::string& points_path, const std::string& out_path) {
    const ReluNetwork net = network_from_json(read_json(net_path));
    const Mat X = read_csv_matrix(points_path);
    if (X.rows > 0 && X.cols != net.input_dim())
        throw ConfigError(points_path + ": " + std::to_string(X.cols) + " columns, network expects " +
                          std::to_string(net.input_dim()));
    const Mat Y = net.eval_batch(X);
    std::vector<std::string> header;
    for (std::size_t o = 0; o < Y.cols; ++o) header.push_back("out" + std::to_string(o + 1));
    write_text(out_path, csv_matrix(Y, header));
    return kExitOk;
}

int report_failure(const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    if (dynamic_cast<const ConfigError*>(&ex) || dynamic_cast<const DomainError*>(&ex)) return kExitConfig;
    return kExitNumeric;
}

}  // namespace rc
