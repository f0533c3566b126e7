// Acceptance run: one PASS/FAIL line per criterion, with its runtime.  The
// exit status is non-zero when any criterion fails.

#include <CLI11.hpp>
#include <boost/random/sobol.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "relucoll/error_lab.hpp"
#include "relucoll/hermite.hpp"
#include "relucoll/lagrange.hpp"
#include "relucoll/product_net.hpp"
#include "relucoll/runner.hpp"
#include "relucoll/serialize.hpp"
#include "support/properties.hpp"

using namespace rc;
namespace fs = std::filesystem;
using props::str;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& msg) {
        if (!cond) {
            if (!detail.empty()) detail += "; ";
            detail += msg;
            ok = false;
        }
    }
    void note(const std::string& msg) {
        if (!detail.empty()) detail += "; ";
        detail += msg;
    }
};

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs > budget_s) o.require(false, str("runtime ", secs, " s over budget ", budget_s, " s"));
    if (!o.ok) ++failures;
    std::printf("%s %d %s (%.2f s): %s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
}

double log_slope(const std::vector<std::pair<double, double>>& pts) { return rate_fit(pts).slope; }

// 1. Sparse interpolation reproduces H_s for s in the index set.
Outcome interpolation_exactness() {
    Outcome o;
    WeightModel w = WeightModel::with_defaults(1.0, 2.0, 2.0);
    w.rho_explicit.clear();
    for (int j = 1; j <= 2000; ++j) w.rho_explicit.push_back(1.0 + j);
    double best_xi = 0;
    std::size_t best = 0;
    for (double xi = 20; xi <= 80; xi += 1) {
        const std::size_t n = build_lambda(xi, w).size();
        if (best == 0 || std::abs(double(n) - 100.0) < std::abs(double(best) - 100.0)) best = n, best_xi = xi;
    }
    auto plan = std::make_shared<const CollocationPlan>(build_plan(best_xi, w));
    const std::size_t m = std::max<std::size_t>(1, plan->m_active);
    const Mat Y = gaussian_samples(1000, m, 2024, "exactness");
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        SampleStream rs(5, "exactness-pick", t);
        const auto& s = plan->lambda_set[static_cast<std::size_t>(rs.uniform() * plan->lambda_set.size())];
        const SparseInterpolant I = sparse_interpolate(
            plan, [&](const std::vector<double>& y) { return std::vector<double>{hermite_tensor_eval(s, y)}; });
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < Y.rows; ++i) {
            const double h = hermite_tensor_eval(s, Y.row(i));
            err = std::max(err, std::abs(I.evaluate(Y.row(i))[0] - h));
            scale = std::max(scale, std::abs(h));
        }
        worst = std::max(worst, err / scale);
    }
    o.note(str("xi=", best_xi, " |Lambda|=", plan->lambda_set.size(), " max relative error=", worst));
    o.require(plan->lambda_set.size() >= 80 && plan->lambda_set.size() <= 120, "index set size not near 100");
    o.require(worst <= 1e-8, "relative error above 1e-8");
    return o;
}

// 2. Product networks on Sobol points, and exact zeros.
Outcome product_certification() {
    Outcome o;
    double worst_ratio = 0.0;
    for (std::size_t d : {2u, 4u, 8u})
        for (double delta : {1e-2, 1e-3}) {
            const auto net = product_net(d, delta);
            boost::random::sobol gen(d);
            const double scale = 1.0 / (static_cast<double>(gen.max()) + 1.0);
            const std::size_t n = 10000;
            Mat X(n, d);
            std::vector<double> want(n, 1.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    X(i, j) = 2.0 * (static_cast<double>(gen()) * scale) - 1.0;
                    want[i] *= X(i, j);
                }
            const Mat Y = net.eval_batch(X);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(Y(i, 0) - want[i]));
            worst_ratio = std::max(worst_ratio, err / delta);
            o.require(err <= delta, str("d=", d, " delta=", delta, " error=", err));
            // Zero one coordinate of every point.
            for (std::size_t i = 0; i < n; ++i) X(i, i % d) = (i % 2) ? 0.0 : -0.0;
            const Mat Z = net.eval_batch(X);
            for (std::size_t i = 0; i < n; ++i)
                if (Z(i, 0) != 0.0) {
                    o.require(false, str("d=", d, " delta=", delta, " nonzero output ", Z(i, 0), " at a zero"));
                    break;
                }
        }
    o.note(str("max error/delta=", worst_ratio));
    return o;
}

Experiment acceptance_experiment(const std::string& config, const std::string& out, int threads) {
    RunOptions opts;
    opts.out = out;
    opts.threads = threads;
    return Experiment(load_config(config), opts);
}

// 3. Measured surrogate gap against the explicit delta bound.
Outcome surrogate_agreement(const std::string& config, const std::string& work) {
    Outcome o;
    const auto ex = acceptance_experiment(config, work + "/gap", 1);
    double worst = 0.0;
    for (double xi : {5.0, 12.0, 30.0, 80.0, 200.0}) {
        auto plan = std::make_shared<const CollocationPlan>(ex.plan(xi));
        Mat values = ex.solve(*plan);
        const double omega = ex.omega(xi);
        const DeltaInfo d = ex.delta(*plan, omega);
        const SparseInterpolant interp(plan, values);
        const Surrogate phi(plan, values, omega, d.delta);
        std::vector<double> norms(values.rows);
        for (std::size_t p = 0; p < values.rows; ++p) norms[p] = ex.norm()(values.row(p));
        const double bound = phi.gap_bound(norms);
        const std::size_t m = interp.box_dim();
        const Mat Y = box_samples(256, m, m, 2.0 * std::sqrt(omega), ex.seed(), "acceptance-gap");
        const Mat A = truncated_interpolant_fn(interp, omega)(Y);
        const Mat B = phi.evaluate_batch(Y);
        double gap = 0.0;
        std::vector<double> diff(A.cols);
        for (std::size_t i = 0; i < Y.rows; ++i) {
            for (std::size_t c = 0; c < A.cols; ++c) diff[c] = A(i, c) - B(i, c);
            gap = std::max(gap, ex.norm()(diff));
        }
        const Estimate l2 = network_gap(interp, phi, m, 256, ex.seed(), ex.norm());
        worst = std::max(worst, gap / bound);
        o.require(gap <= bound, str("xi=", xi, " max gap ", gap, " > bound ", bound));
        o.require(l2.value <= bound, str("xi=", xi, " L2 gap ", l2.value, " > bound ", bound));
    }
    o.note(str("max measured/bound=", worst));
    return o;
}

struct SweepData {
    SweepResult result;
    std::string dir;
};

// 4. Rate of the L2 error against the number of solves.
Outcome convergence_rate(const SweepData& s) {
    Outcome o;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : s.result.rows) {
        o.require(r.ok, str("xi=", r.xi, " failed: ", r.error));
        if (r.ok) pts.emplace_back(double(r.n_solvers), r.l2.value);
    }
    if (!o.ok) return o;
    o.require(pts.front().first <= 16 && pts.back().first >= 1000, "solver counts do not span ~[8, 2000]");
    const auto fit = rate_fit(pts);
    o.note(str("|G| ", pts.front().first, "..", pts.back().first, " slope=", fit.slope, " +- ", fit.slope_stderr));
    o.require(fit.slope <= -0.7, "slope above -0.7");
    const auto& rows = s.result.rows;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double noise = 3.0 * std::hypot(rows[i].l2.stderr_, rows[i - 1].l2.stderr_);
        o.require(rows[i].l2.value <= rows[i - 1].l2.value + noise,
                  str("error rises beyond noise at xi=", rows[i].xi));
    }
    return o;
}

// 5. Bundle size and depth against the asymptotic envelopes.
Outcome size_scaling(const SweepData& s, double theta_q) {
    Outcome o;
    double wlo = INFINITY, whi = 0, llo = INFINITY, lhi = 0;
    for (const auto& r : s.result.rows) {
        if (!r.ok) continue;
        const double lx = std::log(r.xi);
        const double rw = r.W / (std::pow(r.xi, 1.0 + 2.0 / theta_q) * lx);
        const double rl = r.L / (std::pow(r.xi, 1.0 / theta_q) * lx * lx);
        wlo = std::min(wlo, rw), whi = std::max(whi, rw);
        llo = std::min(llo, rl), lhi = std::max(lhi, rl);
    }
    o.note(str("W ratio range ", wlo, "..", whi, " (factor ", whi / wlo, "), L ratio range ", llo, "..", lhi,
               " (factor ", lhi / llo, ")"));
    o.require(whi / wlo < 5.0, "W ratio varies by a factor of 5 or more");
    o.require(lhi / llo < 5.0, "L ratio varies by a factor of 5 or more");
    return o;
}

// 6. Outside-box terms against omega for a fixed plan.
Outcome truncation_decay(const std::string& config, const std::string& work) {
    Outcome o;
    const auto ex = acceptance_experiment(config, work + "/decay", 1);
    auto plan = std::make_shared<const CollocationPlan>(ex.plan(30.0));
    const Mat values = ex.solve(*plan);
    const SparseInterpolant interp(plan, values);
    const std::size_t dims = interp.box_dim() + ex.config().mc.tail_dims;
    std::vector<std::pair<double, double>> t2, t4;
    std::string series;
    for (double omega : {2.0, 4.0, 8.0, 16.0}) {
        const DeltaInfo d = ex.delta(*plan, omega);
        const Surrogate phi(plan, values, omega, d.delta);
        const auto dec = error_decomposition(ex.truth_fn(), interp, phi, dims, ex.config().mc.n_samples, ex.seed(),
                                             ex.norm());
        t2.emplace_back(omega, dec.interp_tail.value);
        t4.emplace_back(omega, dec.network_tail.value);
        series += str(" w=", omega, ":", dec.interp_tail.value, "/", dec.network_tail.value);
    }
    // Log-linear in omega: regress log(term) on omega itself.
    auto semilog = [](const std::vector<std::pair<double, double>>& p) {
        std::vector<std::pair<double, double>> q;
        for (const auto& [x, y] : p) q.emplace_back(std::exp(x), y);
        return log_slope(q);
    };
    const double s2 = semilog(t2), s4 = semilog(t4);
    o.note(str("slopes d(log term)/d(omega): term2=", s2, " term4=", s4, ";", series));
    o.require(s2 < 0.0, "term 2 does not decay");
    o.require(s4 < 0.0, "term 4 does not decay");
    return o;
}

// 7. Invariant suites.
Outcome invariants() {
    Outcome o;
    auto check = [&](const std::string& name, const props::Check& c) { o.require(c.ok, name + ": " + c.detail); };
    check("cramer", props::cramer_bound(60));
    check("orthonormality", props::hermite_orthonormality(30));
    check("nodes", props::node_structure(100));
    const auto w1 = props::weights_for(1.0, 2.0, 2.0), w23 = props::weights_for(2.0 / 3.0, 2.5, 2.0);
    for (const auto* w : {&w1, &w23}) {
        for (double xi : {3.0, 40.0, 500.0}) {
            check(str("sigma q=", w->q, " xi=", xi), props::sigma_monotone(*w, xi));
            check(str("closure q=", w->q, " xi=", xi), props::downward_closed(*w, xi));
            check(str("triples q=", w->q, " xi=", xi), props::triple_count(*w, xi));
        }
        check(str("cardinality q=", w->q), props::cardinality_linear(*w, 10.0, w->q == 1.0));
        check(str("weighted sum q=", w->q), props::weighted_sum_linear(*w, 2.0, 2000.0));
    }
    check("lagrange", props::lagrange_bounds(30));
    check("network algebra", props::network_algebra(1000));
    check("zero annihilation", props::product_zero_annihilation());
    if (o.ok) o.note("all suites green");
    return o;
}

// 8. Sweep artifacts are byte-identical across reruns and thread counts.
Outcome determinism(const std::string& config, const SweepData& serial, const std::string& work) {
    Outcome o;
    const std::string again = work + "/sweep_again", par = work + "/sweep_par4";
    cmd_sweep(acceptance_experiment(config, again, 1));
    cmd_sweep(acceptance_experiment(config, par, 4));
    for (const char* f : {"/sweep.csv", "/sweep_details.csv", "/rates.json"}) {
        const std::string ref = read_text(serial.dir + f);
        o.require(read_text(again + f) == ref, str(f, " differs on rerun"));
        o.require(read_text(par + f) == ref, str(f, " differs with 4 threads"));
    }
    if (o.ok) o.note("sweep.csv, sweep_details.csv, rates.json identical (rerun, 4 threads)");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string work = "acceptance_work";
    std::string config = RELUCOLL_ACCEPTANCE_CONFIG;
    app.add_option("--workdir", work, "Scratch directory");
    app.add_option("--config", config, "Experiment configuration for the sweep criteria")->check(CLI::ExistingFile);
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(work);

    run(1, "interpolation exactness", 10, interpolation_exactness);
    run(2, "product-network certification", 30, product_certification);
    run(3, "surrogate-interpolant agreement", 120, [&] { return surrogate_agreement(config, work); });

    SweepData sweep;
    sweep.dir = work + "/sweep";
    const auto ex = acceptance_experiment(config, sweep.dir, 1);
    run(4, "convergence rate", 600, [&] {
        sweep.result = run_sweep(ex);
        write_text(sweep.dir + "/sweep.csv", sweep_csv(sweep.result, false));
        write_text(sweep.dir + "/sweep_details.csv", sweep_details_csv(sweep.result));
        write_json(sweep.dir + "/rates.json", rates_json(sweep.result));
        return convergence_rate(sweep);
    });
    const double theta_q = ex.config().weights.theta * ex.config().weights.q;
    run(5, "size and depth scaling", 0, [&] { return size_scaling(sweep, theta_q); });
    run(6, "truncation decay", 120, [&] { return truncation_decay(config, work); });
    run(7, "invariant suites", 60, invariants);
    run(8, "determinism", 0, [&] { return determinism(config, sweep, work); });

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
