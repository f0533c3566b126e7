#include <doctest.h>

#include <filesystem>

#include "relucoll/errors.hpp"
#include "relucoll/runner.hpp"
#include "relucoll/serialize.hpp"

using namespace rc;
namespace fs = std::filesystem;

namespace {

Json base_config() { return read_json(std::string(RELUCOLL_TEST_DATA) + "/small_config.json"); }

std::string workdir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "relucoll_test_runner" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

Experiment experiment(const Json& j, const std::string& out, int threads = 1) {
    RunOptions o;
    o.out = out;
    o.threads = threads;
    return Experiment(parse_config(j), o);
}

}  // namespace

TEST_CASE("stage pipeline through files") {
    const std::string dir = workdir("pipeline");
    const auto ex = experiment(base_config(), dir);
    CHECK(cmd_plan(ex) == kExitOk);
    for (int i = 0; i < 3; ++i) CHECK(fs::exists(dir + "/plans/plan_" + std::to_string(i) + ".json"));

    // The stats rows carry |G| and an independent recount.
    const std::string stats = read_text(dir + "/plan_stats.csv");
    std::istringstream in(stats);
    std::string line;
    std::getline(in, line);
    CHECK(line == "xi,lambda_size,n_triples,n_unique_points,m1,m_active,max_sigma,n_triples_recount");
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
        REQUIRE(f.size() == 8);
        CHECK(f[2] == f[7]);
        ++rows;
    }
    CHECK(rows == 3);

    const std::string plan = dir + "/plans/plan_2.json";
    CHECK(cmd_solve(ex, plan) == kExitOk);
    const Json samples = read_json(dir + "/samples.json");
    CHECK(samples["kind"] == "samples");
    CHECK(samples["value_dim"].get<int>() == 17);
    CHECK(cmd_compile(ex, plan, dir + "/samples.json") == kExitOk);
    const Json bundle = read_json(dir + "/bundle.json");
    CHECK(bundle["meta"]["W"].get<std::size_t>() > 0);
    CHECK(bundle["meta"]["L"].get<std::size_t>() > 0);
    CHECK(bundle["triple_network"].size() == read_json(plan)["plan"]["triples"].size());
    for (const char* mode : {"interpolant", "network"}) {
        CHECK(cmd_evaluate(ex, plan, dir + "/samples.json", mode) == kExitOk);
        CHECK(fs::exists(dir + "/report_" + std::string(mode) + ".csv"));
    }
    CHECK_THROWS_AS(cmd_evaluate(ex, plan, dir + "/samples.json", "other"), ConfigError);

    // A network from the bundle evaluates through files.
    write_json(dir + "/net.json", bundle["networks"][0]);
    const std::size_t in_dim = bundle["input_dim"].get<std::size_t>();
    std::string pts;
    for (int p = 0; p < 4; ++p) {
        for (std::size_t j = 0; j < in_dim; ++j) pts += (j ? "," : "") + format_double(0.25 * p - 0.5);
        pts += "\n";
    }
    write_text(dir + "/pts.csv", pts);
    CHECK(cmd_net_eval(dir + "/net.json", dir + "/pts.csv", dir + "/net_out.csv") == kExitOk);
    CHECK(read_csv_matrix(dir + "/net_out.csv").rows == 4);

    // Stage reruns are byte-identical.
    const std::string first = read_text(dir + "/bundle.json");
    const std::string first_samples = read_text(dir + "/samples.json");
    CHECK(cmd_solve(ex, plan) == kExitOk);
    CHECK(cmd_compile(ex, plan, dir + "/samples.json") == kExitOk);
    CHECK(read_text(dir + "/samples.json") == first_samples);
    CHECK(read_text(dir + "/bundle.json") == first);
}

TEST_CASE("artifacts from another configuration are rejected") {
    const std::string dir = workdir("mismatch");
    const auto ex = experiment(base_config(), dir);
    CHECK(cmd_plan(ex) == kExitOk);
    Json other = base_config();
    other["mc"]["seed"] = 99;
    const auto ex2 = experiment(other, dir + "/other");
    CHECK_THROWS_AS(cmd_solve(ex2, dir + "/plans/plan_0.json"), ConfigError);
    CHECK_THROWS_AS(cmd_solve(ex, dir + "/plans/missing.json"), ConfigError);

    // Samples of one plan cannot be paired with another.
    CHECK(cmd_solve(ex, dir + "/plans/plan_0.json") == kExitOk);
    CHECK_THROWS_AS(cmd_compile(ex, dir + "/plans/plan_1.json", dir + "/samples.json"), ConfigError);
}

TEST_CASE("the zero index set needs a single solve") {
    Json j = base_config();
    j["xi_sweep"] = Json::parse("[1.5]");
    j["problem"]["rho"]["explicit"] = Json::parse("[2, 3, 4, 5, 6]");
    j["weights"] = Json::parse(R"({"eta": 3})");
    const auto ex = experiment(j, workdir("zero"));
    const auto plan = ex.plan(1.5);
    CHECK(plan.lambda_set.size() == 1);
    CHECK(ex.solve(plan).rows == 1);
    CHECK(cmd_plan(ex) == kExitOk);
}

TEST_CASE("sweep, rate fit and thread-count determinism") {
    const std::string a = workdir("sweep1"), b = workdir("sweep4");
    const auto ex1 = experiment(base_config(), a, 1);
    const auto ex4 = experiment(base_config(), b, 4);
    CHECK(cmd_sweep(ex1) == kExitOk);
    CHECK(cmd_sweep(ex4) == kExitOk);
    for (const char* f : {"/sweep.csv", "/sweep_details.csv", "/rates.json"})
        CHECK_MESSAGE(read_text(a + f) == read_text(b + f), f);

    const auto r = run_sweep(ex1);
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
        CHECK(row.ok);
        CHECK(row.n_solvers >= row.n_unique);
        CHECK(row.l2.value > 0.0);
        CHECK(row.terms.network_gap.value <= row.gap_bound);
    }
    REQUIRE(r.error_vs_solvers);
    CHECK(r.error_vs_solvers->slope < 0.0);
    CHECK(r.error_vs_size);

    const std::string header = read_text(a + "/sweep.csv").substr(0, read_text(a + "/sweep.csv").find('\n'));
    CHECK(header == "xi,n_solvers,n_unique_points,W,L,l2_error,l2_stderr,sup_error,term1,term2,term3,term4,wall_ms");
}

TEST_CASE("doubling the sample count keeps the slope within its fit error") {
    Json j = base_config();
    j["mc"]["n_samples"] = 64;
    const auto r1 = run_sweep(experiment(base_config(), workdir("n32")));
    const auto r2 = run_sweep(experiment(j, workdir("n64")));
    REQUIRE(r1.error_vs_solvers);
    REQUIRE(r2.error_vs_solvers);
    const double s1 = r1.error_vs_solvers->slope, s2 = r2.error_vs_solvers->slope;
    const double se = std::max(r1.error_vs_solvers->slope_stderr, r2.error_vs_solvers->slope_stderr);
    CHECK_MESSAGE(std::abs(s1 - s2) <= se, s1 << " vs " << s2 << " stderr " << se);
}

TEST_CASE("exit codes") {
    CHECK(report_failure(ConfigError("problem.q: bad")) == kExitConfig);
    CHECK(report_failure(DomainError("x")) == kExitConfig);
    CHECK(report_failure(NumericError("x")) == kExitNumeric);
}
