#include "relucoll/error_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relucoll/errors.hpp"
#include "relucoll/hermite.hpp"
#include "relucoll/parallel.hpp"
#include "relucoll/rng.hpp"

namespace rc {

double euclidean_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

BatchFn pointwise(PointFn f, int threads) {
    return [f = std::move(f), threads](const Mat& Y) {
        std::vector<std::vector<double>> rows(Y.rows);
        parallel_for(Y.rows, threads, [&](std::size_t i) {
            try {
                rows[i] = f(Y.row(i));
            } catch (const std::exception& ex) {
                throw NumericError("evaluation failed at sample " + std::to_string(i) + ": " + ex.what());
            }
        });
        const std::size_t d = Y.rows ? rows[0].size() : 0;
        Mat out(Y.rows, d);
        for (std::size_t i = 0; i < Y.rows; ++i) {
            if (rows[i].size() != d) throw NumericError("evaluator returned inconsistent dimensions");
            std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
        }
        return out;
    };
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

Estimate root_mean(std::span<const double> ws) {
    Estimate e;
    e.samples = ws.size();
    if (ws.size() < 2) throw DomainError("Monte Carlo estimate needs at least 2 samples");
    const double n = static_cast<double>(ws.size());
    const double mean = pairwise_sum(ws) / n;
    std::vector<double> dev(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) dev[i] = (ws[i] - mean) * (ws[i] - mean);
    const double var = pairwise_sum(dev) / (n - 1.0);
    e.value = std::sqrt(std::max(mean, 0.0));
    // d sqrt(m) = dm / (2 sqrt(m))
    e.stderr_ = e.value > 0.0 ? std::sqrt(var / n) / (2.0 * e.value) : 0.0;
    return e;
}

Mat gaussian_samples(std::size_t n, std::size_t dims, std::uint64_t seed, const std::string& purpose) {
    Mat Y(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream s(seed, purpose, i);
        for (std::size_t j = 0; j < dims; ++j) Y(i, j) = s.normal();
    }
    return Y;
}

Mat box_samples(std::size_t n, std::size_t dims, std::size_t box_dims, double half, std::uint64_t seed,
                const std::string& purpose) {
    if (!(half > 0.0)) throw DomainError("box_samples: box half-width must be positive");
    Mat Y(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream s(seed, purpose, i);
        for (std::size_t j = 0; j < dims; ++j) {
            double y = s.normal();
            if (j < box_dims)
                while (std::abs(y) > half) y = s.normal();
            Y(i, j) = y;
        }
    }
    return Y;
}

Mat uniform_box_samples(std::size_t n, std::size_t dims, std::size_t box_dims, double half, std::uint64_t seed,
                        const std::string& purpose) {
    Mat Y(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream s(seed, purpose, i);
        for (std::size_t j = 0; j < dims; ++j) Y(i, j) = j < box_dims ? half * (2.0 * s.uniform() - 1.0) : s.normal();
    }
    return Y;
}

double box_probability_1d(double half) { return std::erf(half / std::sqrt(2.0)); }

namespace {

// |Y| conditioned on |Y| > a (Marsaglia's tail method), with a random sign.
double tail_normal(SampleStream& s, double a) {
    for (;;) {
        const double u1 = s.uniform();
        const double u2 = s.uniform();
        const double x = std::sqrt(a * a - 2.0 * std::log(u1));
        if (u2 * x < a) return s.uniform() < 0.5 ? -x : x;
    }
}

}  // namespace

WeightedSamples outside_samples(std::size_t n, std::size_t dims, std::size_t box_dims, double half,
                                std::uint64_t seed, const std::string& purpose) {
    if (box_dims == 0 || box_dims > dims) throw DomainError("outside_samples: box dimension out of range");
    if (!(half > 0.0)) throw DomainError("outside_samples: box half-width must be positive");
    const double p_tail = std::erfc(half / std::sqrt(2.0));
    WeightedSamples out{Mat(n, dims), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        SampleStream s(seed, purpose, i);
        const std::size_t pick = std::min(box_dims - 1, static_cast<std::size_t>(s.uniform() * static_cast<double>(box_dims)));
        std::size_t outside = 0;
        for (std::size_t j = 0; j < dims; ++j) {
            const double y = j == pick ? tail_normal(s, half) : s.normal();
            out.points(i, j) = y;
            if (j < box_dims && std::abs(y) > half) ++outside;
        }
        // Proposal density g(y) N(y) / (m p_tail), N = coordinates outside.
        out.weights[i] = static_cast<double>(box_dims) * p_tail / static_cast<double>(outside);
    }
    return out;
}

Estimate l2_from_values(const Mat& a, const Mat& b, const NormFn& norm, std::span<const double> weights) {
    if (!b.data.empty() && (a.rows != b.rows || a.cols != b.cols))
        throw DomainError("l2 estimate: value shapes differ");
    if (!weights.empty() && weights.size() != a.rows) throw DomainError("l2 estimate: one weight per sample");
    std::vector<double> sq(a.rows);
    std::vector<double> diff(a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t d = 0; d < a.cols; ++d) diff[d] = a(i, d) - (b.data.empty() ? 0.0 : b(i, d));
        const double nv = norm(diff);
        sq[i] = nv * nv * (weights.empty() ? 1.0 : weights[i]);
    }
    return root_mean(sq);
}

Estimate mc_l2_error(const BatchFn& truth, const BatchFn& approx, std::size_t dims, std::size_t n, std::uint64_t seed,
                     const NormFn& norm) {
    if (n < 2) throw DomainError("mc_l2_error: n_samples must be at least 2");
    const Mat Y = gaussian_samples(n, dims, seed, "l2");
    return l2_from_values(truth(Y), approx(Y), norm);
}

double weighted_sup_error(const BatchFn& truth, const BatchFn& approx, std::size_t dims, std::size_t n,
                          std::uint64_t seed, double half, std::size_t box_dims, const NormFn& norm) {
    auto scan = [&](const Mat& Y) {
        const Mat a = truth(Y);
        const Mat b = approx(Y);
        if (a.rows != b.rows || a.cols != b.cols) throw DomainError("weighted_sup_error: value shapes differ");
        double mx = 0.0;
        std::vector<double> diff(a.cols);
        for (std::size_t i = 0; i < Y.rows; ++i) {
            for (std::size_t d = 0; d < a.cols; ++d) diff[d] = a(i, d) - b(i, d);
            const double nv = norm(diff);
            if (nv == 0.0) continue;
            mx = std::max(mx, nv * std::exp(0.5 * log_gaussian_density(Y.row(i))));
        }
        return mx;
    };
    double mx = scan(gaussian_samples(n, dims, seed, "sup-gauss"));
    if (half > 0.0 && box_dims > 0) mx = std::max(mx, scan(uniform_box_samples(n, dims, box_dims, half, seed, "sup-box")));
    return mx;
}

BatchFn interpolant_fn(const SparseInterpolant& interp, int threads) {
    return pointwise([&interp](std::span<const double> y) { return interp.evaluate(y); }, threads);
}

BatchFn truncated_interpolant_fn(const SparseInterpolant& interp, double omega, int threads) {
    return pointwise([&interp, omega](std::span<const double> y) { return interp.evaluate_truncated(y, omega); },
                     threads);
}

BatchFn surrogate_fn(const Surrogate& phi, int threads) {
    return [&phi, threads](const Mat& Y) { return phi.evaluate_batch(Y, threads); };
}

Estimate network_gap(const SparseInterpolant& interp, const Surrogate& phi, std::size_t dims, std::size_t n,
                     std::uint64_t seed, const NormFn& norm, int threads) {
    const std::size_t m = interp.box_dim();
    const double half = 2.0 * std::sqrt(phi.omega());
    const Mat Y = box_samples(n, std::max(dims, m), m, half, seed, "box");
    const double pb = std::pow(box_probability_1d(half), static_cast<double>(m));
    std::vector<double> w(n, pb);
    return l2_from_values(truncated_interpolant_fn(interp, phi.omega(), threads)(Y), phi.evaluate_batch(Y, threads),
                          norm, w);
}

Decomposition error_decomposition(const BatchFn& truth, const SparseInterpolant& interp, const Surrogate& phi,
                                  std::size_t dims, std::size_t n, std::uint64_t seed, const NormFn& norm,
                                  int threads) {
    const std::size_t m = interp.box_dim();
    if (dims < m) throw DomainError("error_decomposition: sample dimension below the active dimension");
    const double omega = phi.omega();
    const double half = 2.0 * std::sqrt(omega);
    Decomposition d;
    d.box_probability = std::pow(box_probability_1d(half), static_cast<double>(m));

    const Mat G = gaussian_samples(n, dims, seed, "l2");
    d.interp = l2_from_values(truth(G), interpolant_fn(interp, threads)(G), norm);

    const auto out = outside_samples(n, dims, m, half, seed, "outside");
    d.interp_tail = l2_from_values(interpolant_fn(interp, threads)(out.points), Mat(), norm, out.weights);
    d.network_tail = l2_from_values(phi.evaluate_batch(out.points, threads), Mat(), norm, out.weights);

    d.network_gap = network_gap(interp, phi, dims, n, seed, norm, threads);
    return d;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 3) throw DomainError("rate_fit: at least 3 points required");
    RateFit f;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto [x, e] = series[i];
        if (!(x > 0.0) || !(e > 0.0)) throw DomainError("rate_fit: x and error must be positive");
        if (i > 0 && !(x > series[i - 1].first)) throw DomainError("rate_fit: x must be strictly increasing");
        f.points.emplace_back(std::log(x), std::log(e));
    }
    const double n = static_cast<double>(f.points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : f.points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : f.points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (const auto& [x, y] : f.points) {
        const double r = y - (f.intercept + f.slope * x);
        sse += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    f.slope_stderr = f.points.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return f;
}

}  // namespace rc
