#pragma once
// Monte Carlo estimation of Bochner L2(gamma) norms, sampled sqrt(g)-weighted
// sup norms, the four-term error split, and log-log rate regression.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relucoll/lagrange.hpp"
#include "relucoll/matrix.hpp"
#include "relucoll/surrogate.hpp"

namespace rc {

// Maps a batch of points (rows) to a batch of X-vectors (rows).
using BatchFn = std::function<Mat(const Mat&)>;
using PointFn = std::function<std::vector<double>(std::span<const double>)>;
using NormFn = std::function<double(std::span<const double>)>;

double euclidean_norm(std::span<const double> v);

// Evaluates a pointwise function over the rows of a batch via parallel_for.
// Failures are rethrown as NumericError naming the sample index.
BatchFn pointwise(PointFn f, int threads = 1);

// Order-independent summation.
double pairwise_sum(std::span<const double> v);

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

// sqrt(mean(w_i x_i)) with the delta-method standard error.
Estimate root_mean(std::span<const double> weighted_squares);

// Standard Gaussian points, one row per sample.
Mat gaussian_samples(std::size_t n, std::size_t dims, std::uint64_t seed, const std::string& purpose);

// Gaussian points conditioned on |y_j| <= half for j < box_dims.
Mat box_samples(std::size_t n, std::size_t dims, std::size_t box_dims, double half, std::uint64_t seed,
                const std::string& purpose);
// Uniform on the box in the first box_dims coordinates, Gaussian elsewhere.
Mat uniform_box_samples(std::size_t n, std::size_t dims, std::size_t box_dims, double half, std::uint64_t seed,
                        const std::string& purpose);

// Importance samples of gamma restricted to the complement of the box:
// int_{outside} F dgamma = E[F(Y) weight(Y)].
struct WeightedSamples {
    Mat points;
    std::vector<double> weights;
};
WeightedSamples outside_samples(std::size_t n, std::size_t dims, std::size_t box_dims, double half,
                                std::uint64_t seed, const std::string& purpose);

// P(|Y| <= half) for one standard Gaussian coordinate.
double box_probability_1d(double half);

// sqrt(mean ||a_i - b_i||^2 w_i); b may be empty (difference to zero).
Estimate l2_from_values(const Mat& a, const Mat& b, const NormFn& norm, std::span<const double> weights = {});

Estimate mc_l2_error(const BatchFn& truth, const BatchFn& approx, std::size_t dims, std::size_t n, std::uint64_t seed,
                     const NormFn& norm = euclidean_norm);

// max ||truth - approx|| sqrt(g(y)) over n Gaussian samples and n samples
// uniform in the box [-half, half]^box_dims (half <= 0 skips the box part).
// A sampled maximum is a lower bound for the essential supremum.
double weighted_sup_error(const BatchFn& truth, const BatchFn& approx, std::size_t dims, std::size_t n,
                          std::uint64_t seed, double half = 0.0, std::size_t box_dims = 0,
                          const NormFn& norm = euclidean_norm);

struct Decomposition {
    Estimate interp;        // ||v - I v||, whole space
    Estimate interp_tail;   // ||I v|| outside the box
    Estimate network_gap;   // ||I^omega v - Phi v|| inside the box
    Estimate network_tail;  // ||Phi v|| outside the box
    double box_probability = 1.0;
};

Decomposition error_decomposition(const BatchFn& truth, const SparseInterpolant& interp, const Surrogate& phi,
                                  std::size_t dims, std::size_t n, std::uint64_t seed,
                                  const NormFn& norm = euclidean_norm, int threads = 1);

// The inside-box term alone (used where only the gap is needed).
Estimate network_gap(const SparseInterpolant& interp, const Surrogate& phi, std::size_t dims, std::size_t n,
                     std::uint64_t seed, const NormFn& norm = euclidean_norm, int threads = 1);

// Batch evaluators over an interpolant or surrogate.
BatchFn interpolant_fn(const SparseInterpolant& interp, int threads = 1);
BatchFn truncated_interpolant_fn(const SparseInterpolant& interp, double omega, int threads = 1);
BatchFn surrogate_fn(const Surrogate& phi, int threads = 1);

struct RateFit {
    std::vector<std::pair<double, double>> points;  // (log x, log error)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
};

RateFit rate_fit(const std::vector<std::pair<double, double>>& series);

}  // namespace rc
