#include "rambig/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rambig {

namespace {

numvec deviations(const ValueFunction& z, double lambda_bar) {
    if (z.empty()) throw std::invalid_argument("optimal weights: empty value function");
    numvec b(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i])) throw std::invalid_argument("optimal weights: z not finite");
        b[i] = std::abs(z[i] - lambda_bar);
    }
    return b;
}

// returns false when every deviation is zero
bool floored(const numvec& b, numvec& out) {
    const double largest = *std::max_element(b.begin(), b.end());
    if (largest <= 0.0) return false;
    const double floor = kDeviationFloor * largest;
    out.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = std::max(b[i], floor);
    return true;
}

void normalize(numvec& w) {
    double sq = 0.0;
    for (double x : w) sq += x * x;
    const double scale = 1.0 / std::sqrt(sq);
    for (double& x : w) x *= scale;
}

WeightSolution degenerate_solution(numvec b) {
    return {uniform_weights(b.size()), 0.0, std::move(b), true};
}

} // namespace

numvec uniform_weights(std::size_t size) {
    return numvec(size, 1.0 / std::sqrt(static_cast<double>(size)));
}

WeightSolution optimal_weights_l1(const ValueFunction& z, double lambda_bar) {
    numvec b = deviations(z, lambda_bar);
    numvec bf;
    if (!floored(b, bf)) return degenerate_solution(std::move(b));

    numvec w = bf;
    normalize(w);
    double t = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) t = std::max(t, b[i] / w[i]);
    return {std::move(w), t, std::move(b), false};
}

WeightSolution optimal_weights_linf(const ValueFunction& z, double lambda_bar) {
    numvec b = deviations(z, lambda_bar);
    numvec bf;
    if (!floored(b, bf)) return degenerate_solution(std::move(b));

    numvec w(bf.size());
    for (std::size_t i = 0; i < bf.size(); ++i) w[i] = std::cbrt(bf[i]);
    normalize(w);
    double objective = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) objective += b[i] / w[i];
    return {std::move(w), objective, std::move(b), false};
}

double default_lambda_bar(const ValueFunction& z, NormKind norm) {
    return norm == NormKind::L1Weighted ? DualShift::midrange().resolve(z) : lower_median(z);
}

WeightSolution optimal_weights(const ValueFunction& z, NormKind norm) {
    const double lambda_bar = default_lambda_bar(z, norm);
    return norm == NormKind::L1Weighted ? optimal_weights_l1(z, lambda_bar)
                                        : optimal_weights_linf(z, lambda_bar);
}

} // namespace rambig
