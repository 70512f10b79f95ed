#pragma once

#include "rambig/ambiguity.hpp"

namespace rambig {

/// Norm weights optimized for a value-function estimate.
struct WeightSolution {
    numvec weights;    ///< positive, sum of squares equal to one
    double objective;  ///< max_i b_i/w_i (L1) or sum_i b_i/w_i (LInf)
    numvec deviations; ///< b_i = |z_i - lambda_bar|
    bool degenerate;   ///< all deviations were zero; weights are uniform
};

/// Relative floor applied to deviations before computing weights; keeps
/// every weight strictly positive.
inline constexpr double kDeviationFloor = 1e-6;

/**
 * Weights minimizing max_i b_i / w_i subject to sum_i w_i^2 = 1, i.e.
 * w_i = b_i / ||b||_2 with objective ||b||_2.
 *
 * Deviations below kDeviationFloor * max_j b_j are raised to that floor.
 * A constant z (all b_i = 0) yields uniform weights 1/sqrt(S) and the
 * degenerate flag.
 */
WeightSolution optimal_weights_l1(const ValueFunction& z, double lambda_bar);

/// Weights minimizing sum_i b_i / w_i subject to sum_i w_i^2 = 1, i.e.
/// w_i proportional to b_i^(1/3). Same flooring rules as the L1 case.
WeightSolution optimal_weights_linf(const ValueFunction& z, double lambda_bar);

/// Midrange for L1, lower median for LInf.
double default_lambda_bar(const ValueFunction& z, NormKind norm);

/// Optimal weights for `norm` with the default lambda_bar.
WeightSolution optimal_weights(const ValueFunction& z, NormKind norm);

/// Uniform weights 1/sqrt(size).
numvec uniform_weights(std::size_t size);

} // namespace rambig
