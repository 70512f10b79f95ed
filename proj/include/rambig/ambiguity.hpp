#pragma once

#include <optional>
#include <string>

#include "rambig/mdp.hpp"

namespace rambig {

enum class NormKind { L1Weighted, LInfWeighted };

std::string to_string(NormKind norm);

/// sum_i w_i |x_i| or max_i w_i |x_i|.
double weighted_norm(const numvec& x, const numvec& weights, NormKind norm);

/// Weighted distance between two vectors of equal length.
double weighted_distance(const numvec& x, const numvec& y, const numvec& weights, NormKind norm);

/**
 * Norm ball around a nominal distribution, intersected with the simplex:
 *   { p in simplex : ||p - nominal||_{norm, weights} <= budget }.
 *
 * A nonempty `support` (increasing state indices) further restricts p to
 * vanish outside it; the nominal must already do so.
 */
struct AmbiguitySet {
    NormKind norm = NormKind::L1Weighted;
    numvec weights;
    double budget = 0.0;
    numvec nominal;
    std::vector<std::size_t> support;

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;

    /// Unweighted set: every weight equal to `weight`.
    static AmbiguitySet uniform(NormKind norm, numvec nominal, double budget,
                                double weight = 1.0);
};

struct WorstCase {
    double value = 0.0;
    numvec argmin;
};

/// Exact min { p'z : p in simplex, ||p - nominal||_{1,w} <= budget }.
WorstCase worst_case_l1w(const ValueFunction& z, const AmbiguitySet& set);

/// Exact min { p'z : p in simplex, |p_i - nominal_i| <= budget / w_i }.
WorstCase worst_case_linfw(const ValueFunction& z, const AmbiguitySet& set);

/// Dispatches on set.norm.
WorstCase worst_case(const ValueFunction& z, const AmbiguitySet& set);

/// Reference solution of either inner problem through the dense LP solver.
WorstCase worst_case_lp(const ValueFunction& z, const AmbiguitySet& set);

/// max z - min z.
double span_seminorm(const ValueFunction& z);

/// Lower median (element (S-1)/2 of the sorted values).
double lower_median(const ValueFunction& z);

/// How the shift lambda in the dual bound is chosen.
struct DualShift {
    enum class Kind { Midrange, Median, Fixed };
    Kind kind = Kind::Midrange;
    double lambda = 0.0;

    static DualShift midrange() { return {Kind::Midrange, 0.0}; }
    static DualShift median() { return {Kind::Median, 0.0}; }
    static DualShift fixed(double lambda) { return {Kind::Fixed, lambda}; }

    /// Concrete lambda for `z`.
    double resolve(const ValueFunction& z) const;
};

/// ||z - lambda 1|| measured in the norm dual to `norm` with weights 1/w.
double dual_norm_term(const ValueFunction& z, double lambda, NormKind norm,
                      const numvec& weights);

/**
 * Lower bound on the worst-case expectation obtained by dropping p >= 0:
 *   nominal'z - budget * ||z - lambda 1||_dual.
 * Valid for every lambda.
 */
double dual_lower_bound(const ValueFunction& z, const AmbiguitySet& set, const DualShift& shift);

/**
 * lambda minimizing ||z - lambda 1||_dual. Returns exactly the midrange
 * (L1) or the lower median (LInf) when all weights are equal.
 */
double optimal_shift(const ValueFunction& z, NormKind norm, const numvec& weights);

} // namespace rambig
