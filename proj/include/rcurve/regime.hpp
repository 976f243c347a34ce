#ifndef RCURVE_REGIME_HPP
#define RCURVE_REGIME_HPP

#include <vector>

#include "rcurve/linalg.hpp"
#include "rcurve/rng.hpp"

namespace rcurve {

/// Validated intensity (generator) matrix of the regime chain: nonnegative
/// off-diagonal entries, rows summing to zero.
class GeneratorMatrix {
public:
    const Matrix& q() const { return q_; }
    int size() const { return static_cast<int>(q_.rows()); }

    friend GeneratorMatrix validate_generator(const Matrix& q);

private:
    explicit GeneratorMatrix(Matrix q) : q_(std::move(q)) {}
    Matrix q_;
};

/// Throws validation_error naming the offending entry/row; idempotent.
GeneratorMatrix validate_generator(const Matrix& q);

/// expm(t Q); row-stochastic. Throws for t < 0.
Matrix transition_probabilities(const GeneratorMatrix& gen, double t);

/// One realization of the chain on [0, horizon]. states has one more entry
/// than jump_times: the state before the first jump, then after each jump.
/// States are 0-based indices.
struct RegimePath {
    std::vector<double> jump_times;
    std::vector<int> states;

    /// Right-continuous state at time t (post-jump value at a jump time).
    int state_at(double t) const;
};

/// Gillespie sampling: holding time Exponential(-q_ii), next state j != i
/// with probability q_ij / (-q_ii). Deterministic given the stream state.
RegimePath sample_regime_path(const GeneratorMatrix& gen, int z0, double horizon, RngStream& rng);

} // namespace rcurve

#endif
