#include "rcurve/regime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rcurve {

GeneratorMatrix validate_generator(const Matrix& q) {
    if (q.rows() != q.cols())
        throw validation_error("generator: matrix must be square");
    if (!q.allFinite())
        throw validation_error("generator: non-finite entries");
    const Eigen::Index n = q.rows();
    constexpr double row_tol = 1e-12;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && q(i, j) < 0.0) {
                std::ostringstream os;
                os << "generator: negative off-diagonal intensity q(" << (i + 1) << "," << (j + 1) << ") = "
                   << q(i, j);
                throw validation_error(os.str());
            }
        }
        if (q(i, i) > 0.0) {
            std::ostringstream os;
            os << "generator: positive diagonal entry in row " << (i + 1);
            throw validation_error(os.str());
        }
        const double rs = q.row(i).sum();
        if (std::abs(rs) > row_tol * std::max(1.0, q.row(i).cwiseAbs().maxCoeff())) {
            std::ostringstream os;
            os << "generator: row " << (i + 1) << " sums to " << rs << " (not conservative)";
            throw validation_error(os.str());
        }
    }
    return GeneratorMatrix(q);
}

Matrix transition_probabilities(const GeneratorMatrix& gen, double t) {
    if (t < 0.0)
        throw validation_error("transition_probabilities: t must be nonnegative");
    return expm(t * gen.q());
}

int RegimePath::state_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    return states[static_cast<std::size_t>(it - jump_times.begin())];
}

RegimePath sample_regime_path(const GeneratorMatrix& gen, int z0, double horizon, RngStream& rng) {
    const int n = gen.size();
    if (z0 < 0 || z0 >= n)
        throw validation_error("sample_regime_path: z0 out of range");
    if (horizon <= 0.0)
        throw validation_error("sample_regime_path: horizon must be positive");

    RegimePath path;
    path.states.push_back(z0);
    double t = 0.0;
    int state = z0;
    const Matrix& q = gen.q();
    while (true) {
        const double rate = -q(state, state);
        if (rate <= 0.0) break; // absorbing
        t += rng.exponential(rate);
        if (t > horizon) break;
        // next state from the jump law q_ij / rate
        double u = rng.uniform() * rate;
        int next = state;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == state) continue;
            acc += q(state, j);
            if (u <= acc) {
                next = j;
                break;
            }
        }
        if (next == state) { // numerical edge: take the last positive-rate state
            for (int j = n - 1; j >= 0; --j)
                if (j != state && q(state, j) > 0.0) {
                    next = j;
                    break;
                }
        }
        path.jump_times.push_back(t);
        path.states.push_back(next);
        state = next;
    }
    return path;
}

} // namespace rcurve
