#pragma once

#include "dhg/types.hpp"

namespace dhg {

/// Adam with bias-corrected first/second moment estimates. State is sized on
/// the first step; reset() reuses the instance for a new parameter vector.
class AdamOptimizer {
public:
    struct Options {
        double learning_rate = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    AdamOptimizer() = default;
    explicit AdamOptimizer(Options opts) : opts_(opts) {}

    const Options& options() const { return opts_; }
    void set_learning_rate(double lr) { opts_.learning_rate = lr; }

    /// One update: params -= lr * m_hat / (sqrt(v_hat) + eps). An optional
    /// per-parameter scale multiplies the step (used for parameter groups
    /// with different rates).
    void step(VecX& params, const VecX& grad, const VecX* step_scale = nullptr);

    /// Updates the moments and returns the unscaled update direction
    /// m_hat / (sqrt(v_hat) + eps), for callers that backtrack the step
    /// length themselves.
    VecX direction(const VecX& grad);

    void reset();
    int iterations() const { return t_; }

private:
    Options opts_;
    VecX m_, v_;
    int t_ = 0;
};

}  // namespace dhg
