#include "dhg/adam.hpp"

#include <cmath>

namespace dhg {

VecX AdamOptimizer::direction(const VecX& grad) {
    if (!grad.allFinite()) throw InvalidInput("adam: non-finite gradient");
    if (m_.size() != grad.size()) {
        m_ = VecX::Zero(grad.size());
        v_ = VecX::Zero(grad.size());
        t_ = 0;
    }
    ++t_;
    m_ = opts_.beta1 * m_ + (1.0 - opts_.beta1) * grad;
    v_ = opts_.beta2 * v_ + (1.0 - opts_.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(opts_.beta1, t_);
    const double bc2 = 1.0 - std::pow(opts_.beta2, t_);
    const VecX m_hat = m_ / bc1;
    const VecX v_hat = v_ / bc2;
    return m_hat.cwiseQuotient(v_hat.cwiseSqrt() + VecX::Constant(grad.size(), opts_.epsilon));
}

void AdamOptimizer::step(VecX& params, const VecX& grad, const VecX* step_scale) {
    if (grad.size() != params.size()) throw InvalidInput("adam: gradient size mismatch");
    VecX update = opts_.learning_rate * direction(grad);
    if (step_scale) update = update.cwiseProduct(*step_scale);
    params -= update;
}

void AdamOptimizer::reset() {
    m_.resize(0);
    v_.resize(0);
    t_ = 0;
}

}  // namespace dhg
