#pragma once

#include "dhg/rng.hpp"
#include "dhg/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace dhg {

/// Diffusion schedule: strictly increasing beta in (0,1), alpha = 1 - beta,
/// alpha_bar running products (alpha_bar(0) = 1 by convention).
class DdpmSchedule {
public:
    static DdpmSchedule linear(int steps, double beta_start = 1e-4, double beta_end = 0.02);

    int steps() const { return static_cast<int>(beta_.size()); }
    double beta(int t) const { return beta_.at(static_cast<std::size_t>(check_t(t) - 1)); }
    double alpha(int t) const { return 1.0 - beta(t); }
    double alpha_bar(int t) const;  // t in [0, steps]

private:
    int check_t(int t) const;
    std::vector<double> beta_;
    std::vector<double> alpha_bar_;
};

/// Diffusion state over both hands' affordance directions and contact masks
/// (rows 0..B-1 right hand, B..2B-1 left hand). Masks diffuse as reals and
/// are binarized only by `finalize`.
struct AffordanceState {
    Eigen::Matrix<double, Eigen::Dynamic, 3> directions;  // 2B x 3
    VecX mask;                                             // 2B

    static AffordanceState zeros(int rows);
    static AffordanceState gaussian(int rows, Rng& rng);

    Index rows() const { return directions.rows(); }
    bool all_finite() const { return directions.allFinite() && mask.allFinite(); }

    /// Threshold masks at 0.5 and zero the direction rows of inactive parts.
    void finalize();

    std::string to_json() const;
    static AffordanceState from_json(const std::string& text);
};

/// state_t = sqrt(alpha_bar_t) * state0 + sqrt(1 - alpha_bar_t) * noise,
/// componentwise over directions and mask. Noise is supplied by the caller.
AffordanceState forward_noise(const AffordanceState& state0, int t, const AffordanceState& noise,
                              const DdpmSchedule& schedule);

/// Denoiser plug-in contract: (state_t, timestep, conditioning-or-null) ->
/// predicted noise of identical shape.
using Denoiser = std::function<AffordanceState(const AffordanceState&, int, const VecX*)>;

/// Classifier-free guidance: eps_uncond + s * (eps_cond - eps_uncond).
AffordanceState guidance_combine(const AffordanceState& eps_uncond,
                                 const AffordanceState& eps_cond, double scale);

/// Ancestral sampling from t = steps down to 1, deterministic for a fixed
/// seed. With conditioning and scale != 0, combines conditional and
/// unconditional denoiser calls; at scale == 0 the conditional branch is
/// never evaluated. The final state is post-processed by finalize().
/// Throws std::runtime_error naming the step on non-finite denoiser output.
AffordanceState reverse_sample(const Denoiser& denoiser, const DdpmSchedule& schedule,
                               const VecX* conditioning, double guidance_scale,
                               std::uint64_t seed, int rows = 2 * 6);

/// Test-scale two-layer perceptron denoiser with hand-written gradients.
class ToyDenoiser {
public:
    ToyDenoiser(int state_rows, int conditioning_dim, int hidden, std::uint64_t seed);

    AffordanceState predict(const AffordanceState& state, int t, const VecX* conditioning,
                            const DdpmSchedule& schedule) const;

    Denoiser as_denoiser(const DdpmSchedule& schedule) const;

    int parameter_count() const;
    VecX parameters() const;
    void set_parameters(const VecX& params);

    /// Gradient of 0.5*||predict - target||^2 w.r.t. the weights.
    VecX loss_gradient(const AffordanceState& state, int t, const VecX* conditioning,
                       const DdpmSchedule& schedule, const AffordanceState& target,
                       double* loss_out = nullptr) const;

    int state_rows() const { return state_rows_; }
    int conditioning_dim() const { return cond_dim_; }

private:
    VecX flatten_input(const AffordanceState& state, int t, const VecX* conditioning,
                       const DdpmSchedule& schedule) const;

    int state_rows_;
    int cond_dim_;
    int hidden_;
    Eigen::MatrixXd w1_, w2_;
    VecX b1_, b2_;
};

/// One training step of the toy denoiser: sample t and noise, apply forward
/// noising, drop the conditioning with probability `drop_probability`, and
/// return the gradient step ingredients. Exists so tests can exercise the
/// training-time guidance protocol end to end.
struct ToyTrainStats {
    double loss = 0.0;
    bool conditioning_dropped = false;
};

ToyTrainStats toy_train_step(ToyDenoiser& model, const AffordanceState& sample,
                             const VecX& conditioning, const DdpmSchedule& schedule, Rng& rng,
                             double learning_rate, double drop_probability = 0.10);

}  // namespace dhg
