#include "dhg/ddpm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace dhg {

using nlohmann::json;

DdpmSchedule DdpmSchedule::linear(int steps, double beta_start, double beta_end) {
    if (steps < 1) throw InvalidInput("schedule: steps must be >= 1");
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || !(beta_start < beta_end))
        throw InvalidInput("schedule: need 0 < beta_start < beta_end < 1");
    DdpmSchedule s;
    s.beta_.resize(static_cast<std::size_t>(steps));
    s.alpha_bar_.resize(static_cast<std::size_t>(steps));
    double prod = 1.0;
    for (int i = 0; i < steps; ++i) {
        const double frac = steps == 1 ? 1.0 : static_cast<double>(i) / (steps - 1);
        const double beta = beta_start + (beta_end - beta_start) * frac;
        s.beta_[static_cast<std::size_t>(i)] = beta;
        prod *= 1.0 - beta;
        s.alpha_bar_[static_cast<std::size_t>(i)] = prod;
    }
    return s;
}

int DdpmSchedule::check_t(int t) const {
    if (t < 1 || t > steps())
        throw InvalidInput("schedule: timestep " + std::to_string(t) + " outside [1, " +
                           std::to_string(steps()) + "]");
    return t;
}

double DdpmSchedule::alpha_bar(int t) const {
    if (t == 0) return 1.0;
    return alpha_bar_.at(static_cast<std::size_t>(check_t(t) - 1));
}

AffordanceState AffordanceState::zeros(int rows) {
    AffordanceState s;
    s.directions.setZero(rows, 3);
    s.mask.setZero(rows);
    return s;
}

AffordanceState AffordanceState::gaussian(int rows, Rng& rng) {
    // Draw order: direction rows (x, y, z each), then mask entries.
    AffordanceState s = zeros(rows);
    for (Index i = 0; i < s.directions.rows(); ++i)
        for (int c = 0; c < 3; ++c) s.directions(i, c) = rng.normal();
    for (Index i = 0; i < s.mask.size(); ++i) s.mask[i] = rng.normal();
    return s;
}

void AffordanceState::finalize() {
    for (Index i = 0; i < mask.size(); ++i) {
        mask[i] = mask[i] >= 0.5 ? 1.0 : 0.0;
        if (mask[i] == 0.0) directions.row(i).setZero();
    }
}

std::string AffordanceState::to_json() const {
    json j;
    json dir = json::array();
    for (Index i = 0; i < directions.rows(); ++i)
        dir.push_back({directions(i, 0), directions(i, 1), directions(i, 2)});
    j["directions"] = std::move(dir);
    json m = json::array();
    for (Index i = 0; i < mask.size(); ++i) m.push_back(mask[i]);
    j["mask"] = std::move(m);
    return j.dump();
}

AffordanceState AffordanceState::from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        const auto& dir = j.at("directions");
        const auto& m = j.at("mask");
        if (dir.size() != m.size()) throw InvalidInput("affordance state: row mismatch");
        AffordanceState s = zeros(static_cast<int>(dir.size()));
        for (Index i = 0; i < s.rows(); ++i) {
            for (int c = 0; c < 3; ++c)
                s.directions(i, c) = dir[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
            s.mask[i] = m[static_cast<std::size_t>(i)].get<double>();
        }
        return s;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("affordance state json: ") + e.what());
    }
}

AffordanceState forward_noise(const AffordanceState& state0, int t, const AffordanceState& noise,
                              const DdpmSchedule& schedule) {
    if (noise.rows() != state0.rows() || noise.mask.size() != state0.mask.size())
        throw InvalidInput("forward_noise: noise shape mismatch");
    const double ab = schedule.alpha_bar(t);
    const double signal = std::sqrt(ab);
    const double spread = std::sqrt(1.0 - ab);
    AffordanceState out;
    out.directions = signal * state0.directions + spread * noise.directions;
    out.mask = signal * state0.mask + spread * noise.mask;
    return out;
}

AffordanceState guidance_combine(const AffordanceState& eps_uncond,
                                 const AffordanceState& eps_cond, double scale) {
    if (eps_uncond.rows() != eps_cond.rows() || eps_uncond.mask.size() != eps_cond.mask.size())
        throw InvalidInput("guidance_combine: shape mismatch");
    AffordanceState out;
    out.directions = eps_uncond.directions + scale * (eps_cond.directions - eps_uncond.directions);
    out.mask = eps_uncond.mask + scale * (eps_cond.mask - eps_uncond.mask);
    return out;
}

AffordanceState reverse_sample(const Denoiser& denoiser, const DdpmSchedule& schedule,
                               const VecX* conditioning, double guidance_scale,
                               std::uint64_t seed, int rows) {
    Rng rng(seed);
    AffordanceState state = AffordanceState::gaussian(rows, rng);

    for (int t = schedule.steps(); t >= 1; --t) {
        AffordanceState eps = denoiser(state, t, nullptr);
        if (conditioning != nullptr && guidance_scale != 0.0) {
            const AffordanceState eps_cond = denoiser(state, t, conditioning);
            eps = guidance_combine(eps, eps_cond, guidance_scale);
        }
        if (!eps.all_finite())
            throw std::runtime_error("reverse_sample: non-finite denoiser output at step " +
                                     std::to_string(t));
        const double beta = schedule.beta(t);
        const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha(t));
        const double eps_coeff = beta / std::sqrt(1.0 - schedule.alpha_bar(t));
        state.directions = inv_sqrt_alpha * (state.directions - eps_coeff * eps.directions);
        state.mask = inv_sqrt_alpha * (state.mask - eps_coeff * eps.mask);
        if (t > 1) {
            const double sigma = std::sqrt(beta);
            const AffordanceState z = AffordanceState::gaussian(rows, rng);
            state.directions += sigma * z.directions;
            state.mask += sigma * z.mask;
        }
    }
    state.finalize();
    return state;
}

ToyDenoiser::ToyDenoiser(int state_rows, int conditioning_dim, int hidden, std::uint64_t seed)
    : state_rows_(state_rows), cond_dim_(conditioning_dim), hidden_(hidden) {
    const int in_dim = 4 * state_rows_ + 2 + cond_dim_ + 1;
    Rng rng(seed);
    const double scale1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    const double scale2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    w1_.resize(hidden_, in_dim);
    for (Index i = 0; i < w1_.size(); ++i) w1_.data()[i] = scale1 * rng.normal();
    b1_ = VecX::Zero(hidden_);
    w2_.resize(4 * state_rows_, hidden_);
    for (Index i = 0; i < w2_.size(); ++i) w2_.data()[i] = scale2 * rng.normal();
    b2_ = VecX::Zero(4 * state_rows_);
}

VecX ToyDenoiser::flatten_input(const AffordanceState& state, int t, const VecX* conditioning,
                                const DdpmSchedule& schedule) const {
    if (state.rows() != state_rows_) throw InvalidInput("toy denoiser: state rows mismatch");
    if (conditioning && conditioning->size() != cond_dim_)
        throw InvalidInput("toy denoiser: conditioning length mismatch");
    const int n = 4 * state_rows_;
    VecX x(n + 2 + cond_dim_ + 1);
    for (Index i = 0; i < state.rows(); ++i) x.segment<3>(3 * i) = state.directions.row(i).transpose();
    x.segment(3 * state_rows_, state_rows_) = state.mask;
    // Timestep embedding: normalized t and sqrt(alpha_bar).
    const double frac = static_cast<double>(t) / schedule.steps();
    x[n] = frac;
    x[n + 1] = std::sqrt(schedule.alpha_bar(t));
    if (conditioning) {
        x.segment(n + 2, cond_dim_) = *conditioning;
        x[n + 2 + cond_dim_] = 1.0;
    } else {
        x.segment(n + 2, cond_dim_).setZero();
        x[n + 2 + cond_dim_] = 0.0;
    }
    return x;
}

AffordanceState ToyDenoiser::predict(const AffordanceState& state, int t, const VecX* conditioning,
                                     const DdpmSchedule& schedule) const {
    const VecX x = flatten_input(state, t, conditioning, schedule);
    const VecX h = (w1_ * x + b1_).array().tanh();
    const VecX y = w2_ * h + b2_;
    AffordanceState out = AffordanceState::zeros(state_rows_);
    for (Index i = 0; i < out.rows(); ++i) out.directions.row(i) = y.segment<3>(3 * i).transpose();
    out.mask = y.segment(3 * state_rows_, state_rows_);
    return out;
}

Denoiser ToyDenoiser::as_denoiser(const DdpmSchedule& schedule) const {
    return [this, &schedule](const AffordanceState& s, int t, const VecX* c) {
        return predict(s, t, c, schedule);
    };
}

int ToyDenoiser::parameter_count() const {
    return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size());
}

VecX ToyDenoiser::parameters() const {
    VecX p(parameter_count());
    Index at = 0;
    p.segment(at, w1_.size()) = Eigen::Map<const VecX>(w1_.data(), w1_.size());
    at += w1_.size();
    p.segment(at, b1_.size()) = b1_;
    at += b1_.size();
    p.segment(at, w2_.size()) = Eigen::Map<const VecX>(w2_.data(), w2_.size());
    at += w2_.size();
    p.segment(at, b2_.size()) = b2_;
    return p;
}

void ToyDenoiser::set_parameters(const VecX& params) {
    if (params.size() != parameter_count()) throw InvalidInput("toy denoiser: parameter size");
    Index at = 0;
    Eigen::Map<VecX>(w1_.data(), w1_.size()) = params.segment(at, w1_.size());
    at += w1_.size();
    b1_ = params.segment(at, b1_.size());
    at += b1_.size();
    Eigen::Map<VecX>(w2_.data(), w2_.size()) = params.segment(at, w2_.size());
    at += w2_.size();
    b2_ = params.segment(at, b2_.size());
}

VecX ToyDenoiser::loss_gradient(const AffordanceState& state, int t, const VecX* conditioning,
                                const DdpmSchedule& schedule, const AffordanceState& target,
                                double* loss_out) const {
    const VecX x = flatten_input(state, t, conditioning, schedule);
    const VecX pre = w1_ * x + b1_;
    const VecX h = pre.array().tanh();
    const VecX y = w2_ * h + b2_;

    VecX y_target(4 * state_rows_);
    for (Index i = 0; i < target.rows(); ++i)
        y_target.segment<3>(3 * i) = target.directions.row(i).transpose();
    y_target.segment(3 * state_rows_, state_rows_) = target.mask;

    const VecX dy = y - y_target;  // d(0.5||y - t||^2)/dy
    if (loss_out) *loss_out = 0.5 * dy.squaredNorm();

    const VecX dh = w2_.transpose() * dy;
    const VecX dpre = dh.array() * (1.0 - h.array().square());

    VecX grad(parameter_count());
    Index at = 0;
    const Eigen::MatrixXd dw1 = dpre * x.transpose();
    grad.segment(at, w1_.size()) = Eigen::Map<const VecX>(dw1.data(), dw1.size());
    at += w1_.size();
    grad.segment(at, b1_.size()) = dpre;
    at += b1_.size();
    const Eigen::MatrixXd dw2 = dy * h.transpose();
    grad.segment(at, w2_.size()) = Eigen::Map<const VecX>(dw2.data(), dw2.size());
    at += w2_.size();
    grad.segment(at, b2_.size()) = dy;
    return grad;
}

ToyTrainStats toy_train_step(ToyDenoiser& model, const AffordanceState& sample,
                             const VecX& conditioning, const DdpmSchedule& schedule, Rng& rng,
                             double learning_rate, double drop_probability) {
    // Draw order: timestep, drop coin, then the noise state.
    const int t = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(schedule.steps()))) + 1;
    const bool drop = rng.uniform() < drop_probability;
    AffordanceState noise = AffordanceState::gaussian(static_cast<int>(sample.rows()), rng);
    const AffordanceState noisy = forward_noise(sample, t, noise, schedule);

    ToyTrainStats stats;
    stats.conditioning_dropped = drop;
    const VecX* cond = drop ? nullptr : &conditioning;
    const VecX grad = model.loss_gradient(noisy, t, cond, schedule, noise, &stats.loss);
    model.set_parameters(model.parameters() - learning_rate * grad);
    return stats;
}

}  // namespace dhg
