#include "crnpolar/crn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crnpolar {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

void check_initial(const Network& net, const State& init)
{
    if (init.conc.size() != net.species_count())
        throw ConfigError("initial state covers " + std::to_string(init.conc.size()) +
                          " species, network has " + std::to_string(net.species_count()));
    for (std::size_t i = 0; i < init.conc.size(); ++i)
        if (!(init.conc[i] >= 0.0) || !std::isfinite(init.conc[i]))
            throw ConfigError("initial concentration of '" + net.species()[i] +
                              "' must be finite and nonnegative");
}

}  // namespace

Integrator::Integrator(const Network& net, State init, const SimulateOptions& opts)
    : net_(&net), opts_(opts), state_(std::move(init)), h_(opts.initial_step)
{
    check_initial(net, state_);
    if (!(opts.record_interval > 0.0))
        throw ConfigError("record interval must be positive");
    const std::size_t n = net.species_count();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y_new_})
        v->assign(n, 0.0);
}

bool Integrator::try_step(double h, double& err_norm)
{
    const auto& y = state_.conc;
    const std::size_t n = y.size();
    if (!fsal_valid_) {
        derivative_into(*net_, y, k1_);
        fsal_valid_ = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y[i] + h * a21 * k1_[i];
    derivative_into(*net_, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    derivative_into(*net_, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    derivative_into(*net_, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    derivative_into(*net_, tmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                              a65 * k5_[i]);
    derivative_into(*net_, tmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
        y_new_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                                a76 * k6_[i]);
    derivative_into(*net_, y_new_, k7_);

    double acc = 0.0;
    bool negative = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double err = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                e6 * k6_[i] + e7 * k7_[i]);
        const double scale =
            opts_.tol.atol + opts_.tol.rtol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
        acc += (err / scale) * (err / scale);
        if (y_new_[i] <= -kNegativeClamp)
            negative = true;
    }
    err_norm = n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
    if (!std::isfinite(err_norm))
        return false;
    // A trial that crosses the negativity floor is treated as an error-control
    // failure: the step is retried smaller.
    return err_norm <= 1.0 && !negative;
}

void Integrator::advance_to(double t)
{
    if (t < state_.time)
        throw ConfigError("cannot integrate backwards");
    while (state_.time < t) {
        if (accepted_ + rejected_ >= opts_.max_steps)
            throw SimulationFailure("step budget exhausted", state_);
        const double remaining = t - state_.time;
        double h = std::min({h_, remaining, opts_.max_step});
        const bool lands = (h == remaining);
        double err = 0.0;
        if (try_step(h, err)) {
            state_.conc.swap(y_new_);
            bool clamped = false;
            for (double& c : state_.conc)
                if (c < 0.0) {
                    c = 0.0;
                    clamped = true;
                }
            state_.time = lands ? t : state_.time + h;
            // FSAL: k7 is the derivative at the new point unless clamping moved it.
            k1_.swap(k7_);
            fsal_valid_ = !clamped;
            ++accepted_;
            const double factor =
                err > 0.0 ? std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor)
                          : kMaxFactor;
            if (!lands || factor < 1.0)
                h_ = h * factor;
        } else {
            ++rejected_;
            const double factor =
                std::isfinite(err) && err > 0.0
                    ? std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, 0.5)
                    : 0.5;
            h_ = h * factor;
            if (h_ < opts_.min_step) {
                std::ostringstream msg;
                msg << "step size underflow at t=" << state_.time;
                throw SimulationFailure(msg.str(), state_);
            }
        }
    }
}

Trajectory simulate(const Network& net, const State& init, double t_end, const SimulateOptions& opts)
{
    if (!(t_end > 0.0))
        throw ConfigError("t_end must be positive");
    Integrator integ(net, init, opts);
    Trajectory traj;
    traj.record_interval = opts.record_interval;
    State first = init;
    first.time = 0.0;
    traj.samples.push_back(first);
    for (std::size_t k = 1;; ++k) {
        const double t = std::min(static_cast<double>(k) * opts.record_interval, t_end);
        integ.advance_to(t);
        traj.samples.push_back(integ.state());
        if (t >= t_end)
            break;
    }
    return traj;
}

SteadyState steady_state(const Network& net, const State& init, const SteadyStateOptions& opts,
                         const std::function<void(const State&)>& observer)
{
    if (!(opts.max_time > 0.0))
        throw ConfigError("max_time must be positive");
    if (!(opts.check_interval > 0.0))
        throw ConfigError("check interval must be positive");
    Integrator integ(net, init, opts.sim);
    if (observer)
        observer(integ.state());
    if (max_converging_derivative(net, integ.state()) < opts.derivative_tol)
        return {integ.state(), true};
    for (std::size_t k = 1;; ++k) {
        const double t = std::min(static_cast<double>(k) * opts.check_interval, opts.max_time);
        integ.advance_to(t);
        if (observer)
            observer(integ.state());
        if (max_converging_derivative(net, integ.state()) < opts.derivative_tol)
            return {integ.state(), true};
        if (t >= opts.max_time)
            return {integ.state(), false};
    }
}

}  // namespace crnpolar
