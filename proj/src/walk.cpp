#include "qwalk/walk.hpp"

#include <cmath>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

double WalkerState::norm_sq() const {
    double s = 0.0;
    for (std::size_t i = 0; i < plus.size(); ++i) {
        s += std::norm(plus[i]) + std::norm(minus[i]);
    }
    return s;
}

void validate_config(const WalkConfig& config) {
    if (config.n_max < 1) {
        throw InvalidConfigError("n_max must be >= 1, got " + std::to_string(config.n_max));
    }
    if (config.n_t < 1 || config.n_t > config.n_max) {
        throw InvalidConfigError("n_t must satisfy 1 <= n_t <= n_max, got n_t=" +
                                 std::to_string(config.n_t) + ", n_max=" +
                                 std::to_string(config.n_max));
    }
    if (!std::isfinite(config.theta0) || config.theta0 <= 0.0 || config.theta0 >= kHalfPi) {
        throw InvalidConfigError("theta0 must lie strictly inside (0, pi/2)");
    }
    if (!std::isfinite(config.phi1) || !std::isfinite(config.phi2)) {
        throw InvalidConfigError("coin phases must be finite");
    }
}

CoinMatrix coin_matrix(const CoinParams& params) {
    if (!std::isfinite(params.theta) || !std::isfinite(params.phi1) ||
        !std::isfinite(params.phi2)) {
        throw InvalidParameterError("coin parameters must be finite");
    }
    const double c = std::cos(params.theta);
    const double s = std::sin(params.theta);
    const Complex e1(std::cos(params.phi1), std::sin(params.phi1));
    const Complex e2(std::cos(params.phi2), std::sin(params.phi2));
    const Complex e12(std::cos(params.phi1 + params.phi2),
                      std::sin(params.phi1 + params.phi2));
    return CoinMatrix{Complex(c, 0.0), e1 * s, e2 * s, -e12 * c};
}

WalkerState initial_state(int n_max) {
    if (n_max < 1) {
        throw InvalidConfigError("initial_state requires n_max >= 1");
    }
    WalkerState state;
    state.n_max = n_max;
    state.plus.assign(static_cast<std::size_t>(2 * n_max + 1), Complex(0.0, 0.0));
    state.minus.assign(static_cast<std::size_t>(2 * n_max + 1), Complex(0.0, 0.0));
    const double amp = 1.0 / std::sqrt(2.0);
    state.plus_at(0) = Complex(amp, 0.0);
    state.minus_at(0) = Complex(amp, 0.0);
    return state;
}

void apply_coin_inplace(WalkerState& state, const CoinParams& params) {
    const CoinMatrix m = coin_matrix(params);
    // Explicit real/imaginary arithmetic keeps this loop free of the
    // library complex-multiply helper and its NaN fixup branches.
    const double a00r = m.a00.real(), a00i = m.a00.imag();
    const double a01r = m.a01.real(), a01i = m.a01.imag();
    const double a10r = m.a10.real(), a10i = m.a10.imag();
    const double a11r = m.a11.real(), a11i = m.a11.imag();
    const std::size_t n = state.plus.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double pr = state.plus[i].real(), pi = state.plus[i].imag();
        const double mr = state.minus[i].real(), mi = state.minus[i].imag();
        state.plus[i] = Complex(a00r * pr - a00i * pi + a01r * mr - a01i * mi,
                                a00r * pi + a00i * pr + a01r * mi + a01i * mr);
        state.minus[i] = Complex(a10r * pr - a10i * pi + a11r * mr - a11i * mi,
                                 a10r * pi + a10i * pr + a11r * mi + a11i * mr);
    }
}

void apply_translation_inplace(WalkerState& state, Shift direction) {
    const std::size_t n = state.plus.size();
    const Complex zero(0.0, 0.0);
    if (direction == Shift::forward) {
        // plus: x -> x+1, minus: x -> x-1.
        if (state.plus[n - 1] != zero || state.minus[0] != zero) {
            throw BoundaryOverflowError(
                "amplitude at a lattice boundary before forward shift (n_t > n_max?)");
        }
        for (std::size_t i = n - 1; i > 0; --i) state.plus[i] = state.plus[i - 1];
        state.plus[0] = zero;
        for (std::size_t i = 0; i + 1 < n; ++i) state.minus[i] = state.minus[i + 1];
        state.minus[n - 1] = zero;
    } else {
        if (state.plus[0] != zero || state.minus[n - 1] != zero) {
            throw BoundaryOverflowError(
                "amplitude at a lattice boundary before inverse shift (n_t > n_max?)");
        }
        for (std::size_t i = 0; i + 1 < n; ++i) state.plus[i] = state.plus[i + 1];
        state.plus[n - 1] = zero;
        for (std::size_t i = n - 1; i > 0; --i) state.minus[i] = state.minus[i - 1];
        state.minus[0] = zero;
    }
}

void step_inplace(WalkerState& state, const CoinParams& params, Shift direction) {
    apply_coin_inplace(state, params);
    apply_translation_inplace(state, direction);
}

WalkerState apply_coin(const WalkerState& state, const CoinParams& params) {
    WalkerState out = state;
    apply_coin_inplace(out, params);
    return out;
}

WalkerState apply_translation(const WalkerState& state, Shift direction) {
    WalkerState out = state;
    apply_translation_inplace(out, direction);
    return out;
}

WalkerState step(const WalkerState& state, const CoinParams& params, Shift direction) {
    WalkerState out = state;
    step_inplace(out, params, direction);
    return out;
}

}  // namespace qwalk
