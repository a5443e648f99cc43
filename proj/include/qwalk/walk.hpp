#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qwalk {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;

using Complex = std::complex<double>;

// Parameters of the coin (rotation) operator.  phi1 = phi2 = pi/2 is the
// fixed convention used everywhere in this project unless a test says
// otherwise.
struct CoinParams {
    double theta = 0.0;
    double phi1 = kHalfPi;
    double phi2 = kHalfPi;
};

// 2x2 complex matrix, row major: [[a00 a01], [a10 a11]].
struct CoinMatrix {
    Complex a00, a01, a10, a11;
};

enum class Shift { forward, inverse };

// Two-component wavefunction on the 1D lattice x in [-n_max, n_max].
// Site x lives at vector index x + n_max.
struct WalkerState {
    std::vector<Complex> plus;
    std::vector<Complex> minus;
    int n_max = 0;

    int origin_index() const { return n_max; }
    int num_sites() const { return 2 * n_max + 1; }

    Complex& plus_at(int x) { return plus[static_cast<std::size_t>(x + n_max)]; }
    Complex& minus_at(int x) { return minus[static_cast<std::size_t>(x + n_max)]; }
    const Complex& plus_at(int x) const { return plus[static_cast<std::size_t>(x + n_max)]; }
    const Complex& minus_at(int x) const { return minus[static_cast<std::size_t>(x + n_max)]; }

    double norm_sq() const;

    bool operator==(const WalkerState&) const = default;
};

// Walk configuration: lattice half-width N, number of evolution steps,
// base coin angle and the fixed phases, and the master RNG seed.
struct WalkConfig {
    int n_max = 100;
    int n_t = 100;
    double theta0 = kPi / 6.0;
    double phi1 = kHalfPi;
    double phi2 = kHalfPi;
    std::uint64_t seed = 1;

    bool operator==(const WalkConfig&) const = default;
};

// Throws InvalidConfigError unless 1 <= n_t <= n_max and theta0 lies
// strictly inside (0, pi/2).
void validate_config(const WalkConfig& config);

// C(theta, phi1, phi2) = [[cos t, e^{i phi1} sin t],
//                         [e^{i phi2} sin t, -e^{i(phi1+phi2)} cos t]].
// Unitary for any finite parameters.
CoinMatrix coin_matrix(const CoinParams& params);

// Equal superposition of |+> and |-> at the origin.
WalkerState initial_state(int n_max);

// Mix the coin components at every site: (plus, minus) <- C (plus, minus).
WalkerState apply_coin(const WalkerState& state, const CoinParams& params);

// Shift |+> amplitude by +1 and |-> by -1 (forward), or the reverse
// (inverse).  Throws BoundaryOverflowError if any amplitude would leave
// the lattice.
WalkerState apply_translation(const WalkerState& state, Shift direction);

// One walk step: coin first, then translation.
WalkerState step(const WalkerState& state, const CoinParams& params, Shift direction);

// In-place versions used by the evolution loop; semantics identical to the
// value-returning operations above.
void apply_coin_inplace(WalkerState& state, const CoinParams& params);
void apply_translation_inplace(WalkerState& state, Shift direction);
void step_inplace(WalkerState& state, const CoinParams& params, Shift direction);

}  // namespace qwalk
