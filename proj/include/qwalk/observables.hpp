#pragma once

#include <string>
#include <vector>

#include "qwalk/walk.hpp"

namespace qwalk {

// P(x) on the lattice x in [-N, N] at a given step, N = (values.size()-1)/2.
struct ProbabilityDistribution {
    std::vector<double> values;
    int time = 0;

    int half_width() const { return (static_cast<int>(values.size()) - 1) / 2; }
    double at(int x) const { return values[static_cast<std::size_t>(x + half_width())]; }

    bool operator==(const ProbabilityDistribution&) const = default;
};

// Per-step MoI and IPR for one evolution; entry k belongs to step t = k+1.
struct DiagnosticsSeries {
    std::vector<double> moi;
    std::vector<double> ipr;

    bool operator==(const DiagnosticsSeries&) const = default;
};

enum class PeakLabel { TwoPeak, SinglePeak, FlatOrThreePeak };

std::string to_string(PeakLabel label);

struct PeakStructure {
    PeakLabel label = PeakLabel::FlatOrThreePeak;
    std::vector<int> peak_positions;   // lattice coordinates, ascending
    std::vector<double> peak_heights;  // smoothed heights, aligned with positions
};

// Knobs of the mechanized "look at the distribution" classifier.  A zero
// means "derive from the distribution's time t": window = max(3, t/50),
// min_separation = max(window, t/10).  Peaks with |x| > outer_frac * t are
// "outer" (ballistic-front territory); prominent structure closer in is
// part of the central clump.
struct PeakOptions {
    int window = 0;
    double prominence_frac = 0.20;  // keep peaks with prominence >= frac * max
    double central_frac = 0.10;     // dominant-central means |x| <= max(1, frac * t)
    double outer_frac = 1.0 / 3.0;
    double symmetry_tol = 0.30;     // |x_l + x_r| <= tol * max|x| + window
    int min_separation = 0;
};

enum class IprVariant {
    PlusComponent,     // (sum |psi_+|^2)^2 / sum |psi_+|^4
    FullDistribution,  // same formula on P(x)
};

// P(x) = |psi_+(x)|^2 + |psi_-(x)|^2.
ProbabilityDistribution probability_distribution(const WalkerState& state, int time = 0);

// MoI = sum over x > 0 of P(x) (N - x)^2; x <= 0 is excluded (mirror
// symmetry about the origin).  n_max must match the distribution's lattice.
double moment_of_inertia(const ProbabilityDistribution& dist, int n_max);

// Participation measure of the |+> component (or of P(x) with the variant
// flag).  Throws DegenerateStateError if the chosen component is all zero.
double ipr(const WalkerState& state, IprVariant variant = IprVariant::PlusComponent);

// Smooth, find prominent local maxima, and label the distribution as
// two-peak (delocalized), single central peak (localized), or anything
// else (flat / three-peak transition regime).  The result depends only on
// the shape of `dist.values`, not its normalization.
PeakStructure classify_peaks(const ProbabilityDistribution& dist,
                             const PeakOptions& options = {});

}  // namespace qwalk
