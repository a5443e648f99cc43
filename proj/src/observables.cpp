#include "qwalk/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

std::string to_string(PeakLabel label) {
    switch (label) {
        case PeakLabel::TwoPeak: return "two_peak";
        case PeakLabel::SinglePeak: return "single_peak";
        case PeakLabel::FlatOrThreePeak: return "flat_or_three_peak";
    }
    return "?";
}

ProbabilityDistribution probability_distribution(const WalkerState& state, int time) {
    ProbabilityDistribution dist;
    dist.time = time;
    dist.values.resize(state.plus.size());
    for (std::size_t i = 0; i < state.plus.size(); ++i) {
        dist.values[i] = std::norm(state.plus[i]) + std::norm(state.minus[i]);
    }
    return dist;
}

double moment_of_inertia(const ProbabilityDistribution& dist, int n_max) {
    if (dist.half_width() != n_max) {
        throw InvalidParameterError("moment_of_inertia: distribution is not on a lattice of half-width " +
                                    std::to_string(n_max));
    }
    double moi = 0.0;
    for (int x = 1; x <= n_max; ++x) {
        const double d = static_cast<double>(n_max - x);
        moi += dist.at(x) * d * d;
    }
    return moi;
}

double ipr(const WalkerState& state, IprVariant variant) {
    double s2 = 0.0;
    double s4 = 0.0;
    if (variant == IprVariant::PlusComponent) {
        for (const Complex& a : state.plus) {
            const double p = std::norm(a);
            s2 += p;
            s4 += p * p;
        }
    } else {
        for (std::size_t i = 0; i < state.plus.size(); ++i) {
            const double p = std::norm(state.plus[i]) + std::norm(state.minus[i]);
            s2 += p;
            s4 += p * p;
        }
    }
    if (s4 == 0.0) {
        throw DegenerateStateError("ipr: component is identically zero");
    }
    return s2 * s2 / s4;
}

namespace {

std::vector<double> moving_average(const std::vector<double>& v, int window) {
    const int n = static_cast<int>(v.size());
    const int h = window / 2;
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - h);
        const int hi = std::min(n - 1, i + h);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

struct RawPeak {
    int index;
    double height;
};

// Plateau-aware local maxima; a run of equal values counts once, at its
// middle index.  Array edges act as lower neighbors.
std::vector<RawPeak> local_maxima(const std::vector<double>& s) {
    const int n = static_cast<int>(s.size());
    std::vector<RawPeak> peaks;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && s[j + 1] == s[i]) ++j;
        const bool left_lower = (i == 0) || (s[i - 1] < s[i]);
        const bool right_lower = (j == n - 1) || (s[j + 1] < s[j]);
        if (left_lower && right_lower && s[i] > 0.0) {
            peaks.push_back({(i + j) / 2, s[i]});
        }
        i = j + 1;
    }
    return peaks;
}

// Height above the highest of the two bounding valleys, where a valley
// extends until terrain higher than the peak is met (or the array ends).
double prominence(const std::vector<double>& s, int p) {
    const int n = static_cast<int>(s.size());
    const double h = s[p];
    double left_base = h;
    for (int i = p - 1; i >= 0; --i) {
        if (s[i] > h) break;
        left_base = std::min(left_base, s[i]);
    }
    double right_base = h;
    for (int i = p + 1; i < n; ++i) {
        if (s[i] > h) break;
        right_base = std::min(right_base, s[i]);
    }
    return h - std::max(left_base, right_base);
}

}  // namespace

PeakStructure classify_peaks(const ProbabilityDistribution& dist, const PeakOptions& options) {
    const int t = dist.time;
    int window = options.window > 0 ? options.window : std::max(3, t / 50);
    if (window % 2 == 0) ++window;
    const int min_sep =
        options.min_separation > 0 ? options.min_separation : std::max(window, t / 10);

    const std::vector<double> smooth = moving_average(dist.values, window);
    const double smax = *std::max_element(smooth.begin(), smooth.end());

    PeakStructure result;
    if (smax <= 0.0) {
        result.label = PeakLabel::FlatOrThreePeak;
        return result;
    }

    std::vector<RawPeak> candidates;
    for (const RawPeak& p : local_maxima(smooth)) {
        if (prominence(smooth, p.index) >= options.prominence_frac * smax) {
            candidates.push_back(p);
        }
    }

    // Highest first; a peak is dropped when a taller one sits within
    // min_sep sites (absorbs side lobes of the ballistic fronts).
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const RawPeak& a, const RawPeak& b) { return a.height > b.height; });
    std::vector<RawPeak> kept;
    for (const RawPeak& p : candidates) {
        bool shadowed = false;
        for (const RawPeak& k : kept) {
            if (std::abs(k.index - p.index) < min_sep) {
                shadowed = true;
                break;
            }
        }
        if (!shadowed) kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end(),
              [](const RawPeak& a, const RawPeak& b) { return a.index < b.index; });

    if (kept.empty()) {
        result.label = PeakLabel::FlatOrThreePeak;
        return result;
    }

    const int n_half = dist.half_width();
    const double central_radius = std::max(1.0, options.central_frac * static_cast<double>(t));
    const double outer_radius = options.outer_frac * static_cast<double>(t);

    const RawPeak* dominant = &kept.front();
    for (const RawPeak& p : kept) {
        if (p.height > dominant->height) dominant = &p;
    }
    const bool dominant_central = std::abs(dominant->index - n_half) <= central_radius;
    std::vector<const RawPeak*> outer;
    for (const RawPeak& p : kept) {
        if (std::abs(p.index - n_half) > outer_radius) outer.push_back(&p);
    }

    auto emit = [&](const std::vector<const RawPeak*>& peaks) {
        for (const RawPeak* p : peaks) {
            result.peak_positions.push_back(p->index - n_half);
            result.peak_heights.push_back(p->height);
        }
    };

    if (dominant_central && outer.empty()) {
        // one central clump, nothing out in ballistic-front territory
        result.label = PeakLabel::SinglePeak;
        emit({dominant});
    } else if (!dominant_central && outer.size() == 2) {
        const double xl = outer[0]->index - n_half;
        const double xr = outer[1]->index - n_half;
        const double span = std::max(std::abs(xl), std::abs(xr));
        const bool symmetric =
            std::abs(xl + xr) <= options.symmetry_tol * span + static_cast<double>(window);
        result.label = symmetric ? PeakLabel::TwoPeak : PeakLabel::FlatOrThreePeak;
        emit(std::vector<const RawPeak*>(outer.begin(), outer.end()));
    } else {
        result.label = PeakLabel::FlatOrThreePeak;
        std::vector<const RawPeak*> all;
        for (const RawPeak& p : kept) all.push_back(&p);
        emit(all);
    }
    return result;
}

}  // namespace qwalk
