#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/ml.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/randomness.hpp"

namespace qwalk::detect {

enum class Method { Human, MoI, IPR, SVM, MLP };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
bool is_manual(Method method);

// Walk/model context shared by every grid point of one sweep.
struct SweepBase {
    int n_max = 0;
    int n_t = 0;
    double theta0 = kPi / 6.0;
    double phi1 = kHalfPi;
    double phi2 = kHalfPi;
    std::uint64_t seed = 1;
    ModelKind kind = ModelKind::DiscreteAngle;
    int realizations = 1;
};

struct SweepGrid {
    int n_max = 0;
    int n_t = 0;
    ModelKind kind = ModelKind::None;
    std::vector<double> param_values;      // strictly ascending
    std::vector<EvolutionRecord> records;  // aligned with param_values
};

struct CriticalEstimate {
    Method method = Method::Human;
    int n = 0;  // evolution time, the system-size proxy
    double critical_value = 0.0;
    std::string diagnostics;
};

// critical_value ~ prefactor * n^(-exponent); exponent is signed.
struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
};

// `points` evenly spaced values (param_max/points, ..., param_max].
std::vector<double> make_param_grid(double param_max, int points);
double default_param_max(ModelKind kind, double theta0);

// Per-point seeds are derived from (base.seed, param value), so a grid
// point simulates identically whether it appears in a coarse grid, a
// refinement pass, or any thread interleaving.
SweepGrid build_sweep_grid(const SweepBase& base, std::vector<double> params,
                           int threads = 0);

// Breakpoint of a two-segment least-squares fit in log-log coordinates.
// Throws InsufficientDataError (< 8 points), DomainError (non-positive
// coordinates) or NoKinkError (two segments improve the single-line
// residual by less than 5%).
double moi_kink(const std::vector<std::pair<double, double>>& series);

// Abscissa of the maximum, plateau-aware, optionally sharpened by a
// parabola through the three points around the max (never moves the
// estimate past the neighboring grid points).  Throws
// BoundaryMaximumError when the maximum touches either end of the scan.
double ipr_max(const std::vector<std::pair<double, double>>& series, bool refine = true);

// Midpoint of the longest contiguous FlatOrThreePeak band; with no band,
// the midpoint between the last TwoPeak and the first SinglePeak.  Throws
// RegimeCoverageError unless both regimes appear.
double human_method_from_labels(const std::vector<double>& params,
                                const std::vector<PeakLabel>& labels);
double human_method(const SweepGrid& grid, const PeakOptions& options = {});

// Least squares of log(value) on log(n); exponent = -slope.
PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points);

// ---------------------------------------------------------------------------
// Full critical-value-vs-size pipeline

struct ScalingBase {
    double theta0 = kPi / 6.0;
    double phi1 = kHalfPi;
    double phi2 = kHalfPi;
    std::uint64_t seed = 1;
    ModelKind kind = ModelKind::DiscreteAngle;
};

struct ScalingOptions {
    std::vector<Method> methods = {Method::Human, Method::MoI, Method::IPR};
    int grid_points = 50;
    bool refine = true;      // one extra pass, 5x resolution around the coarse estimate
    int refine_factor = 5;
    int seeds = 1;           // detectors take the median over this many seeds
    int realizations = 1;    // realizations averaged per grid point
    int threads = 0;
    double param_max = 0.0;  // 0 -> default per kind
    PeakOptions peaks;
    // classifier settings (SVM / MLP methods)
    int n_samples = 1800;
    double band_width = 0.0;  // 0 -> default per kind
    ml::SvmHyper svm;
    ml::MlpHyper mlp;
    bool svm_max_normalize = false;
    bool mlp_max_normalize = true;
    int scan_points = 50;
};

struct MethodOutcome {
    Method method = Method::Human;
    bool ok = false;
    double value = 0.0;
    std::string error;
};

// One sweep at fixed size: the coarse grid with its per-point summaries
// plus one outcome per requested method (after the refinement pass).
struct SweepOutcome {
    std::vector<double> params;
    std::vector<double> final_moi;
    std::vector<double> final_ipr;
    std::vector<PeakLabel> labels;
    std::vector<MethodOutcome> outcomes;
};

// base.seed is the sweep seed; per-point seeds derive from it and the
// parameter value.
SweepOutcome sweep_detect(const ScalingBase& base, int n_max, int n_t,
                          const ScalingOptions& options);

struct MethodScaling {
    Method method = Method::Human;
    PowerLawFit fit;
    bool fit_ok = false;
    bool reliable = true;  // false when the method failed on > 25% of n values
    int n_failures = 0;
    std::string note;
};

struct ScalingResult {
    std::vector<CriticalEstimate> criticals;  // sorted by (method, n)
    std::vector<MethodScaling> fits;          // one entry per requested method
};

// For each n in n_values: sweep a fresh grid with n_max = n_t = n, apply
// every requested detector (median over `seeds` independent seeds), then
// fit critical value vs n per method.
ScalingResult scaling_sweep(const ScalingBase& base, const std::vector<int>& n_values,
                            const ScalingOptions& options = {});

}  // namespace qwalk::detect
