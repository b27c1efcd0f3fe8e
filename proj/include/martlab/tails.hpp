#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "martlab/models.hpp"

namespace martlab {

// sqrt_tail: values are lambda * P(sqrt(X) > lambda) (the quadratic
// variation curves); plain_tail: lambda * P(X > lambda) (the sup M^- curve).
enum class TailMode { SqrtTail, PlainTail };

const char* tail_mode_name(TailMode mode);

struct TailCurve {
  std::vector<double> lambdas;     // increasing, positive
  std::vector<double> values;      // lambda_i * p_hat_i
  std::vector<double> std_errors;  // lambda_i * sqrt(p(1-p)/N)
  std::size_t n_samples = 0;
  TailMode mode = TailMode::SqrtTail;
};

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
};

// Exact counting estimator with binomial standard errors. The grid is
// sorted and deduplicated; anything non-positive is rejected.
TailCurve empirical_tail_curve(std::span<const double> samples,
                               std::vector<double> lambdas, TailMode mode);

// Convenience wrapper for the sup M^- curve (plain_tail mode).
TailCurve sup_neg_tail_curve(std::span<const double> sup_neg_samples,
                             std::vector<double> lambdas);

// Transform-side estimator (1/lambda)(1 - mean e^{-lambda^2 X / 2}).
// Censored samples enter with their capped X, which overstates the
// exponential by at most e^{-lambda^2 X_cap/2} each; callers get the bias
// bound via laplace_censoring_bias.
ValueWithError laplace_side(std::span<const double> samples, double lambda);
double laplace_censoring_bias(std::span<const double> censored_samples,
                              double lambda, std::size_t n_total);

// Intercept of the OLS fit of laplace_side against lambda over the small
// grid. The intercept is a fixed linear combination of per-sample
// quantities, so its standard error is taken from the per-sample spread
// directly (grid points share samples and are strongly correlated; naive
// per-point error propagation would be wrong).
ValueWithError laplace_extrapolate(std::span<const double> samples,
                                   std::span<const double> small_lambdas);

// Inverse-variance-weighted mean of the curve values: the plateau the
// curve settles on. Exact-zero points (p_hat = 0) get the standard error
// they would have at one count so that the weighting stays finite.
ValueWithError plateau_estimate(const TailCurve& curve);

// Intercept of the OLS fit of curve values against 1/lambda. Used where
// the approach to the limit is O(1/lambda) (the sup M^- curve), which a
// plateau over any finite grid systematically underestimates.
ValueWithError extrapolated_limit(const TailCurve& curve);

struct TauberianReport {
  ValueWithError laplace_limit;   // extrapolated transform side
  ValueWithError tail_limit;      // plateau of the sqrt-QV tail curve
  ValueWithError mean_terminal;   // mean of m_inf over uncensored paths
  double ratio = 0.0;             // tail_limit / (sqrt(2/pi) * laplace_limit)
  double ratio_std_error = 0.0;
  double laplace_bias_bound = 0.0;  // censoring contribution, worst grid point
};

// Runs both sides of the transform/tail equivalence on one sample set.
// use_optional_qv switches the X from <M> to [M,M].
TauberianReport tauberian_compare(std::span<const TerminalSample> samples,
                                  std::span<const double> small_lambdas,
                                  std::span<const double> big_lambdas,
                                  bool use_optional_qv = false);

enum class ClassDVerdict { ConsistentWithD, NotD, Inconclusive };

const char* to_string(ClassDVerdict verdict);

// Uniform-integrability diagnostic over the three tail curves (both QV
// curves and sup M^-): all trending to zero is consistent with class D, any
// plateau significantly above zero rules it out. sigma is the significance
// threshold in standard errors. Curves need >= 3 points to show a trend.
ClassDVerdict class_d_diagnostic(const TailCurve& qv_pred_curve,
                                 const TailCurve& qv_opt_curve,
                                 const TailCurve& sup_neg_curve,
                                 double sigma = 3.0);

// Default evaluation grid: 12 geometric points from 5 * median of the
// transformed samples up to 0.3 * sqrt(T_max), inside the asymptotic regime
// but clear of censoring contamination.
std::vector<double> default_big_lambdas(std::span<const double> samples,
                                        TailMode mode, double horizon_cap);

// CSV export; schema version pinned in the header comment line.
void write_tail_curve_csv(std::ostream& os, const TailCurve& curve);

}  // namespace martlab
