#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forumquant/distributions.hpp"

namespace fq {

enum class CovarianceType { kNonrobust, kHc1 };

struct RegressionResult {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double f_stat = 0.0;     // joint test of all slopes; NaN when undefined
    double f_p_value = 0.0;
    std::size_t n_obs = 0;
    std::size_t df_resid = 0;
    std::size_t absorbed_effects = 0;  // time groups absorbed by panel_fe
    double rss = 0.0;
    double sigma2 = 0.0;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd covariance;

    std::optional<std::size_t> index_of(const std::string& name) const;
};

struct OlsOptions {
    bool intercept = true;
    CovarianceType covariance = CovarianceType::kNonrobust;
};

// Least squares via Householder QR. With an intercept a leading column of
// ones named "const" is added. Throws SingularMatrixError naming the first
// column that is (numerically) a linear combination of earlier columns.
RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const OlsOptions& options = {},
                     std::vector<std::string> names = {});

struct SummaryStats {
    double mean = 0.0;
    double sd = 0.0;               // sample (n - 1) standard deviation
    double skew = 0.0;             // m3 / m2^{3/2}
    double excess_kurtosis = 0.0;  // m4 / m2^2 - 3
    double p_value_mean_zero = 0.0;  // NaN when sd == 0
    std::size_t n = 0;
};

SummaryStats summary_stats(std::span<const double> samples);

// Two-sided one-sample t-test of mean zero, t = sqrt(n) * mean / sd on n - 1 df.
double mean_zero_ttest(std::span<const double> samples);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

struct AdfResult {
    double stat = 0.0;
    int lag_used = 0;
    std::size_t n_obs = 0;
    double critical_1pct = 0.0;
    double critical_5pct = 0.0;
    double critical_10pct = 0.0;
    bool stationary = false;  // stat < 5% critical value
};

// MacKinnon (2010) response-surface critical value, constant / no trend.
double adf_critical_value(double level, std::size_t n_obs);

// Augmented Dickey-Fuller test with a constant. Lag order picked by AIC in
// [0, max_lag]; default max_lag = floor(12 (T/100)^{1/4}).
AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag = std::nullopt);

struct GrangerOptions {
    bool f_variant = false;  // report F = W / L with F(L, df_resid) instead of chi-square
};

struct GrangerResult {
    int lag = 0;
    double wald_stat = 0.0;
    double p_value = 1.0;
    std::size_t n_obs = 0;
    std::size_t df_resid = 0;
};

// Does `cause` help predict `effect`? Regresses effect_t on a constant,
// effect lags 1..L and cause lags 1..L and tests the cause block jointly.
// Rows needing any undefined (NaN) value are skipped.
GrangerResult granger_test(std::span<const double> cause, std::span<const double> effect, int lag,
                           const GrangerOptions& options = {});

struct PanelData {
    std::vector<std::int64_t> entity;
    std::vector<std::int64_t> time;
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<std::string> names;
};

// Time fixed effects absorbed by demeaning within each time period; no
// entity effects. df_resid = n - k - (#periods).
RegressionResult panel_fe(const PanelData& data, CovarianceType covariance = CovarianceType::kNonrobust);

// "*" p < 0.05, "**" p < 0.01, "***" p < 0.001.
std::string significance_stars(double p_value);

}  // namespace fq
