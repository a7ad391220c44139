#include "forumquant/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "forumquant/errors.hpp"
#include "forumquant/numeric.hpp"

namespace fq {

namespace {

constexpr double kCollinearityTolerance = 1e-10;

enum class TotalSumMode { kCentered, kUncentered };

struct FitSpec {
    TotalSumMode tss_mode = TotalSumMode::kCentered;
    std::size_t constant_terms = 0;   // intercept column (1) or absorbed groups (G)
    std::size_t absorbed_in_df = 0;   // absorbed groups not present as columns of X
    CovarianceType covariance = CovarianceType::kNonrobust;
};

// Gram-Schmidt with re-orthogonalisation; rejects the first column whose
// residual against the earlier columns is negligible.
void check_full_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        Eigen::VectorXd v = X.col(j);
        const double norm0 = v.norm();
        bool collinear = !(norm0 > 0.0) || !std::isfinite(norm0);
        if (!collinear) {
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : basis) v -= q.dot(v) * q;
            }
            const double norm = v.norm();
            collinear = norm <= kCollinearityTolerance * norm0;
            if (!collinear) basis.push_back(v / norm);
        }
        if (collinear) {
            const auto col = static_cast<std::size_t>(j);
            throw SingularMatrixError(col, names[col],
                                      "design matrix is singular: column '" + names[col] +
                                          "' is constant or collinear with earlier columns");
        }
    }
}

RegressionResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names,
                     const FitSpec& spec) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto p = static_cast<std::size_t>(X.cols());
    if (static_cast<std::size_t>(y.size()) != n) throw Error(ErrorKind::kValidation, "ols: X and y row counts differ");
    if (n <= p + spec.absorbed_in_df) {
        throw Error(ErrorKind::kInsufficient, "ols: need more observations (" + std::to_string(n) +
                                                  ") than parameters (" + std::to_string(p + spec.absorbed_in_df) + ")");
    }
    if (!X.allFinite() || !y.allFinite()) throw Error(ErrorKind::kValidation, "ols: non-finite values in data");
    check_full_rank(X, names);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(static_cast<Eigen::Index>(p)).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
    const Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();

    RegressionResult res;
    res.names = std::move(names);
    res.n_obs = n;
    res.df_resid = n - p - spec.absorbed_in_df;
    res.absorbed_effects = spec.absorbed_in_df;
    res.residuals = y - X * beta;
    res.rss = res.residuals.squaredNorm();
    res.sigma2 = res.rss / static_cast<double>(res.df_resid);

    if (spec.covariance == CovarianceType::kNonrobust) {
        res.covariance = res.sigma2 * xtx_inv;
    } else {
        const Eigen::MatrixXd meat = X.transpose() * res.residuals.array().square().matrix().asDiagonal() * X;
        res.covariance = (static_cast<double>(n) / static_cast<double>(res.df_resid)) * xtx_inv * meat * xtx_inv;
    }

    for (std::size_t j = 0; j < p; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double b = beta(jj);
        const double se = std::sqrt(res.covariance(jj, jj));
        const double t = b / se;
        res.coefficients.push_back(b);
        res.standard_errors.push_back(se);
        res.t_stats.push_back(t);
        res.p_values.push_back(two_sided_t_pvalue(t, static_cast<double>(res.df_resid)));
    }

    double tss = 0.0;
    if (spec.tss_mode == TotalSumMode::kCentered) {
        const double mean = y.mean();
        tss = (y.array() - mean).square().sum();
    } else {
        tss = y.squaredNorm();
    }
    res.r_squared = tss > 0.0 ? 1.0 - res.rss / tss : kUndefined;
    const double df = static_cast<double>(res.df_resid);
    res.adj_r_squared = 1.0 - (1.0 - res.r_squared) * static_cast<double>(n - spec.constant_terms) / df;
    const std::size_t slopes = spec.tss_mode == TotalSumMode::kCentered ? p - 1 : p;
    if (slopes > 0 && res.r_squared < 1.0 && is_defined(res.r_squared)) {
        res.f_stat = (res.r_squared / static_cast<double>(slopes)) / ((1.0 - res.r_squared) / df);
        res.f_p_value = tail_probability(Distribution::f(static_cast<double>(slopes), df), res.f_stat);
    } else {
        res.f_stat = kUndefined;
        res.f_p_value = kUndefined;
    }
    return res;
}

}  // namespace

std::optional<std::size_t> RegressionResult::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const OlsOptions& options,
                     std::vector<std::string> names) {
    if (names.empty()) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<Eigen::Index>(names.size()) != X.cols()) {
        throw Error(ErrorKind::kValidation, "ols: names must match the number of columns");
    }
    FitSpec spec;
    spec.covariance = options.covariance;
    if (!options.intercept) {
        spec.tss_mode = TotalSumMode::kUncentered;
        return fit(X, y, std::move(names), spec);
    }
    Eigen::MatrixXd full(X.rows(), X.cols() + 1);
    full.col(0).setOnes();
    full.rightCols(X.cols()) = X;
    names.insert(names.begin(), "const");
    spec.tss_mode = TotalSumMode::kCentered;
    spec.constant_terms = 1;
    return fit(full, y, std::move(names), spec);
}

SummaryStats summary_stats(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw Error(ErrorKind::kInsufficient, "summary statistics need at least two samples");
    const double dn = static_cast<double>(n);
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / dn;
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const double m2 = s2 / dn;
    SummaryStats st;
    st.n = n;
    st.mean = mean;
    st.sd = std::sqrt(s2 / (dn - 1.0));
    st.skew = m2 > 0.0 ? (s3 / dn) / std::pow(m2, 1.5) : kUndefined;
    st.excess_kurtosis = m2 > 0.0 ? (s4 / dn) / (m2 * m2) - 3.0 : kUndefined;
    st.p_value_mean_zero = st.sd > 0.0 ? two_sided_t_pvalue(std::sqrt(dn) * mean / st.sd, dn - 1.0) : kUndefined;
    return st;
}

double mean_zero_ttest(std::span<const double> samples) {
    const SummaryStats st = summary_stats(samples);
    if (!(st.sd > 0.0)) throw Error(ErrorKind::kValidation, "t-test undefined: sample has zero variance");
    return st.p_value_mean_zero;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::kValidation, "correlation inputs differ in length");
    if (a.size() < 2) return kUndefined;
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return kUndefined;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double adf_critical_value(double level, std::size_t n_obs) {
    // MacKinnon (2010), Table 2, constant no trend: b0 + b1/T + b2/T^2 + b3/T^3.
    struct Row {
        double level, b0, b1, b2, b3;
    };
    static constexpr Row kRows[] = {
        {0.01, -3.43035, -6.5393, -16.786, -79.433},
        {0.05, -2.86154, -2.8903, -4.234, -40.040},
        {0.10, -2.56677, -1.5384, -2.809, 0.0},
    };
    for (const auto& r : kRows) {
        if (std::fabs(r.level - level) < 1e-12) {
            const double t = static_cast<double>(n_obs);
            return r.b0 + r.b1 / t + r.b2 / (t * t) + r.b3 / (t * t * t);
        }
    }
    throw Error(ErrorKind::kValidation, "ADF critical values are tabulated for 1%, 5% and 10% only");
}

AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag) {
    const std::size_t T = series.size();
    if (T < 25) throw Error(ErrorKind::kInsufficient, "ADF test needs at least 25 observations");
    for (double v : series) {
        if (!std::isfinite(v)) throw Error(ErrorKind::kValidation, "ADF test input contains undefined values");
    }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(T);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    if (!(var > 0.0)) throw Error(ErrorKind::kValidation, "ADF test: series has zero variance");

    std::vector<double> dy(T - 1);
    for (std::size_t t = 1; t < T; ++t) dy[t - 1] = series[t] - series[t - 1];
    const double dmean = std::accumulate(dy.begin(), dy.end(), 0.0) / static_cast<double>(dy.size());
    double dvar = 0.0;
    for (double v : dy) dvar += (v - dmean) * (v - dmean);
    if (!(dvar > 1e-24 * std::max(1.0, var))) {
        throw Error(ErrorKind::kSingular, "ADF test: differenced series is constant (deterministic trend)");
    }

    int kmax = max_lag.value_or(static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25))));
    kmax = std::clamp(kmax, 0, static_cast<int>(T) / 2 - 3);

    // Regression rows are y indices t = first_t .. T-1, dy index of Δy_t is t-1.
    const auto build = [&](int k, std::size_t first_t, Eigen::MatrixXd& X, Eigen::VectorXd& yv) {
        const std::size_t rows = T - first_t;
        X.resize(static_cast<Eigen::Index>(rows), k + 1);
        yv.resize(static_cast<Eigen::Index>(rows));
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = first_t + r;
            const auto ri = static_cast<Eigen::Index>(r);
            yv(ri) = dy[t - 1];
            X(ri, 0) = series[t - 1];
            for (int j = 1; j <= k; ++j) X(ri, j) = dy[t - 1 - static_cast<std::size_t>(j)];
        }
    };
    const auto names_for = [](int k) {
        std::vector<std::string> names{"y_lag1"};
        for (int j = 1; j <= k; ++j) names.push_back("dy_lag" + std::to_string(j));
        return names;
    };

    int best_k = 0;
    if (kmax > 0) {
        double best_aic = std::numeric_limits<double>::infinity();
        const std::size_t first_t = static_cast<std::size_t>(kmax) + 1;
        for (int k = 0; k <= kmax; ++k) {
            Eigen::MatrixXd X;
            Eigen::VectorXd yv;
            build(k, first_t, X, yv);
            const RegressionResult r = ols(X, yv, {}, names_for(k));
            const double n = static_cast<double>(r.n_obs);
            const double aic = n * std::log(r.rss / n) + 2.0 * static_cast<double>(k + 2);
            if (aic < best_aic) {
                best_aic = aic;
                best_k = k;
            }
        }
    }

    Eigen::MatrixXd X;
    Eigen::VectorXd yv;
    build(best_k, static_cast<std::size_t>(best_k) + 1, X, yv);
    const RegressionResult r = ols(X, yv, {}, names_for(best_k));

    AdfResult out;
    out.stat = r.t_stats[1];
    out.lag_used = best_k;
    out.n_obs = r.n_obs;
    out.critical_1pct = adf_critical_value(0.01, r.n_obs);
    out.critical_5pct = adf_critical_value(0.05, r.n_obs);
    out.critical_10pct = adf_critical_value(0.10, r.n_obs);
    out.stationary = out.stat < out.critical_5pct;
    return out;
}

GrangerResult granger_test(std::span<const double> cause, std::span<const double> effect, int lag,
                           const GrangerOptions& options) {
    if (lag < 1) throw Error(ErrorKind::kValidation, "Granger lag must be >= 1");
    if (cause.size() != effect.size()) throw Error(ErrorKind::kValidation, "Granger series must be aligned");
    const auto L = static_cast<std::size_t>(lag);
    const std::size_t T = effect.size();

    std::vector<std::size_t> rows;
    for (std::size_t t = L; t < T; ++t) {
        bool ok = is_defined(effect[t]);
        for (std::size_t j = 1; j <= L && ok; ++j) ok = is_defined(effect[t - j]) && is_defined(cause[t - j]);
        if (ok) rows.push_back(t);
    }
    if (rows.size() <= 3 * L + 5) {
        throw Error(ErrorKind::kInsufficient, "Granger test at lag " + std::to_string(lag) + " has only " +
                                                  std::to_string(rows.size()) + " usable observations");
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(2 * L));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t t = rows[r];
        const auto ri = static_cast<Eigen::Index>(r);
        y(ri) = effect[t];
        for (std::size_t j = 1; j <= L; ++j) {
            X(ri, static_cast<Eigen::Index>(j - 1)) = effect[t - j];
            X(ri, static_cast<Eigen::Index>(L + j - 1)) = cause[t - j];
        }
    }
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= L; ++j) names.push_back("effect_lag" + std::to_string(j));
    for (std::size_t j = 1; j <= L; ++j) names.push_back("cause_lag" + std::to_string(j));
    const RegressionResult fitres = ols(X, y, {}, names);

    // Coefficients 1 + L .. 2L (after the constant) form the tested block.
    const auto start = static_cast<Eigen::Index>(1 + L);
    const auto len = static_cast<Eigen::Index>(L);
    Eigen::VectorXd b(len);
    for (Eigen::Index j = 0; j < len; ++j) b(j) = fitres.coefficients[static_cast<std::size_t>(start + j)];
    const Eigen::MatrixXd V = fitres.covariance.block(start, start, len, len);
    const double wald = b.dot(V.llt().solve(b));

    GrangerResult out;
    out.lag = lag;
    out.wald_stat = wald;
    out.n_obs = fitres.n_obs;
    out.df_resid = fitres.df_resid;
    if (options.f_variant) {
        out.p_value = tail_probability(Distribution::f(static_cast<double>(L), static_cast<double>(fitres.df_resid)),
                                       wald / static_cast<double>(L));
    } else {
        out.p_value = tail_probability(Distribution::chi_square(static_cast<double>(L)), wald);
    }
    return out;
}

RegressionResult panel_fe(const PanelData& data, CovarianceType covariance) {
    const auto n = static_cast<std::size_t>(data.y.size());
    if (data.time.size() != n || static_cast<std::size_t>(data.X.rows()) != n ||
        (!data.entity.empty() && data.entity.size() != n)) {
        throw Error(ErrorKind::kValidation, "panel data columns have mismatched lengths");
    }
    if (static_cast<Eigen::Index>(data.names.size()) != data.X.cols()) {
        throw Error(ErrorKind::kValidation, "panel data names must match the regressors");
    }
    if (n == 0) throw Error(ErrorKind::kInsufficient, "panel regression has no rows");

    std::map<std::int64_t, std::size_t> group_of;
    for (auto t : data.time) group_of.emplace(t, group_of.size());
    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = group_of.at(data.time[i]);
    const std::size_t G = group_of.size();

    const Eigen::Index k = data.X.cols();
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(G), k + 1);
    std::vector<double> counts(G, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = static_cast<Eigen::Index>(group[i]);
        const auto ii = static_cast<Eigen::Index>(i);
        sums(g, 0) += data.y(ii);
        sums.row(g).tail(k) += data.X.row(ii);
        counts[group[i]] += 1.0;
    }
    for (std::size_t g = 0; g < G; ++g) sums.row(static_cast<Eigen::Index>(g)) /= counts[g];

    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = static_cast<Eigen::Index>(group[i]);
        const auto ii = static_cast<Eigen::Index>(i);
        y(ii) = data.y(ii) - sums(g, 0);
        X.row(ii) = data.X.row(ii) - sums.row(g).tail(k);
    }

    FitSpec spec;
    spec.tss_mode = TotalSumMode::kUncentered;
    spec.constant_terms = G;
    spec.absorbed_in_df = G;
    spec.covariance = covariance;
    return fit(X, y, data.names, spec);
}

std::string significance_stars(double p_value) {
    if (!is_defined(p_value)) return "";
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

}  // namespace fq
