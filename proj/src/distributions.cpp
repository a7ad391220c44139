#include "forumquant/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "forumquant/errors.hpp"

namespace fq {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h;
}

void require_positive(double df, const char* what) {
    if (!(df > 0.0) || !std::isfinite(df)) {
        throw Error(ErrorKind::kValidation, std::string(what) + " must be positive, got " + std::to_string(df));
    }
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw Error(ErrorKind::kValidation, "gamma_p: shape must be positive");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw Error(ErrorKind::kValidation, "gamma_q: shape must be positive");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double beta_inc(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::kValidation, "beta_inc: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double tail_probability(const Distribution& dist, double x) {
    using Kind = Distribution::Kind;
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    switch (dist.kind) {
        case Kind::kNormal:
            return 0.5 * std::erfc(x / std::sqrt(2.0));
        case Kind::kStudentT: {
            require_positive(dist.df1, "student t degrees of freedom");
            if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
            const double df = dist.df1;
            const double half_tail = 0.5 * beta_inc(0.5 * df, 0.5, df / (df + x * x));
            return x >= 0.0 ? half_tail : 1.0 - half_tail;
        }
        case Kind::kChiSquare:
            require_positive(dist.df1, "chi-square degrees of freedom");
            return gamma_q(0.5 * dist.df1, 0.5 * x);
        case Kind::kF: {
            require_positive(dist.df1, "F numerator degrees of freedom");
            require_positive(dist.df2, "F denominator degrees of freedom");
            if (x <= 0.0) return 1.0;
            if (std::isinf(x)) return 0.0;
            const double d1 = dist.df1;
            const double d2 = dist.df2;
            return beta_inc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double two_sided_t_pvalue(double t_stat, double df) {
    const double p = 2.0 * tail_probability(Distribution::student_t(df), std::fabs(t_stat));
    return std::min(1.0, p);
}

}  // namespace fq
