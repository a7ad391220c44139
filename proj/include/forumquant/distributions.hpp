#pragma once

namespace fq {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta function I_x(a, b).
double beta_inc(double a, double b, double x);

struct Distribution {
    enum class Kind { kNormal, kStudentT, kChiSquare, kF };

    Kind kind = Kind::kNormal;
    double df1 = 0.0;
    double df2 = 0.0;

    static Distribution normal() { return {Kind::kNormal, 0.0, 0.0}; }
    static Distribution student_t(double df) { return {Kind::kStudentT, df, 0.0}; }
    static Distribution chi_square(double df) { return {Kind::kChiSquare, df, 0.0}; }
    static Distribution f(double d1, double d2) { return {Kind::kF, d1, d2}; }
};

// Upper tail P(X > x). Throws kValidation for non-positive degrees of freedom.
double tail_probability(const Distribution& dist, double x);

// Two-sided p-value of a t statistic.
double two_sided_t_pvalue(double t_stat, double df);

}  // namespace fq
