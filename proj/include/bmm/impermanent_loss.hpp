#pragma once

#include <cmath>
#include <stdexcept>

namespace bmm {

namespace detail {
inline void check_il_exponent(int n) {
    if (n < 1) throw std::domain_error("exponent n must be >= 1");
}
}  // namespace detail

// Constant-product divergence loss: 1 - 2 sqrt(m) / (m + 1).
inline double il_traditional(double m) {
    if (!(m > 0.0)) throw std::domain_error("price multiplier must be positive");
    return 1.0 - 2.0 * std::sqrt(m) / (m + 1.0);
}

// g(n) = (n+1)^2 / (4n); g(1) = 1.
inline double il_improvement_factor(int n) {
    detail::check_il_exponent(n);
    const double np1 = n + 1.0;
    return np1 * np1 / (4.0 * n);
}

/// Factor model: traditional loss divided by g(n). This is the model behind the
/// 80.2% -> 51.3% figure at m = 100, n = 4.
inline double il_proposed_scaled(double m, int n) {
    return il_traditional(m) / il_improvement_factor(n);
}

/// Pool value over hold value with V_pool = (n+1) Y0 (1+eps)^(1 - 1/(n+1)) and
/// V_hold = (n+1) Y0 (1+eps). Y0 cancels:
///     IL = 1 - (1 + eps)^(-1/(n+1))
/// This exact model gives 60.2% at m = 100, n = 4, not the factor model's 51.3%.
inline double il_powerlaw_exact(double epsilon, int n) {
    detail::check_il_exponent(n);
    if (!(epsilon > -1.0)) throw std::domain_error("epsilon must exceed -1");
    return -std::expm1(-std::log1p(epsilon) / (n + 1.0));
}

// eps^2 coefficient of the two-term expansion: (n+2) / (2 (n+1)^2).
inline double il_taylor_quadratic_coefficient(int n) {
    detail::check_il_exponent(n);
    const double np1 = n + 1.0;
    return (n + 2.0) / (2.0 * np1 * np1);
}

// 1 / (8 g(n)) = n / (2 (n+1)^2). Equals the coefficient above only as n -> inf.
inline double il_factor_matched_coefficient(int n) {
    return 1.0 / (8.0 * il_improvement_factor(n));
}

// eps/(n+1) - (n+2)/(2(n+1)^2) eps^2
inline double il_powerlaw_taylor(double epsilon, int n) {
    detail::check_il_exponent(n);
    return epsilon / (n + 1.0) - il_taylor_quadratic_coefficient(n) * epsilon * epsilon;
}

enum class IlModel { traditional, scaled, exact };

inline const char* to_string(IlModel m) {
    switch (m) {
        case IlModel::traditional: return "traditional";
        case IlModel::scaled: return "scaled";
        case IlModel::exact: return "exact";
    }
    return "?";
}

struct IlCurvePoint {
    double m{1.0};
    int n{1};
    double il_traditional{0.0};
    double il_scaled{0.0};
    double il_exact{0.0};
    // 1 - il_scaled / il_traditional; zero where there is no loss.
    double improvement{0.0};
};

// eps = m - 1 connects the multiplier form to the expansion form.
inline IlCurvePoint il_curve_point(double m, int n) {
    IlCurvePoint p;
    p.m = m;
    p.n = n;
    p.il_traditional = il_traditional(m);
    p.il_scaled = il_proposed_scaled(m, n);
    p.il_exact = il_powerlaw_exact(m - 1.0, n);
    p.improvement = p.il_traditional > 0.0 ? 1.0 - p.il_scaled / p.il_traditional : 0.0;
    return p;
}

}  // namespace bmm
