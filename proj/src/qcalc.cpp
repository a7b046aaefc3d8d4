#include "qhahn/qcalc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace qhahn::qcalc {

double q_bracket(long n, const QParam& q) {
    if (n == 0) return 0.0;
    return (1.0 - std::pow(q.q, static_cast<double>(n))) / (1.0 - q.q);
}

double q_pochhammer(double x, const QParam& q, int k) {
    if (k < 0) throw DomainError("q_pochhammer: finite index must be >= 0");
    double prod = 1.0;
    double qj = 1.0;
    for (int j = 0; j < k; ++j) {
        prod *= 1.0 - qj * x;
        qj *= q.q;
    }
    return prod;
}

double q_pochhammer_inf(double x, const QParam& q, double tol) {
    if (!(tol > 0.0)) throw DomainError("q_pochhammer_inf: tol must be positive");
    double prod = 1.0;
    double qjx = x;
    for (int j = 0; j < kMaxIterations; ++j) {
        if (std::abs(qjx) < tol) return prod;
        prod *= 1.0 - qjx;
        qjx *= q.q;
    }
    throw NonConvergenceError("q_pochhammer_inf: factor did not reach tolerance within cap");
}

double q_pochhammer_real(double x, const QParam& q, double r, double tol) {
    return q_pochhammer_inf(x, q, tol) / q_pochhammer_inf(x * std::pow(q.q, r), q, tol);
}

double q_pochhammer_inf_conj_pair(double x, double re, double im, const QParam& q, double tol) {
    // (1 - q^j x/c)(1 - q^j x/conj(c)) = 1 - 2 Re(c)/|c|^2 q^j x + q^{2j} x^2/|c|^2
    const double mod2 = re * re + im * im;
    if (mod2 == 0.0) throw DomainError("q_pochhammer_inf_conj_pair: zero root");
    const double s = 2.0 * re / mod2;
    const double p = 1.0 / mod2;
    double prod = 1.0;
    double qj = 1.0;
    for (int j = 0; j < kMaxIterations; ++j) {
        const double u = qj * x;
        if (std::abs(u) * (std::abs(s) + std::abs(u) * p) < tol) return prod;
        prod *= 1.0 - s * u + p * u * u;
        qj *= q.q;
    }
    throw NonConvergenceError("q_pochhammer_inf_conj_pair: factor did not reach tolerance within cap");
}

Polynomial q_derivative(const Polynomial& p, const QParam& q) {
    if (p.degree() <= 0) return {};
    std::vector<double> c(static_cast<std::size_t>(p.degree()), 0.0);
    for (int k = 1; k <= p.degree(); ++k)
        c[static_cast<std::size_t>(k - 1)] = q_bracket(k, q) * p[k];
    return Polynomial(std::move(c));
}

Polynomial scale_argument(const Polynomial& p, double c) {
    if (c == 0.0 && p.degree() > 0)
        throw DomainError("scale_argument: scale factor must be nonzero");
    std::vector<double> out(p.coeffs().begin(), p.coeffs().end());
    double ck = 1.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] *= ck;
        ck *= c;
    }
    return Polynomial(std::move(out));
}

double qh_derivative(const std::function<double(double)>& f, double x, const AffineParams& p) {
    const double xs = p.q * x + p.h;
    const double dx = x - xs;
    if (dx == 0.0)
        throw DomainError("qh_derivative: x is the fixed point of the affine map");
    return (f(x) - f(xs)) / dx;
}

namespace {

// One-sided Jackson sum (1-q) sum_k q^k e f(q^k e) for endpoint e, sharing
// the truncation policy: stop once the geometric tail bound, built from the
// sup of the last few node contributions, falls below tol.
double jackson_endpoint_sum(const std::function<double(double)>& f, double e, const QParam& q,
                            double tol) {
    if (e == 0.0) return 0.0;
    constexpr int kWindow = 8;
    constexpr int kMinTerms = 24;
    double sum = 0.0;
    double qk = 1.0;
    std::deque<double> recent;
    for (int k = 0; k < kMaxIterations; ++k) {
        const double contrib = e * f(qk * e);
        sum += (1.0 - q.q) * qk * contrib;
        recent.push_back(std::abs(contrib));
        if (recent.size() > kWindow) recent.pop_front();
        const double sup = *std::max_element(recent.begin(), recent.end());
        // tail: sum_{j>k} (1-q) q^j |contrib| <= q^{k+1} sup
        if (k >= kMinTerms && qk * q.q * sup < tol) return sum;
        qk *= q.q;
    }
    throw NonConvergenceError("jackson_integral: tail bound not reached within iteration cap");
}

} // namespace

double jackson_integral(const std::function<double(double)>& f, double a, double b,
                        const QParam& q, double tol) {
    if (!(tol > 0.0)) throw DomainError("jackson_integral: tol must be positive");
    return jackson_endpoint_sum(f, b, q, tol) - jackson_endpoint_sum(f, a, q, tol);
}

double qh_integral(const std::function<double(double)>& f, double x, const AffineParams& p,
                   double tol) {
    if (!(tol > 0.0)) throw DomainError("qh_integral: tol must be positive");
    if (!(p.q < 1.0))
        throw DomainError("qh_integral: requires q < 1 so the fixed point exists");
    const double xinf = p.h / (1.0 - p.q);
    const double step = x - (p.q * x + p.h);
    if (step == 0.0) return 0.0;
    constexpr int kWindow = 8;
    constexpr int kMinTerms = 24;
    double sum = 0.0;
    double qk = 1.0;
    double prev_fv = 0.0;
    std::deque<double> recent;
    for (int k = 0; k < kMaxIterations; ++k) {
        const double node = qk * x + (1.0 - qk) * xinf;
        if (k > 0 && node == xinf) {
            // the node sequence has collapsed onto the fixed point; close the
            // remaining geometric tail with the last sampled value
            return sum + step * qk * prev_fv / (1.0 - p.q);
        }
        const double fv = f(node);
        prev_fv = fv;
        sum += step * qk * fv;
        recent.push_back(std::abs(step * fv));
        if (recent.size() > kWindow) recent.pop_front();
        const double sup = *std::max_element(recent.begin(), recent.end());
        if (k >= kMinTerms && qk * p.q / (1.0 - p.q) * sup < tol) return sum;
        qk *= p.q;
    }
    throw NonConvergenceError("qh_integral: tail bound not reached within iteration cap");
}

} // namespace qhahn::qcalc
