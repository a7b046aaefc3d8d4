// qcalc.hpp — q- and (q,h)-difference calculus primitives
//
// Everything here is a pure function of its inputs; values are immutable
// after construction and safe to share across threads.
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "qhahn/errors.hpp"

namespace qhahn::qcalc {

// Hard cap for all truncated q-series and q-products. With 0 < q < 1 the
// terms decay geometrically, so hitting the cap signals bad input rather
// than slow convergence.
inline constexpr int kMaxIterations = 10000;

// Deformation parameter, restricted to 0 < q < 1.
struct QParam {
    double q;

    explicit QParam(double q_) : q(q_) {
        if (!(q > 0.0) || !(q < 1.0))
            throw DomainError("QParam: q must satisfy 0 < q < 1, got q=" + std::to_string(q_));
    }
};

// Parameters (q,h) of the affine map x -> qx + h, with q > 0.
struct AffineParams {
    double q;
    double h;

    AffineParams(double q_, double h_) : q(q_), h(h_) {
        if (!(q > 0.0))
            throw DomainError("AffineParams: q must be positive");
    }
};

// Dense real polynomial in the monomial basis, lowest degree first.
// The zero polynomial is the empty coefficient vector (degree -1);
// otherwise the leading coefficient is nonzero. Only exactly-zero leading
// coefficients are trimmed, so degree bookkeeping stays exact.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial monomial(int degree, double coeff = 1.0) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
        c.back() = coeff;
        return Polynomial(std::move(c));
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    std::span<const double> coeffs() const { return coeffs_; }

    // Coefficient of omega^k; zero outside the stored range.
    double operator[](int k) const {
        return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<std::size_t>(k)] : 0.0;
    }

    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
        return acc;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[static_cast<int>(i)] - b[static_cast<int>(i)];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(double s, const Polynomial& a) {
        std::vector<double> c(a.coeffs_);
        for (double& x : c) x *= s;
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, double s) { return s * a; }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

// q-bracket [n] = (1 - q^n)/(1 - q); accepts negative n.
double q_bracket(long n, const QParam& q);

// Finite q-Pochhammer (x;q)_k = prod_{j=0}^{k-1} (1 - q^j x).
double q_pochhammer(double x, const QParam& q, int k);

// Infinite product (x;q)_inf, truncated once |q^j x| < tol; the relative
// truncation error is bounded by the geometric tail tol*q/(1-q).
double q_pochhammer_inf(double x, const QParam& q, double tol);

// (x;q)_r for real r >= 0, defined as (x;q)_inf / (x q^r;q)_inf.
// Coincides with the finite product at integer r.
double q_pochhammer_real(double x, const QParam& q, double r, double tol);

// Paired product prod_j (1 - q^j x/c)(1 - q^j x/cbar) for a complex
// conjugate pair c = re + i*im; the value is real.
double q_pochhammer_inf_conj_pair(double x, double re, double im, const QParam& q, double tol);

// Exact coefficient-level q-derivative: omega^k -> [k] omega^{k-1}.
Polynomial q_derivative(const Polynomial& p, const QParam& q);

// Argument scaling p(omega) -> p(c*omega): coefficient c_k -> c^k c_k.
// Implements the operator Q (c = q) and its inverse (c = 1/q).
Polynomial scale_argument(const Polynomial& p, double c);

// (q,h)-derivative (f(x) - f(qx+h)) / (x - (qx+h)); throws at the fixed
// point x = h/(1-q).
double qh_derivative(const std::function<double(double)>& f, double x, const AffineParams& p);

// Jackson integral over [a,b]:
//   (1-q) sum_{k>=0} q^k [ b f(q^k b) - a f(q^k a) ],
// truncated when the geometric tail bound (q^{k+1} times the sup of recent
// node contributions) drops below tol.
double jackson_integral(const std::function<double(double)>& f, double a, double b,
                        const QParam& q, double tol);

// (q,h)-integral from the fixed point x^inf = h/(1-q) up to x:
//   sum_{k>=0} [x - (qx+h)] q^k f(q^k x + (1-q^k) h/(1-q)).
// Requires q < 1 so that the fixed point exists.
double qh_integral(const std::function<double(double)>& f, double x, const AffineParams& p,
                   double tol);

} // namespace qhahn::qcalc
