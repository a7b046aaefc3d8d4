// pearson.hpp — Pearson q-difference data, weight classification, support
//
// A model of the q-Hahn class is the pair of polynomials
//   A(w) = a1 w + a0,   B(w) = b2 w^2 + b1 w + b0,
// taken up to a common real factor. The weight rho solves the Pearson
// q-equation d_q(rho B) = rho A with vanishing boundary terms; its
// meromorphic solutions fall into eight cases distinguished by which of
// b0, b1 - (1-q) a0, b2 - (1-q) a1 vanish.
#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qhahn/qcalc.hpp"

namespace qhahn::pearson {

class DegenerateDataError : public DomainError {
public:
    using DomainError::DomainError;
};

class NoPositiveMeasureError : public DomainError {
public:
    using DomainError::DomainError;
};

struct PearsonData {
    double a1, a0;
    double b2, b1, b0;
    qcalc::QParam q;

    double A(double w) const { return a1 * w + a0; }
    double B(double w) const { return (b2 * w + b1) * w + b0; }
    // B(w) - (1-q) w A(w), the denominator polynomial of the Pearson ratio.
    double B_shifted(double w) const {
        return ((b2 - (1.0 - q.q) * a1) * w + (b1 - (1.0 - q.q) * a0)) * w + b0;
    }

    qcalc::Polynomial A_poly() const { return qcalc::Polynomial{a0, a1}; }
    qcalc::Polynomial B_poly() const { return qcalc::Polynomial{b0, b1, b2}; }

    double magnitude() const;
};

enum class WeightCase { i, ii, iii, iv, v, vi_a, vi_b, vii_a, vii_b, viii };

std::string_view to_string(WeightCase c);

// Roots of B(w) - (1-q) w A(w) relevant to the case (none, one real,
// two real, or a complex conjugate pair with im > 0).
struct ShiftedRoots {
    int count = 0;
    bool complex_pair = false;
    double c = 0.0, d = 0.0; // real roots, c <= d; d unused when count == 1
    double re = 0.0, im = 0.0;
};

struct WeightSpec {
    WeightCase tag;
    // Roots of B named as in the classification: for cases i-iii the
    // endpoints a < 0 < b; for iv-vi the single nonzero root a.
    double root_a = 0.0;
    std::optional<double> root_b;
    ShiftedRoots shifted;
    std::optional<double> r;
    double support_lo = 0.0, support_hi = 0.0;
};

// Evaluates the case conditions in the order i)-viii), computes the roots
// and the exponent r, then applies the positivity/support rules. Throws
// DegenerateDataError when A and B are both zero, NoPositiveMeasureError
// when the case is rejected (vii, viii, or failed root conditions).
WeightSpec classify(const PearsonData& data);

// Case formula for rho(omega); infinite products truncated at tol.
double weight_eval(const WeightSpec& spec, const PearsonData& data, double omega, double tol);

// Sign and log-magnitude of rho(omega). Deep nodes of the omega^{-1} cases
// underflow binary64; this form keeps sign information at any depth.
struct SignedLog {
    int sign = 0;    // -1, 0, +1
    double log = 0.0; // log |rho|, meaningful when sign != 0
};
SignedLog weight_eval_log(const WeightSpec& spec, const PearsonData& data, double omega,
                          double tol);

// d_q(rho B)(omega) - (rho A)(omega); zero up to roundoff for a correct pair.
double pearson_residual(const PearsonData& data, const WeightSpec& spec, double omega);

// k-th derived Pearson data (A^{(k)}, B): the pair whose weight is
// rho(q^k w) B(qw)...B(q^k w). The derived linear part is
//   A^{(k)}(w) = q^k A(q^k w) + sum_{j=0}^{k-1} q^j (d_q B)(q^j w),
// i.e. a1 -> a1 q^{2k} + b2 [2k],  a0 -> a0 q^k + b1 [k].
PearsonData derive(const PearsonData& data, int k);

struct GridNode {
    double omega;
    double weight; // Jackson measure factor (1-q) q^k |endpoint|
};

// First `depth` Jackson nodes per support endpoint, interleaved by level.
std::vector<GridNode> support_grid(const WeightSpec& spec, const qcalc::QParam& q, int depth);

} // namespace qhahn::pearson
