// moments.hpp — moment sequences of d sigma_AB by four routes
//
// Moments satisfy the three-term recurrence obtained by q-integrating the
// Pearson equation against omega^n q^n; mu_0 has closed forms per weight
// case; direct Jackson integration is the brute-force oracle; and for
// B(1) = 0 the moment function is spanned by an R-exponential series and a
// numerically propagated second solution.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "qhahn/pearson.hpp"
#include "qhahn/structural.hpp"

namespace qhahn::moments {

enum class MomentSource { recurrence, direct, hypergeometric };

struct MomentSeq {
    std::vector<double> mu; // mu_0 .. mu_N
    MomentSource source;
};

// mu_1 = -a0 mu_0 / a1, then
//   -[n](b2 mu_{n+1} + b1 mu_n + b0 mu_{n-1}) = q^n (a1 mu_{n+1} + a0 mu_n)
// solved forward for mu_{n+1}.
MomentSeq moments_by_recurrence(const pearson::PearsonData& data, double mu0, int N);

// Closed-form mu_0 for cases i-vi; unsupported for vii, viii.
double mu0_closed_form(const pearson::WeightSpec& spec, const pearson::PearsonData& data);

// Shifted-exponent closed form for cases iv-vi: mu_n is mu_0 with r -> r+n.
double moment_closed_form_shifted_r(const pearson::WeightSpec& spec,
                                    const pearson::PearsonData& data, int n);

// Brute-force oracle: mu_n = Jackson integral of omega^n rho(omega).
double moments_direct(const pearson::WeightSpec& spec, const pearson::PearsonData& data, int n,
                      double tol);

struct QHypergeometricParams {
    std::array<double, 3> numerator;
    std::array<double, 2> denominator;
    double q;
    double z;
};

// 3phi2 basic hypergeometric series,
//   sum_k (a1;q)_k (a2;q)_k (a3;q)_k / ((b1;q)_k (b2;q)_k (q;q)_k) z^k,
// with unit unbalanced factor; zero parameters drop their Pochhammer.
double q_hypergeometric_3phi2(const QHypergeometricParams& params, double tol);

// The q^n-grid sequence R_mom(q^j) = B(q^j) / Bshifted(q^{j-1}) whose
// R-exponential solves the moment q-difference equation when B(1) = 0.
StructuralSeq moment_structural_seq(const pearson::PearsonData& data);

// mu_n as c1 mu1(q^{n+1}) + c2 mu2(q^{n+1}) on the B(1) = 0 branch, with
// c1, c2 fixed by mu_0 and the relation a0 mu_0 + a1 mu_1 = 0; falls back
// to the recurrence when B(1) != 0.
double moment_function(const pearson::PearsonData& data, int n, double mu0);

// Convenience overload: mu_0 from direct integration of the classified weight.
double moment_function(const pearson::PearsonData& data, int n);

struct WronskianReport {
    bool available = false;
    std::string reason;
    double max_rel_dev = 0.0;
    int points = 0;
};

// Checks the q-Casorati determinant of the two moment solutions against the
// closed form C omega^lambda / (omega;q)_inf with q^lambda = b0/b2, i.e.
// the ratio law W(q omega) = (b0/b2)(1 - omega) W(omega), on q^m, m = 1..horizon.
// Unavailable when b0 = 0, b2/b0 < 0, or B(1) != 0.
WronskianReport wronskian_check(const pearson::PearsonData& data, int horizon);

} // namespace qhahn::moments
