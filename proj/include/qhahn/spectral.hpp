// spectral.hpp — Jacobi operators, truncated spectra, amplitudes
#pragma once

#include <complex>
#include <vector>

#include "qhahn/qcalc.hpp"
#include "qhahn/structural.hpp"

namespace qhahn::spectral {

// Symmetric tridiagonal truncation of H_red: diag[n] = D(q^n),
// offdiag[n] = sqrt(R(q^{n+1})).
struct JacobiOperator {
    std::vector<double> diag;
    std::vector<double> offdiag;
    int size = 0;
};

JacobiOperator jacobi_matrix(const StructuralSeq& seq, int M);

// Discrete spectral measure: nodes strictly increasing; weights sum to 1
// when normalized. The truncated eigensystem yields the M-point Gauss rule
// of the underlying measure.
struct DiscreteMeasure {
    std::vector<double> nodes;
    std::vector<double> weights;
    bool normalized = false;

    double moment(int p) const;
};

DiscreteMeasure spectrum(const JacobiOperator& J);

enum class JacobiType { D, C_candidate, inconclusive };

struct TypeVerdict {
    JacobiType verdict = JacobiType::inconclusive;
    double partial_sum = 0.0;   // sum_{n<=horizon} R(q^n)^{-1/2}
    int horizon = 0;
    double decay_exponent = 0.0; // fitted p in terms ~ n^{-p}
    bool analytic_override = false;
};

// Heuristic deficiency-index trichotomy from the terms 1/sqrt(R(q^n)):
// divergence certain (type D) when the fitted decay exponent stays below
// the p-series threshold, C-candidate when the terms decay faster than
// n^{-1.1}. Pearson-derived sequences are type D analytically and are
// tagged as such regardless of the fit.
TypeVerdict classify_type(const StructuralSeq& seq, int horizon);

// Exp_R(x) = sum_n x^n / (R(q)...R(q^n)); throws when the terms grow.
double exp_R(const StructuralSeq& seq, double x, double tol);

struct RecurrenceSolutions {
    std::vector<double> P; // P_0..P_N, P_0 = 1, P_1 = (w - D(1))/sqrt(R(q))
    std::vector<double> Q; // Q_0..Q_N, Q_0 = 0, Q_1 = 1/sqrt(R(q))
};

RecurrenceSolutions recurrence_solutions(const StructuralSeq& seq, double omega, int N);

struct NevanlinnaPartial {
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
    double last_increment = 0.0; // magnitude of the final partial-sum update
};

NevanlinnaPartial nevanlinna_partial(const StructuralSeq& seq, double omega, int N);

// sum_i weight_i exp(i node_i t) for a normalized measure.
std::complex<double> vacuum_amplitude(const DiscreteMeasure& measure, double t);

} // namespace qhahn::spectral
