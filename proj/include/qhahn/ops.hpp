// ops.hpp — q-Hahn orthogonal polynomial systems
//
// Three independent constructions of the monic OPS attached to Pearson
// data, kept as separate public routes because their agreement is the main
// verification surface of the theory:
//   * three-term recurrence driven by the structural functions R_AB, D_AB,
//   * Rodrigues formula via the exact R_{k,n} polynomial recurrence,
//   * forward operator products (A^{(k)} + B d_q Q^{-1}) applied to 1.
#pragma once

#include <vector>

#include "qhahn/pearson.hpp"
#include "qhahn/structural.hpp"

namespace qhahn::ops {

struct MonicOps {
    std::vector<qcalc::Polynomial> polys; // index n = 0..N, monic of degree n
    pearson::PearsonData data;
};

// beta(x): the rational function whose increment gives D_AB; also the
// omega^{n-1} coefficient of the monic polynomial at x = q^n.
double beta_function(const pearson::PearsonData& data, double x);

// eta(x): the rational function entering R_AB; also the omega^{n-2}
// coefficient of the monic polynomial at x = q^n.
double eta_function(const pearson::PearsonData& data, double x);

// Structural functions memoized on the grid x = q^n:
//   R_AB(x) = (1-q) x [d_q eta - beta d_q beta](x),
//   D_AB(x) = (1-q) x  d_q beta(x).
// Throws DomainError if a denominator (a1(1-q)-b2) x^2 + b2 q^2 (or the
// q^3 variant) vanishes at a grid point.
StructuralSeq structural_functions(const pearson::PearsonData& data);

MonicOps ops_by_recurrence(const pearson::PearsonData& data, int N);
MonicOps ops_by_rodrigues(const pearson::PearsonData& data, int N);
MonicOps ops_by_forward(const pearson::PearsonData& data, int N);

// Hahn difference operator A d_q + B d_q Q^{-1} d_q on exact coefficients.
qcalc::Polynomial hahn_apply(const pearson::PearsonData& data, const qcalc::Polynomial& p);

// Eigenvalue of the Hahn operator on degree n: a1 [n] + b2 [n][n-1] q^{-(n-1)}.
double hahn_eigenvalue(const pearson::PearsonData& data, int n);

struct NormalizedPoly {
    qcalc::Polynomial poly;
    double norm; // ||P~_n|| under d sigma_AB
};

// Orthonormal system P_n = P~_n / ||P~_n||. Norms come from Jackson
// integration of P~_n^2 rho and must agree with the monic-norm product
// mu0 * prod R_AB(q^k); disagreement or a nonpositive norm is an error.
std::vector<NormalizedPoly> orthonormalize(const MonicOps& ops, const pearson::WeightSpec& spec,
                                           double tol);

// Monic-normalized k-th q-derivative of P~_n: d_q^k P~_n / ([n][n-1]...[n-k+1]).
// Equals element n-k of the OPS for the derived data (A^{(k)}, B).
qcalc::Polynomial qderiv_closure(const pearson::PearsonData& data, int n, int k);

} // namespace qhahn::ops
