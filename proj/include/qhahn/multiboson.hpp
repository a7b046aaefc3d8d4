// multiboson.hpp — reduction of (N+1)-mode cluster Hamiltonians
//
// H = H0(A_0..A_N) + A + A* with A = g0(n) a_0^{k0}...a_N^{kN} and
// A_i = sum_j alpha_ij a_j* a_j. On each irreducible component the pair
// (A*A, AA*) is diagonal with values given by a single structural function,
// which this module evaluates and hands to the spectral machinery as
// sequences R(q^n), D(q^n). A dense truncated Fock-space oracle provides
// the brute-force counterpart for every identity used here.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "qhahn/qcalc.hpp"
#include "qhahn/structural.hpp"

namespace qhahn::multiboson {

using OccupationFn = std::function<double(std::span<const double>)>;

struct MultibosonModel {
    std::vector<long> k;                    // cluster exponents, length N+1
    Eigen::MatrixXd alpha;                  // (N+1)x(N+1), alpha * k = e_0
    OccupationFn g0;                        // coupling, function of occupations
    OccupationFn h0;                        // free part, function of (lambda_0..lambda_N)

    int modes() const { return static_cast<int>(k.size()); } // N+1
};

// det(alpha) != 0 and alpha * k = e_0 (componentwise, 1e-12 relative).
void validate_model(const MultibosonModel& m);

// P_k(n) = a^k a^{-k} evaluated at occupation n:
//   k>0: (n+1)...(n+k),  k=0: 1,  k<0: n(n-1)...(n+k+1) (zero when n < |k|).
double cluster_polynomial(long k, long n);

// AA* diagonal: |g0(n)|^2 prod_i P_{k_i}(n_i). The A*A diagonal is the same
// function at n - k. Occupations where the P-product vanishes short-circuit
// to zero without evaluating g0.
double structural_G(const MultibosonModel& m, std::span<const long> occupations);

enum class DimensionClass { finite, infinite };

// finite iff some pair k_i k_j < 0 (orbits terminate in both directions).
DimensionClass dimension_class(const MultibosonModel& m);

struct VacuumDecomposition {
    long kappa;                  // gcd |k_0|,..,|k_N|
    std::vector<long> labels;    // L = {0, k0/kappa, ..., (kappa-1) k0/kappa}
    std::vector<double> lambda0; // lambda_{0,l} per label
};

// Solves A|v> = 0 on the lambda_0 line for fixed lambda_1..lambda_N;
// requires k_0 > 0 (other sign patterns are reachable by permuting modes).
VacuumDecomposition vacuum_lambdas(const MultibosonModel& m, std::span<const double> lambdas);

struct ReducedSystem {
    std::vector<double> lambdas;
    long l = 0;
    double lambda0l = 0.0;
    long kappa = 1;
    qcalc::QParam q;
    StructuralSeq seq; // R(q^n) = G at lambda_0 = lambda0l + n - 1, D(q^n) = H0 at lambda0l + n
};

// Infinite-dimensional components only; occupations along the orbit are
// recovered through beta = alpha^{-1} and must be integers to 1e-9.
ReducedSystem reduce(const MultibosonModel& m, std::span<const double> lambdas, long l,
                     const qcalc::QParam& q);

// Dense matrices on the truncated tensor basis |n_0..n_N>, n_i < cutoff.
class FockTruncation {
public:
    FockTruncation(const MultibosonModel& m, int cutoff);

    int cutoff() const { return cutoff_; }
    long dim() const { return dim_; }
    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& Adag() const { return Adag_; }
    const Eigen::MatrixXd& Ai(int i) const { return Ai_.at(static_cast<std::size_t>(i)); }
    const Eigen::MatrixXd& lowering(int mode) const { return a_.at(static_cast<std::size_t>(mode)); }

    std::vector<long> occupations(long index) const;
    long index(std::span<const long> occupations) const; // -1 if out of range

    // Interior states keep every mode at least |k_i| away from both the
    // zero boundary and the cutoff, so cluster moves never clip.
    bool interior(long index) const;

private:
    std::vector<long> k_;
    int cutoff_;
    long dim_;
    std::vector<Eigen::MatrixXd> a_;  // per-mode lowering operators
    std::vector<Eigen::MatrixXd> Ai_;
    Eigen::MatrixXd A_, Adag_;
};

// Memory guard: cutoff^{N+1} must stay within kMaxOracleDim.
inline constexpr long kMaxOracleDim = 8192;

FockTruncation fock_oracle(const MultibosonModel& m, int cutoff);

} // namespace qhahn::multiboson
