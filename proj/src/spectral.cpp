#include "qhahn/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace qhahn::spectral {

JacobiOperator jacobi_matrix(const StructuralSeq& seq, int M) {
    if (M < 1) throw DomainError("jacobi_matrix: M must be >= 1");
    JacobiOperator J;
    J.size = M;
    J.diag.reserve(static_cast<std::size_t>(M));
    J.offdiag.reserve(static_cast<std::size_t>(M) - 1);
    for (int n = 0; n < M; ++n) J.diag.push_back(seq.D(n));
    for (int n = 0; n + 1 < M; ++n) {
        const double r = seq.R(n + 1);
        if (!(r > 0.0))
            throw DomainError("jacobi_matrix: R(q^" + std::to_string(n + 1) +
                              ") is not positive, invalid structural data");
        J.offdiag.push_back(std::sqrt(r));
    }
    return J;
}

double DiscreteMeasure::moment(int p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * std::pow(nodes[i], p);
    return s;
}

DiscreteMeasure spectrum(const JacobiOperator& J) {
    Eigen::VectorXd diag(J.size);
    Eigen::VectorXd sub(std::max(J.size - 1, 0));
    for (int i = 0; i < J.size; ++i) diag[i] = J.diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < J.size; ++i) sub[i] = J.offdiag[static_cast<std::size_t>(i)];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NonConvergenceError("spectrum: tridiagonal eigensolver did not converge");

    DiscreteMeasure out;
    out.normalized = true;
    out.nodes.resize(static_cast<std::size_t>(J.size));
    out.weights.resize(static_cast<std::size_t>(J.size));
    double wsum = 0.0;
    for (int i = 0; i < J.size; ++i) {
        out.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
        const double first = solver.eigenvectors()(0, i);
        out.weights[static_cast<std::size_t>(i)] = first * first;
        wsum += first * first;
    }
    // eigenvector roundoff leaves the total a few ulp off 1; renormalize
    for (double& w : out.weights) w /= wsum;
    return out;
}

TypeVerdict classify_type(const StructuralSeq& seq, int horizon) {
    if (horizon < 10) throw DomainError("classify_type: horizon must be >= 10");
    TypeVerdict out;
    out.horizon = horizon;

    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(horizon));
    for (int n = 1; n <= horizon; ++n) {
        const double r = seq.R(n);
        if (!(r > 0.0)) throw DomainError("classify_type: R(q^n) must be positive");
        const double t = 1.0 / std::sqrt(r);
        terms.push_back(t);
        out.partial_sum += t;
    }

    // Least-squares slope of log t_n vs log n over the tail half: terms
    // ~ n^{-p}; p < 0.9 certifies divergence by p-series comparison.
    const int lo = horizon / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int n = lo; n <= horizon; ++n) {
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(terms[static_cast<std::size_t>(n) - 1]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    out.decay_exponent = -slope;

    if (seq.source() == SeqSource::from_pearson) {
        // analytic statement: R_AB(0) = 0, operator essentially self-adjoint
        out.verdict = JacobiType::D;
        out.analytic_override = true;
        return out;
    }
    if (out.decay_exponent < 0.9)
        out.verdict = JacobiType::D;
    else if (out.decay_exponent > 1.1)
        out.verdict = JacobiType::C_candidate;
    else
        out.verdict = JacobiType::inconclusive;
    return out;
}

double exp_R(const StructuralSeq& seq, double x, double tol) {
    if (!(tol > 0.0)) throw DomainError("exp_R: tol must be positive");
    double sum = 1.0, term = 1.0;
    int growth_run = 0;
    for (int n = 1; n < qcalc::kMaxIterations; ++n) {
        const double r = seq.R(n);
        if (!(r > 0.0)) throw DomainError("exp_R: R(q^n) must be positive");
        const double prev = std::abs(term);
        term *= x / r;
        if (!std::isfinite(term))
            throw DomainError("exp_R: terms overflow, |x| is outside the convergence disc");
        sum += term;
        growth_run = (std::abs(term) > prev) ? growth_run + 1 : 0;
        if (growth_run > 8 && std::abs(term) > 1e50)
            throw DomainError("exp_R: terms grow, |x| is outside the convergence disc");
        if (std::abs(term) <= tol * std::max(1.0, std::abs(sum)) && n > 4) return sum;
    }
    throw NonConvergenceError("exp_R: series did not reach tolerance within cap");
}

RecurrenceSolutions recurrence_solutions(const StructuralSeq& seq, double omega, int N) {
    if (N < 1) throw DomainError("recurrence_solutions: N must be >= 1");
    RecurrenceSolutions out;
    out.P.resize(static_cast<std::size_t>(N) + 1);
    out.Q.resize(static_cast<std::size_t>(N) + 1);
    const double r1 = seq.R(1);
    if (!(r1 > 0.0)) throw DomainError("recurrence_solutions: R(q) must be positive");
    out.P[0] = 1.0;
    out.P[1] = (omega - seq.D(0)) / std::sqrt(r1);
    out.Q[0] = 0.0;
    out.Q[1] = 1.0 / std::sqrt(r1);
    for (int n = 1; n < N; ++n) {
        const double rn = seq.R(n);
        const double rn1 = seq.R(n + 1);
        if (!(rn1 > 0.0)) throw DomainError("recurrence_solutions: R(q^n) must be positive");
        const double dn = seq.D(n);
        out.P[static_cast<std::size_t>(n) + 1] =
            ((omega - dn) * out.P[static_cast<std::size_t>(n)] -
             std::sqrt(rn) * out.P[static_cast<std::size_t>(n) - 1]) / std::sqrt(rn1);
        out.Q[static_cast<std::size_t>(n) + 1] =
            ((omega - dn) * out.Q[static_cast<std::size_t>(n)] -
             std::sqrt(rn) * out.Q[static_cast<std::size_t>(n) - 1]) / std::sqrt(rn1);
    }
    return out;
}

NevanlinnaPartial nevanlinna_partial(const StructuralSeq& seq, double omega, int N) {
    NevanlinnaPartial out;
    out.B = -1.0;
    out.C = 1.0;
    if (N < 1) return out;
    const RecurrenceSolutions at_w = recurrence_solutions(seq, omega, N);
    const RecurrenceSolutions at_0 = recurrence_solutions(seq, 0.0, N);
    double sA = 0, sB = 0, sC = 0, sD = 0;
    for (int k = 0; k <= N; ++k) {
        sA += at_0.Q[static_cast<std::size_t>(k)] * at_w.Q[static_cast<std::size_t>(k)];
        sB += at_0.Q[static_cast<std::size_t>(k)] * at_w.P[static_cast<std::size_t>(k)];
        sC += at_0.P[static_cast<std::size_t>(k)] * at_w.Q[static_cast<std::size_t>(k)];
        sD += at_0.P[static_cast<std::size_t>(k)] * at_w.P[static_cast<std::size_t>(k)];
    }
    out.A = omega * sA;
    out.B = -1.0 + omega * sB;
    out.C = 1.0 + omega * sC;
    out.D = omega * sD;
    out.last_increment =
        std::abs(omega) *
        std::max({std::abs(at_0.Q[static_cast<std::size_t>(N)] * at_w.Q[static_cast<std::size_t>(N)]),
                  std::abs(at_0.Q[static_cast<std::size_t>(N)] * at_w.P[static_cast<std::size_t>(N)]),
                  std::abs(at_0.P[static_cast<std::size_t>(N)] * at_w.Q[static_cast<std::size_t>(N)]),
                  std::abs(at_0.P[static_cast<std::size_t>(N)] * at_w.P[static_cast<std::size_t>(N)])});
    return out;
}

std::complex<double> vacuum_amplitude(const DiscreteMeasure& measure, double t) {
    if (!measure.normalized) throw DomainError("vacuum_amplitude: measure must be normalized");
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = 0; i < measure.nodes.size(); ++i)
        s += measure.weights[i] * std::exp(std::complex<double>(0.0, measure.nodes[i] * t));
    return s;
}

} // namespace qhahn::spectral
