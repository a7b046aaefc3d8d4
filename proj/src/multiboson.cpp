#include "qhahn/multiboson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qhahn::multiboson {

namespace {
constexpr double kLatticeTol = 1e-9;
} // namespace

void validate_model(const MultibosonModel& m) {
    const int n = m.modes();
    if (n == 0) throw DomainError("validate_model: empty cluster vector");
    if (m.alpha.rows() != n || m.alpha.cols() != n)
        throw DomainError("validate_model: alpha must be (N+1)x(N+1)");
    bool all_zero = true;
    for (long ki : m.k) all_zero = all_zero && ki == 0;
    if (all_zero) throw DomainError("validate_model: k must be a nonzero vector");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(m.alpha);
    const double det = lu.determinant();
    const double scale = std::max(1.0, std::pow(m.alpha.cwiseAbs().maxCoeff(), n));
    if (std::abs(det) <= 1e-12 * scale)
        throw DomainError("validate_model: alpha is singular (det ~ 0)");

    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += m.alpha(i, j) * static_cast<double>(m.k[static_cast<std::size_t>(j)]);
        const double target = (i == 0) ? 1.0 : 0.0;
        if (std::abs(s - target) > 1e-12 * std::max(1.0, std::abs(s)))
            throw DomainError("validate_model: row " + std::to_string(i) +
                              " violates alpha*k = e_0 (got " + std::to_string(s) + ")");
    }
}

double cluster_polynomial(long k, long n) {
    if (k == 0) return 1.0;
    double prod = 1.0;
    if (k > 0) {
        for (long j = 1; j <= k; ++j) prod *= static_cast<double>(n + j);
    } else {
        if (n < -k) return 0.0;
        for (long j = 0; j < -k; ++j) prod *= static_cast<double>(n - j);
    }
    return prod;
}

double structural_G(const MultibosonModel& m, std::span<const long> occupations) {
    if (static_cast<int>(occupations.size()) != m.modes())
        throw DomainError("structural_G: occupation vector has wrong length");
    double pprod = 1.0;
    for (int i = 0; i < m.modes(); ++i) {
        pprod *= cluster_polynomial(m.k[static_cast<std::size_t>(i)], occupations[static_cast<std::size_t>(i)]);
        if (pprod == 0.0) return 0.0;
    }
    std::vector<double> occ(occupations.begin(), occupations.end());
    const double g = m.g0 ? m.g0(occ) : 1.0;
    return g * g * pprod;
}

DimensionClass dimension_class(const MultibosonModel& m) {
    bool pos = false, neg = false;
    for (long ki : m.k) {
        pos = pos || ki > 0;
        neg = neg || ki < 0;
    }
    return (pos && neg) ? DimensionClass::finite : DimensionClass::infinite;
}

VacuumDecomposition vacuum_lambdas(const MultibosonModel& m, std::span<const double> lambdas) {
    validate_model(m);
    if (m.k[0] <= 0)
        throw DomainError("vacuum_lambdas: requires k_0 > 0; permute mode labels to reach this branch");
    if (static_cast<int>(lambdas.size()) != m.modes() - 1)
        throw DomainError("vacuum_lambdas: expected N eigenvalues lambda_1..lambda_N");

    long kappa = 0;
    for (long ki : m.k) kappa = std::gcd(kappa, std::abs(ki));

    const Eigen::MatrixXd beta = m.alpha.inverse();
    double shift = 0.0;
    for (int j = 1; j < m.modes(); ++j) shift += beta(0, j) * lambdas[static_cast<std::size_t>(j) - 1];

    VacuumDecomposition out;
    out.kappa = kappa;
    const double k0 = static_cast<double>(m.k[0]);
    for (long idx = 0; idx < kappa; ++idx) {
        const long l = idx * (m.k[0] / kappa);
        out.labels.push_back(l);
        out.lambda0.push_back(static_cast<double>(l) / k0 - shift / k0);
    }
    return out;
}

ReducedSystem reduce(const MultibosonModel& m, std::span<const double> lambdas, long l,
                     const qcalc::QParam& q) {
    validate_model(m);
    if (dimension_class(m) == DimensionClass::finite)
        throw DomainError("reduce: finite-dimensional components are not supported");

    const VacuumDecomposition dec = vacuum_lambdas(m, lambdas);
    const auto it = std::find(dec.labels.begin(), dec.labels.end(), l);
    if (it == dec.labels.end())
        throw DomainError("reduce: label l is not in the vacuum label set L");
    const double lambda0l = dec.lambda0[static_cast<std::size_t>(it - dec.labels.begin())];

    const Eigen::MatrixXd beta = m.alpha.inverse();
    const std::vector<double> lam(lambdas.begin(), lambdas.end());
    const int nmodes = m.modes();

    // Occupations on the orbit line: n_j(lambda_0) = sum_i beta_ji lambda_i.
    auto occupations_at = [beta, lam, nmodes](double lambda0) {
        Eigen::VectorXd full(nmodes);
        full[0] = lambda0;
        for (int j = 1; j < nmodes; ++j) full[j] = lam[static_cast<std::size_t>(j) - 1];
        Eigen::VectorXd occ = beta * full;
        std::vector<long> out(static_cast<std::size_t>(nmodes));
        for (int j = 0; j < nmodes; ++j) {
            const double rounded = std::round(occ[j]);
            if (std::abs(occ[j] - rounded) > kLatticeTol)
                throw DomainError("reduce: recovered occupation is not integral on the orbit");
            out[static_cast<std::size_t>(j)] = static_cast<long>(rounded);
        }
        return out;
    };

    MultibosonModel model = m;
    auto r_eval = [model, occupations_at, lambda0l, lam](int n) {
        const std::vector<long> occ = occupations_at(lambda0l + n - 1);
        bool negative = false;
        for (long v : occ) negative = negative || v < 0;
        if (negative) {
            // below the vacuum: the cluster-polynomial product vanishes
            double pprod = 1.0;
            for (std::size_t i = 0; i < occ.size(); ++i)
                pprod *= cluster_polynomial(model.k[i], occ[i]);
            if (pprod != 0.0)
                throw DomainError("reduce: negative occupation with nonvanishing cluster product");
            return 0.0;
        }
        return structural_G(model, occ);
    };
    auto d_eval = [model, lambda0l, lam](int n) {
        std::vector<double> args(lam.size() + 1);
        args[0] = lambda0l + n;
        std::copy(lam.begin(), lam.end(), args.begin() + 1);
        return model.h0 ? model.h0(args) : 0.0;
    };

    ReducedSystem out{lam, l, lambda0l, dec.kappa, q,
                      StructuralSeq(r_eval, d_eval, SeqSource::from_multiboson)};
    if (out.seq.R(0) != 0.0)
        throw DomainError("reduce: vacuum condition R(q^0) = 0 failed");
    return out;
}

FockTruncation::FockTruncation(const MultibosonModel& m, int cutoff)
    : k_(m.k), cutoff_(cutoff) {
    const int nmodes = m.modes();
    long want = 1;
    for (int i = 0; i < nmodes; ++i) {
        want *= cutoff;
        if (want > kMaxOracleDim)
            throw DomainError("fock_oracle: cutoff^(N+1) exceeds the memory budget");
    }
    dim_ = want;

    // Per-mode lowering operator on the tensor basis: <n - e_i| a_i |n> = sqrt(n_i).
    a_.assign(static_cast<std::size_t>(nmodes), Eigen::MatrixXd::Zero(dim_, dim_));
    std::vector<long> stride(static_cast<std::size_t>(nmodes), 1);
    for (int i = nmodes - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * cutoff;

    for (long idx = 0; idx < dim_; ++idx) {
        const std::vector<long> occ = occupations(idx);
        for (int i = 0; i < nmodes; ++i) {
            const long ni = occ[static_cast<std::size_t>(i)];
            if (ni > 0) {
                const long jdx = idx - stride[static_cast<std::size_t>(i)];
                a_[static_cast<std::size_t>(i)](jdx, idx) = std::sqrt(static_cast<double>(ni));
            }
        }
    }

    // Cluster monomial with a^{-k} = (a*)^{k}: compose per-mode powers.
    Eigen::MatrixXd mono = Eigen::MatrixXd::Identity(dim_, dim_);
    for (int i = 0; i < nmodes; ++i) {
        const long ki = k_[static_cast<std::size_t>(i)];
        Eigen::MatrixXd op = Eigen::MatrixXd::Identity(dim_, dim_);
        const Eigen::MatrixXd base =
            ki >= 0 ? a_[static_cast<std::size_t>(i)]
                    : Eigen::MatrixXd(a_[static_cast<std::size_t>(i)].transpose());
        for (long p = 0; p < std::abs(ki); ++p) op = base * op;
        mono = mono * op; // different modes commute
    }
    Eigen::MatrixXd g0diag = Eigen::MatrixXd::Zero(dim_, dim_);
    for (long idx = 0; idx < dim_; ++idx) {
        const std::vector<long> occ = occupations(idx);
        std::vector<double> occd(occ.begin(), occ.end());
        g0diag(idx, idx) = m.g0 ? m.g0(occd) : 1.0;
    }
    A_ = g0diag * mono;
    Adag_ = A_.transpose();

    Ai_.assign(static_cast<std::size_t>(nmodes), Eigen::MatrixXd::Zero(dim_, dim_));
    for (int i = 0; i < nmodes; ++i) {
        for (long idx = 0; idx < dim_; ++idx) {
            const std::vector<long> occ = occupations(idx);
            double v = 0.0;
            for (int j = 0; j < nmodes; ++j)
                v += m.alpha(i, j) * static_cast<double>(occ[static_cast<std::size_t>(j)]);
            Ai_[static_cast<std::size_t>(i)](idx, idx) = v;
        }
    }
}

std::vector<long> FockTruncation::occupations(long index) const {
    std::vector<long> occ(k_.size());
    for (std::size_t i = k_.size(); i-- > 0;) {
        occ[i] = index % cutoff_;
        index /= cutoff_;
    }
    return occ;
}

long FockTruncation::index(std::span<const long> occupations) const {
    long idx = 0;
    for (std::size_t i = 0; i < occupations.size(); ++i) {
        if (occupations[i] < 0 || occupations[i] >= cutoff_) return -1;
        idx = idx * cutoff_ + occupations[i];
    }
    return idx;
}

bool FockTruncation::interior(long index) const {
    const std::vector<long> occ = occupations(index);
    for (std::size_t i = 0; i < occ.size(); ++i) {
        const long margin = std::abs(k_[i]);
        if (occ[i] < margin || occ[i] > cutoff_ - 1 - margin) return false;
    }
    return true;
}

FockTruncation fock_oracle(const MultibosonModel& m, int cutoff) {
    validate_model(m);
    long maxk = 0;
    for (long ki : m.k) maxk = std::max(maxk, std::abs(ki));
    if (cutoff < std::max(3L, 2 * maxk))
        throw DomainError("fock_oracle: cutoff must be >= max(3, 2 max|k_i|)");
    return FockTruncation(m, cutoff);
}

} // namespace qhahn::multiboson
