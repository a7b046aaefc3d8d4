#include "qhahn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace qhahn::ops {

using pearson::PearsonData;
using qcalc::Polynomial;
using qcalc::q_bracket;
using qcalc::q_derivative;
using qcalc::scale_argument;

namespace {

double denom_or_throw(const PearsonData& data, double x, double qpow) {
    const double q = data.q.q;
    const double den = (data.a1 * (1.0 - q) - data.b2) * x * x + data.b2 * qpow;
    const double scale = std::max(std::abs(data.a1 * (1.0 - q) - data.b2) * x * x,
                                  std::abs(data.b2) * qpow);
    if (std::abs(den) <= 1e-14 * std::max(scale, 1e-300))
        throw DomainError("structural functions: denominator vanishes at x=" + std::to_string(x));
    return den;
}

} // namespace

double beta_function(const PearsonData& data, double x) {
    const double q = data.q.q;
    const double num = q * (1.0 - x) * ((data.a0 * (1.0 - q) - data.b1) * x + data.b1 * q);
    return num / ((1.0 - q) * denom_or_throw(data, x, q * q));
}

double eta_function(const PearsonData& data, double x) {
    const double q = data.q.q;
    const double u = data.a0 * (1.0 - q) - data.b1;
    const double t1 = (u * x + data.b1 * q * q) * (u * x + data.b1 * q) /
                      (denom_or_throw(data, x, q * q) * denom_or_throw(data, x, q * q * q));
    const double t2 = data.b0 * (1.0 - q) / denom_or_throw(data, x, q * q * q);
    // the factor (1 - x/q) is written so that x = q gives an exact zero
    return (t1 + t2) * q * q * q * (1.0 - x) * (1.0 - x / q) / ((1.0 - q) * (1.0 - q) * (1.0 + q));
}

namespace {

// Polynomial together with a coefficient-wise roundoff magnitude bound,
// so that analytically-vanishing low-order coefficients of the structural
// numerators can be recognized and zeroed. Without this, R_AB(q^n), which
// decays like q^{2n}, drowns in the cancellation noise of eta(x) - eta(qx)
// long before n reaches the truncation sizes the spectral module needs.
struct TrackedPoly {
    Polynomial val;
    std::vector<double> mag; // >= sum of |summand| per coefficient

    static TrackedPoly from(const Polynomial& p) {
        TrackedPoly t{p, {}};
        t.mag.resize(static_cast<std::size_t>(p.degree()) + 1);
        for (int i = 0; i <= p.degree(); ++i) t.mag[static_cast<std::size_t>(i)] = std::abs(p[i]);
        return t;
    }

    double mag_at(int k) const {
        return (k >= 0 && k < static_cast<int>(mag.size())) ? mag[static_cast<std::size_t>(k)] : 0.0;
    }
};

TrackedPoly tp_mul(const TrackedPoly& a, const TrackedPoly& b) {
    TrackedPoly out;
    out.val = a.val * b.val;
    const int deg = a.val.degree() + b.val.degree();
    out.mag.assign(static_cast<std::size_t>(std::max(deg, 0)) + 1, 0.0);
    for (int i = 0; i <= a.val.degree(); ++i)
        for (int j = 0; j <= b.val.degree(); ++j)
            out.mag[static_cast<std::size_t>(i + j)] += a.mag_at(i) * b.mag_at(j);
    return out;
}

TrackedPoly tp_sub(const TrackedPoly& a, const TrackedPoly& b) {
    TrackedPoly out;
    out.val = a.val - b.val;
    const int deg = std::max(a.val.degree(), b.val.degree());
    out.mag.assign(static_cast<std::size_t>(std::max(deg, 0)) + 1, 0.0);
    for (int k = 0; k <= deg; ++k)
        out.mag[static_cast<std::size_t>(k)] = a.mag_at(k) + b.mag_at(k);
    return out;
}

TrackedPoly tp_scale_arg(const TrackedPoly& a, double c) {
    TrackedPoly out;
    out.val = scale_argument(a.val, c);
    out.mag = a.mag;
    double ck = 1.0;
    for (std::size_t k = 0; k < out.mag.size(); ++k) {
        out.mag[k] *= std::abs(ck);
        ck *= c;
    }
    return out;
}

Polynomial tp_clean(const TrackedPoly& a) {
    std::vector<double> c(static_cast<std::size_t>(std::max(a.val.degree(), 0)) + 1, 0.0);
    for (int k = 0; k <= a.val.degree(); ++k) {
        const double v = a.val[k];
        c[static_cast<std::size_t>(k)] = (std::abs(v) <= 1e-13 * a.mag_at(k)) ? 0.0 : v;
    }
    return Polynomial(std::move(c));
}

// Exact rational forms of the structural functions:
//   D_AB = W / (D2 D2q),   R_AB = U / (D2^2 D2q D3 D3q),
// with D2 = v x^2 + b2 q^2, D3 = v x^2 + b2 q^3, v = a1(1-q) - b2, and the
// numerators assembled by coefficient arithmetic so the q-increment
// cancellations happen exactly.
struct StructuralRational {
    Polynomial U, W;
    Polynomial denD; // D2 * D2q
    Polynomial denR; // D2^2 * D2q * D3 * D3q
};

StructuralRational build_structural(const PearsonData& data) {
    const double q = data.q.q;
    const double u = data.a0 * (1.0 - q) - data.b1;
    const double v = data.a1 * (1.0 - q) - data.b2;

    const auto pbeta = TrackedPoly::from(
        (q / (1.0 - q)) * (Polynomial{1.0, -1.0} * Polynomial{data.b1 * q, u}));
    const auto d2 = TrackedPoly::from(Polynomial{data.b2 * q * q, 0.0, v});
    const auto d3 = TrackedPoly::from(Polynomial{data.b2 * q * q * q, 0.0, v});
    const double cfac = q * q * q / ((1.0 - q) * (1.0 - q) * (1.0 + q));
    const Polynomial core = Polynomial{data.b1 * q * q, u} * Polynomial{data.b1 * q, u} +
                            data.b0 * (1.0 - q) * d2.val;
    const auto n_eta = TrackedPoly::from(
        cfac * (Polynomial{1.0, -1.0} * Polynomial{1.0, -1.0 / q} * core));

    const auto d2q = tp_scale_arg(d2, q);
    const auto d3q = tp_scale_arg(d3, q);
    const auto n_eta_q = tp_scale_arg(n_eta, q);
    const auto pbeta_q = tp_scale_arg(pbeta, q);

    const auto V = tp_sub(tp_mul(n_eta, tp_mul(d2q, d3q)), tp_mul(n_eta_q, tp_mul(d2, d3)));
    const auto W = tp_sub(tp_mul(pbeta, d2q), tp_mul(pbeta_q, d2));
    const auto U = tp_sub(tp_mul(V, d2), tp_mul(tp_mul(pbeta, W), tp_mul(d3, d3q)));

    StructuralRational out;
    out.U = tp_clean(U);
    out.W = tp_clean(W);
    out.denD = d2.val * d2q.val;
    out.denR = d2.val * d2.val * d2q.val * d3.val * d3q.val;
    return out;
}

double eval_rational(const Polynomial& num, const Polynomial& den, double x) {
    const double d = den(x);
    double scale = 0.0;
    double xk = 1.0;
    for (int k = 0; k <= den.degree(); ++k) {
        scale = std::max(scale, std::abs(den[k] * xk));
        xk *= x;
    }
    if (std::abs(d) <= 1e-13 * std::max(scale, 1e-300))
        throw DomainError("structural functions: denominator vanishes at x=" + std::to_string(x));
    return num(x) / d;
}

} // namespace

StructuralSeq structural_functions(const PearsonData& data) {
    const double q = data.q.q;
    const auto rat = std::make_shared<const StructuralRational>(build_structural(data));
    auto r_eval = [rat, q](int n) {
        // R_AB(1) = 0 identically: eta and beta carry (1-x) factors
        if (n == 0) return 0.0;
        return eval_rational(rat->U, rat->denR, std::pow(q, n));
    };
    auto d_eval = [rat, q](int n) {
        return eval_rational(rat->W, rat->denD, std::pow(q, n));
    };
    return StructuralSeq(r_eval, d_eval, SeqSource::from_pearson);
}

MonicOps ops_by_recurrence(const PearsonData& data, int N) {
    if (N < 0) throw DomainError("ops_by_recurrence: N must be >= 0");
    StructuralSeq seq = structural_functions(data);
    MonicOps out{{}, data};
    out.polys.reserve(static_cast<std::size_t>(N) + 1);
    out.polys.push_back(Polynomial{1.0});
    for (int n = 0; n < N; ++n) {
        Polynomial next = Polynomial::monomial(1) * out.polys.back() -
                          seq.D(n) * out.polys.back();
        if (n >= 1) next = next - seq.R(n) * out.polys[static_cast<std::size_t>(n) - 1];
        out.polys.push_back(std::move(next));
    }
    return out;
}

MonicOps ops_by_rodrigues(const PearsonData& data, int N) {
    if (N < 0) throw DomainError("ops_by_rodrigues: N must be >= 0");
    const double q = data.q.q;
    MonicOps out{{}, data};
    out.polys.reserve(static_cast<std::size_t>(N) + 1);
    out.polys.push_back(Polynomial{1.0});
    for (int n = 1; n <= N; ++n) {
        // R_{k+1,n} = A R_{k,n}(q.) + B(s.) d_q R_{k,n} + [B(s.) - B(.)]/((1-q).) R_{k,n}(q.)
        // with s = q^{-(n-1-k)} and R_{0,n} = 1.
        Polynomial R{1.0};
        for (int k = 0; k < n; ++k) {
            const double s = std::pow(q, -(n - 1 - k));
            const Polynomial Rq = scale_argument(R, q);
            const Polynomial Bs{data.b0, data.b1 * s, data.b2 * s * s};
            const Polynomial ratio{data.b1 * (s - 1.0) / (1.0 - q),
                                   data.b2 * (s * s - 1.0) / (1.0 - q)};
            R = data.A_poly() * Rq + Bs * q_derivative(R, data.q) + ratio * Rq;
        }
        double alpha = std::pow(q, 0.5 * n * (n - 1));
        for (int l = 0; l < n; ++l) alpha *= data.a1 - data.b2 * q_bracket(-2L * n + 2 + l, data.q);
        if (alpha == 0.0 || !std::isfinite(alpha))
            throw DomainError("ops_by_rodrigues: degenerate leading normalizer at n=" +
                              std::to_string(n));
        out.polys.push_back((1.0 / alpha) * R);
    }
    return out;
}

MonicOps ops_by_forward(const PearsonData& data, int N) {
    if (N < 0) throw DomainError("ops_by_forward: N must be >= 0");
    MonicOps out{{}, data};
    out.polys.reserve(static_cast<std::size_t>(N) + 1);
    out.polys.push_back(Polynomial{1.0});
    for (int n = 1; n <= N; ++n) {
        Polynomial cur{1.0};
        for (int k = n - 1; k >= 0; --k) {
            const PearsonData dk = pearson::derive(data, k);
            const Polynomial dq = q_derivative(scale_argument(cur, 1.0 / data.q.q), data.q);
            cur = dk.A_poly() * cur + data.B_poly() * dq;
        }
        double pref = 1.0;
        for (int k = 0; k < n; ++k) {
            const PearsonData dk = pearson::derive(data, k);
            const double denom = dk.a1 - data.b2 * q_bracket(-static_cast<long>(n) + 1 + k, data.q);
            if (denom == 0.0 || !std::isfinite(denom))
                throw DomainError("ops_by_forward: zero prefactor at n=" + std::to_string(n) +
                                  ", k=" + std::to_string(k));
            pref /= denom;
        }
        out.polys.push_back(pref * cur);
    }
    return out;
}

Polynomial hahn_apply(const PearsonData& data, const Polynomial& p) {
    const Polynomial dp = q_derivative(p, data.q);
    return data.A_poly() * dp +
           data.B_poly() * q_derivative(scale_argument(dp, 1.0 / data.q.q), data.q);
}

double hahn_eigenvalue(const PearsonData& data, int n) {
    if (n < 1) throw DomainError("hahn_eigenvalue: n must be >= 1");
    if (n == 1) return data.a1;
    return data.a1 * q_bracket(n, data.q) +
           data.b2 * q_bracket(n, data.q) * q_bracket(n - 1, data.q) *
               std::pow(data.q.q, -(n - 1));
}

namespace {

// Jackson sum of a sign-definite integrand with a relative tail stop. The
// squared-norm integrands decay like ||P_n||^2, far below any sensible
// absolute tolerance, so the stop has to track the accumulated value.
double jackson_positive_rel(const std::function<double(double)>& f, double lo, double hi,
                            const qcalc::QParam& q, double rel_tol) {
    double sum = 0.0;
    double qk = 1.0;
    double sup_recent = 0.0;
    constexpr int kWindow = 8;
    constexpr int kMinTerms = 24;
    std::vector<double> window;
    for (int k = 0; k < qcalc::kMaxIterations; ++k) {
        double contrib = 0.0;
        if (hi != 0.0) contrib += hi * f(qk * hi);
        if (lo != 0.0) contrib -= lo * f(qk * lo);
        sum += (1.0 - q.q) * qk * contrib;
        window.push_back(std::abs(contrib));
        if (window.size() > kWindow) window.erase(window.begin());
        sup_recent = *std::max_element(window.begin(), window.end());
        if (k >= kMinTerms && qk * q.q * sup_recent <= rel_tol * std::abs(sum)) return sum;
        qk *= q.q;
    }
    throw NonConvergenceError("orthonormalize: norm integral tail not reached within cap");
}

} // namespace

std::vector<NormalizedPoly> orthonormalize(const MonicOps& ops, const pearson::WeightSpec& spec,
                                           double tol) {
    if (!(tol > 0.0)) throw DomainError("orthonormalize: tol must be positive");
    const PearsonData& data = ops.data;
    StructuralSeq seq = structural_functions(data);

    auto weighted_norm2 = [&](const Polynomial& p) {
        auto f = [&](double w) {
            const double v = p(w);
            return v * v * pearson::weight_eval(spec, data, w, 1e-15);
        };
        return jackson_positive_rel(f, spec.support_lo, spec.support_hi, data.q, tol);
    };

    const double mu0 = weighted_norm2(Polynomial{1.0});
    if (!(mu0 > 0.0)) throw DomainError("orthonormalize: nonpositive total mass");

    std::vector<NormalizedPoly> out;
    out.reserve(ops.polys.size());
    double product_norm2 = mu0;
    for (std::size_t n = 0; n < ops.polys.size(); ++n) {
        if (n >= 1) product_norm2 *= seq.R(static_cast<int>(n));
        const double direct = weighted_norm2(ops.polys[n]);
        if (!(direct > 0.0))
            throw DomainError("orthonormalize: nonpositive norm, weight wrongly accepted");
        const double rel = std::abs(direct - product_norm2) / product_norm2;
        if (rel > 1e-6)
            throw DomainError("orthonormalize: Jackson norm and R_AB product disagree at n=" +
                              std::to_string(n) + " (rel " + std::to_string(rel) +
                              "); the norm may sit below binary64 resolution at this degree");
        out.push_back({(1.0 / std::sqrt(direct)) * ops.polys[n], std::sqrt(direct)});
    }
    return out;
}

Polynomial qderiv_closure(const PearsonData& data, int n, int k) {
    if (k < 0 || k >= n + 1)
        throw DomainError("qderiv_closure: need 0 <= k <= n");
    Polynomial p = ops_by_recurrence(data, n).polys[static_cast<std::size_t>(n)];
    double lead = 1.0;
    for (int j = 0; j < k; ++j) {
        p = q_derivative(p, data.q);
        lead *= q_bracket(n - j, data.q);
    }
    return (1.0 / lead) * p;
}

} // namespace qhahn::ops
