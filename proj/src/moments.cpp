#include "qhahn/moments.hpp"

#include <cmath>
#include <string>

namespace qhahn::moments {

using pearson::PearsonData;
using pearson::WeightCase;
using pearson::WeightSpec;
using qcalc::q_bracket;
using qcalc::q_pochhammer_inf;
using qcalc::q_pochhammer_inf_conj_pair;
using qcalc::q_pochhammer_real;

namespace {

constexpr double kPochTol = 1e-15;

bool b_has_root_at_one(const PearsonData& data) {
    return std::abs(data.B(1.0)) <= 1e-12 * std::max(1.0, data.magnitude());
}

// Exp series sum_m x^m / (R(q) ... R(q^m)) for the moment sequence.
double exp_series(const StructuralSeq& seq, double x, double tol) {
    double sum = 1.0, term = 1.0;
    for (int m = 1; m < qcalc::kMaxIterations; ++m) {
        const double r = seq.R(m);
        if (r == 0.0) throw DomainError("moment exp series: vanishing R(q^m)");
        term *= x / r;
        sum += term;
        if (std::abs(term) < tol && m > 4) return sum;
    }
    throw NonConvergenceError("moment exp series did not converge");
}

// Second solution of the moment q-difference equation on the grid
// v[m] ~ mu(q^m), propagated from v[1] = 1, v[2] = 0 by
//   [(1-x) b2 + (1-q) x a1] v_{m+2} + [(1-x) b1 + (1-q) x a0] v_{m+1}
//     + (1-x) b0 v_m = 0,   x = q^m.
std::vector<double> second_solution_grid(const PearsonData& data, int M) {
    const double q = data.q.q;
    std::vector<double> v(static_cast<std::size_t>(M) + 3, 0.0);
    v[1] = 1.0;
    v[2] = 0.0;
    for (int m = 1; m + 2 <= M + 2; ++m) {
        const double x = std::pow(q, m);
        const double den = (1.0 - x) * data.b2 + (1.0 - q) * x * data.a1;
        if (den == 0.0)
            throw DomainError("moment function: singular step in the grid recurrence");
        v[static_cast<std::size_t>(m) + 2] =
            (-((1.0 - x) * data.b1 + (1.0 - q) * x * data.a0) * v[static_cast<std::size_t>(m) + 1] -
             (1.0 - x) * data.b0 * v[static_cast<std::size_t>(m)]) /
            den;
    }
    return v;
}

struct TwoSolutions {
    std::vector<double> u, v; // u[m] = Exp solution at q^m, v[m] = second solution
};

TwoSolutions moment_solutions(const PearsonData& data, int M) {
    StructuralSeq rmom = moment_structural_seq(data);
    const double q = data.q.q;
    TwoSolutions out;
    out.u.resize(static_cast<std::size_t>(M) + 3, 0.0);
    for (int m = 1; m <= M + 2; ++m) out.u[static_cast<std::size_t>(m)] = exp_series(rmom, std::pow(q, m), 1e-17);
    out.v = second_solution_grid(data, M);
    return out;
}

} // namespace

MomentSeq moments_by_recurrence(const PearsonData& data, double mu0, int N) {
    if (N < 0) throw DomainError("moments_by_recurrence: N must be >= 0");
    MomentSeq out{{}, MomentSource::recurrence};
    out.mu.reserve(static_cast<std::size_t>(N) + 1);
    out.mu.push_back(mu0);
    if (N == 0) return out;
    if (data.a1 == 0.0)
        throw DomainError("moments_by_recurrence: a1 = 0, Eq. mu_1 step forces a0 mu_0 = 0 instead");
    out.mu.push_back(-data.a0 * mu0 / data.a1);
    const double q = data.q.q;
    for (int n = 1; n < N; ++n) {
        const double brn = q_bracket(n, data.q);
        const double qn = std::pow(q, n);
        const double coeff = -brn * data.b2 - qn * data.a1;
        if (coeff == 0.0)
            throw DomainError("moments_by_recurrence: singular mu_{n+1} coefficient at n=" +
                              std::to_string(n));
        const double rhs = brn * (data.b1 * out.mu[static_cast<std::size_t>(n)] +
                                  data.b0 * out.mu[static_cast<std::size_t>(n) - 1]) +
                           qn * data.a0 * out.mu[static_cast<std::size_t>(n)];
        out.mu.push_back(rhs / coeff);
    }
    return out;
}

double moment_closed_form_shifted_r(const WeightSpec& spec, const PearsonData& data, int n) {
    const qcalc::QParam& q = data.q;
    const double a = spec.root_a;
    switch (spec.tag) {
        case WeightCase::i: {
            const double b = *spec.root_b;
            if (n != 0) throw DomainError("mu0_closed_form: shifted-r rule applies to cases iv-vi");
            const double num3 = q_pochhammer_inf(q.q * b / a, q, kPochTol) *
                                q_pochhammer_inf(q.q * a / b, q, kPochTol) *
                                q_pochhammer_inf(q.q, q, kPochTol);
            double abcd, den;
            if (spec.shifted.complex_pair) {
                const double mod2 = spec.shifted.re * spec.shifted.re + spec.shifted.im * spec.shifted.im;
                abcd = q_pochhammer_inf(a * b / mod2, q, kPochTol);
                den = q_pochhammer_inf_conj_pair(a, spec.shifted.re, spec.shifted.im, q, kPochTol) *
                      q_pochhammer_inf_conj_pair(b, spec.shifted.re, spec.shifted.im, q, kPochTol);
            } else {
                const double c = spec.shifted.c, d = spec.shifted.d;
                abcd = q_pochhammer_inf(a * b / (c * d), q, kPochTol);
                den = q_pochhammer_inf(a / c, q, kPochTol) * q_pochhammer_inf(a / d, q, kPochTol) *
                      q_pochhammer_inf(b / c, q, kPochTol) * q_pochhammer_inf(b / d, q, kPochTol);
            }
            return (1.0 - q.q) * (b - a) * num3 * abcd / den;
        }
        case WeightCase::ii: {
            const double b = *spec.root_b;
            if (n != 0) throw DomainError("mu0_closed_form: shifted-r rule applies to cases iv-vi");
            const double c = spec.shifted.c;
            return (1.0 - q.q) * (b - a) * q_pochhammer_inf(q.q, q, kPochTol) *
                   q_pochhammer_inf(q.q * b / a, q, kPochTol) *
                   q_pochhammer_inf(q.q * a / b, q, kPochTol) /
                   (q_pochhammer_inf(a / c, q, kPochTol) * q_pochhammer_inf(b / c, q, kPochTol));
        }
        case WeightCase::iii: {
            const double b = *spec.root_b;
            if (n != 0) throw DomainError("mu0_closed_form: shifted-r rule applies to cases iv-vi");
            return (1.0 - q.q) * (b - a) * q_pochhammer_inf(q.q, q, kPochTol) *
                   q_pochhammer_inf(q.q * b / a, q, kPochTol) *
                   q_pochhammer_inf(q.q * a / b, q, kPochTol);
        }
        case WeightCase::iv: {
            const double r = *spec.r + n;
            const double c = spec.shifted.c;
            return (1.0 - q.q) * std::pow(a, r + 1.0) * q_pochhammer_real(q.q, q, r, kPochTol) /
                   q_pochhammer_real(a / c, q, r + 1.0, kPochTol);
        }
        case WeightCase::v: {
            const double r = *spec.r + n;
            return (1.0 - q.q) * std::pow(a, r + 1.0) * q_pochhammer_real(q.q, q, r, kPochTol);
        }
        case WeightCase::vi_a: {
            const double r = *spec.r + n;
            return (1.0 - q.q) * std::pow(a, r + 1.0) * q_pochhammer_inf(q.q, q, kPochTol) *
                   q_pochhammer_inf(-a * std::pow(q.q, r + 1.0), q, kPochTol) /
                   (q_pochhammer_inf(-a, q, kPochTol) * q_pochhammer_inf(-q.q / a, q, kPochTol));
        }
        case WeightCase::vi_b: {
            const double r = *spec.r + n;
            return (1.0 - q.q) * std::pow(a, r + 1.0) * q_pochhammer_inf(q.q, q, kPochTol) *
                   q_pochhammer_inf(a * std::pow(q.q, r + 1.0), q, kPochTol) /
                   (q_pochhammer_inf(a, q, kPochTol) * q_pochhammer_inf(q.q / a, q, kPochTol));
        }
        default:
            throw DomainError("mu0_closed_form: unsupported case " +
                              std::string(pearson::to_string(spec.tag)));
    }
}

double mu0_closed_form(const WeightSpec& spec, const PearsonData& data) {
    return moment_closed_form_shifted_r(spec, data, 0);
}

double moments_direct(const WeightSpec& spec, const PearsonData& data, int n, double tol) {
    auto f = [&](double w) {
        return std::pow(w, n) * pearson::weight_eval(spec, data, w, tol * 1e-2);
    };
    return qcalc::jackson_integral(f, spec.support_lo, spec.support_hi, data.q, tol);
}

double q_hypergeometric_3phi2(const QHypergeometricParams& params, double tol) {
    if (!(tol > 0.0)) throw DomainError("q_hypergeometric_3phi2: tol must be positive");
    if (params.z == 0.0) return 1.0;
    const double q = params.q;
    if (!(q > 0.0) || !(q < 1.0)) throw DomainError("q_hypergeometric_3phi2: need 0 < q < 1");
    double sum = 1.0, term = 1.0;
    double qk = 1.0;
    int growth_run = 0;
    for (int k = 0; k < qcalc::kMaxIterations; ++k) {
        double factor = params.z;
        for (double aparam : params.numerator) factor *= 1.0 - aparam * qk;
        double den = 1.0 - std::pow(q, k + 1); // (q;q) factor
        for (double bparam : params.denominator) den *= 1.0 - bparam * qk;
        if (den == 0.0)
            throw DomainError("q_hypergeometric_3phi2: denominator Pochhammer factor vanishes");
        const double prev = std::abs(term);
        term *= factor / den;
        if (term == 0.0) return sum; // terminating series
        sum += term;
        growth_run = (std::abs(term) > prev) ? growth_run + 1 : 0;
        if (growth_run > 64)
            throw DomainError("q_hypergeometric_3phi2: terms grow, series diverges");
        if (std::abs(term) < tol && k > 4) return sum;
        qk *= q;
    }
    throw NonConvergenceError("q_hypergeometric_3phi2: no convergence within cap");
}

StructuralSeq moment_structural_seq(const PearsonData& data) {
    auto r_eval = [data](int j) {
        const double q = data.q.q;
        const double den = data.B_shifted(std::pow(q, j - 1));
        if (den == 0.0) throw DomainError("moment_structural_seq: shifted polynomial root on grid");
        return data.B(std::pow(q, j)) / den;
    };
    auto d_eval = [](int) { return 0.0; };
    return StructuralSeq(r_eval, d_eval, SeqSource::explicit_seq);
}

double moment_function(const PearsonData& data, int n, double mu0) {
    if (n < 0) throw DomainError("moment_function: n must be >= 0");
    if (!b_has_root_at_one(data)) {
        return moments_by_recurrence(data, mu0, n).mu[static_cast<std::size_t>(n)];
    }
    const int M = n + 1;
    const TwoSolutions sol = moment_solutions(data, M);
    // c1 u(q) + c2 v(q) = mu0 ;  a0 [c1 u(q)+c2 v(q)] + a1 [c1 u(q^2)+c2 v(q^2)] = 0
    const double pu = data.a0 * sol.u[1] + data.a1 * sol.u[2];
    const double pv = data.a0 * sol.v[1] + data.a1 * sol.v[2];
    const double det = sol.u[1] * pv - sol.v[1] * pu;
    if (det == 0.0) throw DomainError("moment_function: boundary system is singular");
    const double c1 = mu0 * pv / det;
    const double c2 = -mu0 * pu / det;
    return c1 * sol.u[static_cast<std::size_t>(n) + 1] + c2 * sol.v[static_cast<std::size_t>(n) + 1];
}

double moment_function(const PearsonData& data, int n) {
    const WeightSpec spec = pearson::classify(data);
    return moment_function(data, n, moments_direct(spec, data, 0, 1e-13));
}

WronskianReport wronskian_check(const PearsonData& data, int horizon) {
    WronskianReport rep;
    const double scale = std::max(1.0, data.magnitude());
    if (std::abs(data.b0) <= 1e-12 * scale) {
        rep.reason = "b0 = 0: exponent q^lambda = b0/b2 undefined";
        return rep;
    }
    if (data.b0 / data.b2 < 0.0) {
        rep.reason = "b0/b2 < 0: lambda is complex, Wronskian check unavailable";
        return rep;
    }
    if (!b_has_root_at_one(data)) {
        rep.reason = "B(1) != 0: Exp-branch solutions not constructed";
        return rep;
    }
    // The Casoratian W cancels two O(1) solutions down to ~ (b0/b2)^m, so
    // both solutions are carried in extended precision over the horizon.
    const long double q = data.q.q;
    const int M = horizon + 2;
    std::vector<long double> u(static_cast<std::size_t>(M) + 3, 0.0L);
    std::vector<long double> v(static_cast<std::size_t>(M) + 3, 0.0L);
    auto B_ld = [&](long double w) { return (data.b2 * w + data.b1) * w + data.b0; };
    auto Bsh_ld = [&](long double w) {
        return ((data.b2 - (1.0L - q) * data.a1) * w + (data.b1 - (1.0L - q) * data.a0)) * w +
               data.b0;
    };
    auto rmom_ld = [&](int j) {
        const long double den = Bsh_ld(std::pow(q, static_cast<long double>(j - 1)));
        if (den == 0.0L) throw DomainError("wronskian_check: shifted polynomial root on grid");
        return B_ld(std::pow(q, static_cast<long double>(j))) / den;
    };
    for (int m = 1; m <= M + 2; ++m) {
        const long double x = std::pow(q, static_cast<long double>(m));
        long double sum = 1.0L, term = 1.0L;
        for (int j = 1; j < qcalc::kMaxIterations; ++j) {
            term *= x / rmom_ld(j);
            sum += term;
            if (std::abs(static_cast<double>(term)) < 1e-21 && j > 4) break;
        }
        u[static_cast<std::size_t>(m)] = sum;
    }
    v[1] = 1.0L;
    v[2] = 0.0L;
    for (int m = 1; m + 2 <= M + 2; ++m) {
        const long double x = std::pow(q, static_cast<long double>(m));
        const long double den = (1.0L - x) * data.b2 + (1.0L - q) * x * data.a1;
        if (den == 0.0L)
            throw DomainError("wronskian_check: singular step in the grid recurrence");
        v[static_cast<std::size_t>(m) + 2] =
            (-((1.0L - x) * data.b1 + (1.0L - q) * x * data.a0) * v[static_cast<std::size_t>(m) + 1] -
             (1.0L - x) * data.b0 * v[static_cast<std::size_t>(m)]) /
            den;
    }
    auto W = [&](int m) {
        return static_cast<double>(v[static_cast<std::size_t>(m)] * u[static_cast<std::size_t>(m) + 1] -
                                   v[static_cast<std::size_t>(m) + 1] * u[static_cast<std::size_t>(m)]);
    };
    // Pin the overall constant at m = 1, then check
    //   W(q^m) = C (q^m)^lambda / (q^m;q)_inf  with  q^lambda = b0/b2.
    const double lambda = std::log(data.b0 / data.b2) / std::log(static_cast<double>(q));
    auto form = [&](int m) {
        const double x = std::pow(static_cast<double>(q), m);
        return std::pow(x, lambda) / q_pochhammer_inf(x, data.q, kPochTol);
    };
    const double C = W(1) / form(1);
    rep.available = true;
    for (int m = 2; m <= horizon; ++m) {
        const double expect = C * form(m);
        const double dev = std::abs(W(m) - expect) / std::max(std::abs(expect), 1e-300);
        rep.max_rel_dev = std::max(rep.max_rel_dev, dev);
        ++rep.points;
    }
    return rep;
}

} // namespace qhahn::moments
