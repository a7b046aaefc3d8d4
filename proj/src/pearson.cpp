#include "qhahn/pearson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qhahn::pearson {

namespace {

constexpr double kCaseTol = 1e-12;      // relative tolerance for case conditions
constexpr double kIntegerTol = 1e-9;    // r must be this close to an integer for w^r, w < 0
constexpr int kMaxGridSearch = 200;     // K search bound for subcases delta/zeta
constexpr double kPochTol = 1e-15;      // internal product tolerance

bool near_zero(double v, double scale) { return v == 0.0 || std::abs(v) <= kCaseTol * scale; }

// Real roots of c2 w^2 + c1 w + c0, numerically stable branch.
struct QuadraticRoots {
    bool complex = false;
    double r1 = 0.0, r2 = 0.0; // real roots, r1 <= r2
    double re = 0.0, im = 0.0; // complex pair, im > 0
};

QuadraticRoots solve_quadratic(double c2, double c1, double c0) {
    QuadraticRoots out;
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) {
        out.complex = true;
        out.re = -c1 / (2.0 * c2);
        out.im = std::sqrt(-disc) / (2.0 * std::abs(c2));
        return out;
    }
    const double sq = std::sqrt(disc);
    const double t = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
    double r1, r2;
    if (t != 0.0 && c0 != 0.0) {
        r1 = t / c2;
        r2 = c0 / t;
    } else {
        r1 = t / c2;
        r2 = (-c1 / c2) - r1;
    }
    out.r1 = std::min(r1, r2);
    out.r2 = std::max(r1, r2);
    return out;
}

double solve_r_from(double value, double q) {
    // q^{-r} = value > 0
    return -std::log(value) / std::log(q);
}

bool is_near_integer(double r) { return std::abs(r - std::round(r)) <= kIntegerTol; }

// w^r with the sign convention sign(w)^round(r) |w|^r for near-integer r.
double power_r(double w, double r) {
    if (w > 0.0) return std::pow(w, r);
    if (w == 0.0) {
        if (r > 0.0) return 0.0;
        if (r == 0.0) return 1.0;
        throw DomainError("weight_eval: w^r pole at w = 0 with r < 0");
    }
    if (!is_near_integer(r))
        throw DomainError("weight_eval: w^r with negative base needs near-integer r");
    const long ri = std::lround(r);
    const double mag = std::pow(-w, r);
    return (ri % 2 == 0) ? mag : -mag;
}

// Positivity subconditions alpha)-zeta) of the two-denominator-root case,
// for support endpoints a < 0 < b.
void check_case_i_roots(const ShiftedRoots& sr, double a, double b, double q) {
    if (sr.complex_pair) {
        if (sr.im == 0.0) throw NoPositiveMeasureError("case i: degenerate complex pair");
        return; // alpha)
    }
    const double c = sr.c, d = sr.d;
    if (c == 0.0 || d == 0.0)
        throw NoPositiveMeasureError("case i: zero shifted root, boundary condition fails");
    if (c < a && d > b) return;  // beta)
    if (d < a) return;           // gamma)
    if (c > b) return;           // epsilon)
    // delta) both roots inside (a, 0) within one Jackson cell (q^{K-1} a, q^K a);
    // zeta) same on the positive side.
    auto cell_index = [q](double root, double endpoint) {
        // root = q^t endpoint with t in (K-1, K) for some natural K
        const double t = std::log(root / endpoint) / std::log(q);
        return t;
    };
    if (c > a && d < 0.0 && c < 0.0 && d > a) {
        const double tc = cell_index(c, a), td = cell_index(d, a);
        const int Kc = static_cast<int>(std::floor(tc)) + 1;
        const int Kd = static_cast<int>(std::floor(td)) + 1;
        if (Kc > kMaxGridSearch || Kd > kMaxGridSearch)
            throw NoPositiveMeasureError("case i: subcondition delta undetermined beyond K=200");
        if (Kc == Kd && tc != std::floor(tc) && td != std::floor(td)) return; // delta)
        throw NoPositiveMeasureError("case i: roots straddle a Jackson node on (a,0)");
    }
    if (c > 0.0 && d < b && c < b && d > 0.0) {
        const double tc = cell_index(c, b), td = cell_index(d, b);
        const int Kc = static_cast<int>(std::floor(tc)) + 1;
        const int Kd = static_cast<int>(std::floor(td)) + 1;
        if (Kc > kMaxGridSearch || Kd > kMaxGridSearch)
            throw NoPositiveMeasureError("case i: subcondition zeta undetermined beyond K=200");
        if (Kc == Kd && tc != std::floor(tc) && td != std::floor(td)) return; // zeta)
        throw NoPositiveMeasureError("case i: roots straddle a Jackson node on (0,b)");
    }
    throw NoPositiveMeasureError("case i: shifted roots violate conditions alpha)-zeta)");
}

// Fixes support and (for a < 0) the integrality requirement a^r > 0.
void set_single_root_support(WeightSpec& spec, double a) {
    if (a > 0.0) {
        spec.support_lo = 0.0;
        spec.support_hi = a;
    } else {
        const double r = spec.r.value_or(0.0);
        if (!is_near_integer(r))
            throw NoPositiveMeasureError("a < 0 requires integer r for a^r > 0");
        if (std::lround(r) % 2 != 0)
            throw NoPositiveMeasureError("a < 0 requires even r for a^r > 0");
        spec.support_lo = a;
        spec.support_hi = 0.0;
    }
}

} // namespace

double PearsonData::magnitude() const {
    return std::max({std::abs(a1), std::abs(a0), std::abs(b2), std::abs(b1), std::abs(b0)});
}

std::string_view to_string(WeightCase c) {
    switch (c) {
        case WeightCase::i: return "i";
        case WeightCase::ii: return "ii";
        case WeightCase::iii: return "iii";
        case WeightCase::iv: return "iv";
        case WeightCase::v: return "v";
        case WeightCase::vi_a: return "vi-a";
        case WeightCase::vi_b: return "vi-b";
        case WeightCase::vii_a: return "vii-a";
        case WeightCase::vii_b: return "vii-b";
        case WeightCase::viii: return "viii";
    }
    return "?";
}

WeightSpec classify(const PearsonData& data) {
    const double mag = data.magnitude();
    if (mag == 0.0) throw DegenerateDataError("classify: A and B are both zero");
    const double q = data.q.q;
    const double bt2 = data.b2 - (1.0 - q) * data.a1;
    const double bt1 = data.b1 - (1.0 - q) * data.a0;

    WeightSpec spec{};

    if (!near_zero(data.b0, mag)) {
        // Cases i-iii: B must supply both endpoints a < 0 < b.
        if (near_zero(data.b2, mag))
            throw NoPositiveMeasureError("b0 != 0 with deg B < 2: no two finite endpoints");
        const QuadraticRoots rb = solve_quadratic(data.b2, data.b1, data.b0);
        if (rb.complex)
            throw NoPositiveMeasureError("roots of B are complex: no real support interval");
        if (!(rb.r1 < 0.0 && rb.r2 > 0.0))
            throw NoPositiveMeasureError("roots of B are not separated by 0");
        spec.root_a = rb.r1;
        spec.root_b = rb.r2;
        spec.support_lo = rb.r1;
        spec.support_hi = rb.r2;

        if (!near_zero(bt2, mag)) {
            spec.tag = WeightCase::i;
            const QuadraticRoots rs = solve_quadratic(bt2, bt1, data.b0);
            if (rs.complex) {
                spec.shifted = {2, true, 0.0, 0.0, rs.re, rs.im};
            } else {
                spec.shifted = {2, false, rs.r1, rs.r2, 0.0, 0.0};
            }
            check_case_i_roots(spec.shifted, rb.r1, rb.r2, q);
            return spec;
        }
        if (!near_zero(bt1, mag)) {
            spec.tag = WeightCase::ii;
            const double c = -data.b0 / bt1;
            spec.shifted = {1, false, c, 0.0, 0.0, 0.0};
            if (!(c < rb.r1 || c > rb.r2))
                throw NoPositiveMeasureError("case ii: shifted root inside the support");
            return spec;
        }
        spec.tag = WeightCase::iii;
        return spec;
    }

    if (!near_zero(data.b1, mag)) {
        // Cases iv-vi: B = w (b2 w + b1), single nonzero root a.
        if (near_zero(data.b2, mag))
            throw NoPositiveMeasureError("b0 = 0, b2 = 0: outside the eight-case classification");
        const double a = -data.b1 / data.b2;

        if (!near_zero(bt1, mag)) {
            if (!near_zero(bt2, mag)) {
                spec.tag = WeightCase::iv;
                const double c = -bt1 / bt2;
                spec.shifted = {1, false, c, 0.0, 0.0, 0.0};
                spec.root_a = a;
                spec.r = solve_r_from(std::abs(q * data.b1 / bt1), q);
                set_single_root_support(spec, a);
                if (a > 0.0 && !(c < 0.0 || c > a))
                    throw NoPositiveMeasureError("case iv: shifted root inside the support");
                if (a < 0.0 && !(c < a || c > 0.0))
                    throw NoPositiveMeasureError("case iv: shifted root inside the support");
                return spec;
            }
            spec.tag = WeightCase::v;
            spec.root_a = a;
            spec.r = solve_r_from(std::abs(q * data.b1 / bt1), q);
            set_single_root_support(spec, a);
            return spec;
        }
        if (near_zero(bt2, mag))
            throw DomainError("classify: shifted polynomial vanishes identically");
        const double ratio = q * data.b1 / bt2;
        spec.root_a = a;
        if (ratio > 0.0) {
            spec.tag = WeightCase::vi_a;
            spec.r = solve_r_from(ratio, q);
        } else {
            spec.tag = WeightCase::vi_b;
            spec.r = solve_r_from(-ratio, q);
        }
        set_single_root_support(spec, a);
        return spec;
    }

    // b0 = b1 = 0.
    if (!near_zero(bt1, mag)) {
        if (near_zero(data.b2, mag))
            throw DegenerateDataError("classify: B is the zero polynomial");
        throw NoPositiveMeasureError("case vii: R_AB(q^n) is not positive for large n");
    }
    if (near_zero(data.b2, mag)) {
        // B = 0 and b1 - (1-q) a0 = 0 forces a0 = 0; only A = a1 w may remain.
        throw DegenerateDataError("classify: B is the zero polynomial");
    }
    if (near_zero(bt2, mag))
        throw DomainError("classify: shifted polynomial vanishes identically");
    throw NoPositiveMeasureError("case viii: structural functions R and D vanish identically");
}

double weight_eval(const WeightSpec& spec, const PearsonData& data, double omega, double tol) {
    using qcalc::q_pochhammer_inf;
    using qcalc::q_pochhammer_inf_conj_pair;
    if (!(tol > 0.0)) throw DomainError("weight_eval: tol must be positive");
    const qcalc::QParam& q = data.q;
    const double a = spec.root_a;

    // A vanishing denominator is a pole; an overflowed one means the weight
    // underflows and the quotient rounds to zero, which is the right value.
    auto guard_pole = [](double den) {
        if (den == 0.0)
            throw DomainError("weight_eval: omega hits a pole of the weight");
        return den;
    };

    switch (spec.tag) {
        case WeightCase::i: {
            const double b = *spec.root_b;
            const double num =
                q_pochhammer_inf(q.q * omega / a, q, tol) * q_pochhammer_inf(q.q * omega / b, q, tol);
            double den;
            if (spec.shifted.complex_pair) {
                den = q_pochhammer_inf_conj_pair(omega, spec.shifted.re, spec.shifted.im, q, tol);
            } else {
                den = q_pochhammer_inf(omega / spec.shifted.c, q, tol) *
                      q_pochhammer_inf(omega / spec.shifted.d, q, tol);
            }
            return num / guard_pole(den);
        }
        case WeightCase::ii: {
            const double b = *spec.root_b;
            const double num =
                q_pochhammer_inf(q.q * omega / a, q, tol) * q_pochhammer_inf(q.q * omega / b, q, tol);
            return num / guard_pole(q_pochhammer_inf(omega / spec.shifted.c, q, tol));
        }
        case WeightCase::iii: {
            const double b = *spec.root_b;
            return q_pochhammer_inf(q.q * omega / a, q, tol) *
                   q_pochhammer_inf(q.q * omega / b, q, tol);
        }
        case WeightCase::iv:
            return power_r(omega, *spec.r) * q_pochhammer_inf(q.q * omega / a, q, tol) /
                   guard_pole(q_pochhammer_inf(omega / spec.shifted.c, q, tol));
        case WeightCase::v:
            return power_r(omega, *spec.r) * q_pochhammer_inf(q.q * omega / a, q, tol);
        case WeightCase::vi_a: {
            if (omega == 0.0) throw DomainError("weight_eval: case vi formula undefined at omega = 0");
            const double den =
                q_pochhammer_inf(-omega, q, tol) * q_pochhammer_inf(-q.q / omega, q, tol);
            return power_r(omega, *spec.r) * q_pochhammer_inf(q.q * omega / a, q, tol) /
                   guard_pole(den);
        }
        case WeightCase::vi_b: {
            if (omega == 0.0) throw DomainError("weight_eval: case vi formula undefined at omega = 0");
            const double den =
                q_pochhammer_inf(omega, q, tol) * q_pochhammer_inf(q.q / omega, q, tol);
            return power_r(omega, *spec.r) * q_pochhammer_inf(q.q * omega / a, q, tol) /
                   guard_pole(den);
        }
        case WeightCase::vii_a: {
            if (omega == 0.0) throw DomainError("weight_eval: case vii formula undefined at omega = 0");
            const double num =
                q_pochhammer_inf(-omega, q, tol) * q_pochhammer_inf(-q.q / omega, q, tol);
            return power_r(omega, *spec.r) * num /
                   guard_pole(q_pochhammer_inf(omega / spec.shifted.c, q, tol));
        }
        case WeightCase::vii_b: {
            if (omega == 0.0) throw DomainError("weight_eval: case vii formula undefined at omega = 0");
            const double num =
                q_pochhammer_inf(omega, q, tol) * q_pochhammer_inf(q.q / omega, q, tol);
            return power_r(omega, *spec.r) * num /
                   guard_pole(q_pochhammer_inf(omega / spec.shifted.c, q, tol));
        }
        case WeightCase::viii:
            return power_r(omega, *spec.r);
    }
    throw DomainError("weight_eval: unknown case");
}

namespace {

SignedLog sl_mul(SignedLog a, SignedLog b) {
    if (a.sign == 0 || b.sign == 0) return {0, 0.0};
    return {a.sign * b.sign, a.log + b.log};
}

SignedLog sl_div(SignedLog a, SignedLog b) {
    if (b.sign == 0) throw DomainError("weight_eval_log: omega hits a pole of the weight");
    if (a.sign == 0) return {0, 0.0};
    return {a.sign * b.sign, a.log - b.log};
}

SignedLog sl_pochhammer_inf(double x, const qcalc::QParam& q, double tol) {
    SignedLog out{1, 0.0};
    double qjx = x;
    for (int j = 0; j < qcalc::kMaxIterations; ++j) {
        if (std::abs(qjx) < tol) return out;
        const double f = 1.0 - qjx;
        if (f == 0.0) return {0, 0.0};
        out.sign *= f > 0.0 ? 1 : -1;
        out.log += std::log(std::abs(f));
        qjx *= q.q;
    }
    throw NonConvergenceError("weight_eval_log: product did not reach tolerance within cap");
}

SignedLog sl_conj_pair(double x, double re, double im, const qcalc::QParam& q, double tol) {
    const double mod2 = re * re + im * im;
    const double s = 2.0 * re / mod2;
    const double p = 1.0 / mod2;
    SignedLog out{1, 0.0};
    double qj = 1.0;
    for (int j = 0; j < qcalc::kMaxIterations; ++j) {
        const double u = qj * x;
        if (std::abs(u) * (std::abs(s) + std::abs(u) * p) < tol) return out;
        const double f = 1.0 - s * u + p * u * u;
        if (f == 0.0) return {0, 0.0};
        out.sign *= f > 0.0 ? 1 : -1;
        out.log += std::log(std::abs(f));
        qj *= q.q;
    }
    throw NonConvergenceError("weight_eval_log: product did not reach tolerance within cap");
}

SignedLog sl_power_r(double w, double r) {
    if (w > 0.0) return {1, r * std::log(w)};
    if (w == 0.0) {
        if (r > 0.0) return {0, 0.0};
        if (r == 0.0) return {1, 0.0};
        throw DomainError("weight_eval_log: w^r pole at w = 0 with r < 0");
    }
    if (!is_near_integer(r))
        throw DomainError("weight_eval_log: w^r with negative base needs near-integer r");
    const long ri = std::lround(r);
    return {ri % 2 == 0 ? 1 : -1, r * std::log(-w)};
}

} // namespace

SignedLog weight_eval_log(const WeightSpec& spec, const PearsonData& data, double omega,
                          double tol) {
    if (!(tol > 0.0)) throw DomainError("weight_eval_log: tol must be positive");
    const qcalc::QParam& q = data.q;
    const double a = spec.root_a;
    switch (spec.tag) {
        case WeightCase::i: {
            const SignedLog num = sl_mul(sl_pochhammer_inf(q.q * omega / a, q, tol),
                                         sl_pochhammer_inf(q.q * omega / *spec.root_b, q, tol));
            const SignedLog den =
                spec.shifted.complex_pair
                    ? sl_conj_pair(omega, spec.shifted.re, spec.shifted.im, q, tol)
                    : sl_mul(sl_pochhammer_inf(omega / spec.shifted.c, q, tol),
                             sl_pochhammer_inf(omega / spec.shifted.d, q, tol));
            return sl_div(num, den);
        }
        case WeightCase::ii:
            return sl_div(sl_mul(sl_pochhammer_inf(q.q * omega / a, q, tol),
                                 sl_pochhammer_inf(q.q * omega / *spec.root_b, q, tol)),
                          sl_pochhammer_inf(omega / spec.shifted.c, q, tol));
        case WeightCase::iii:
            return sl_mul(sl_pochhammer_inf(q.q * omega / a, q, tol),
                          sl_pochhammer_inf(q.q * omega / *spec.root_b, q, tol));
        case WeightCase::iv:
            return sl_div(sl_mul(sl_power_r(omega, *spec.r),
                                 sl_pochhammer_inf(q.q * omega / a, q, tol)),
                          sl_pochhammer_inf(omega / spec.shifted.c, q, tol));
        case WeightCase::v:
            return sl_mul(sl_power_r(omega, *spec.r), sl_pochhammer_inf(q.q * omega / a, q, tol));
        case WeightCase::vi_a:
            if (omega == 0.0)
                throw DomainError("weight_eval_log: case vi formula undefined at omega = 0");
            return sl_div(sl_mul(sl_power_r(omega, *spec.r),
                                 sl_pochhammer_inf(q.q * omega / a, q, tol)),
                          sl_mul(sl_pochhammer_inf(-omega, q, tol),
                                 sl_pochhammer_inf(-q.q / omega, q, tol)));
        case WeightCase::vi_b:
            if (omega == 0.0)
                throw DomainError("weight_eval_log: case vi formula undefined at omega = 0");
            return sl_div(sl_mul(sl_power_r(omega, *spec.r),
                                 sl_pochhammer_inf(q.q * omega / a, q, tol)),
                          sl_mul(sl_pochhammer_inf(omega, q, tol),
                                 sl_pochhammer_inf(q.q / omega, q, tol)));
        case WeightCase::vii_a:
            if (omega == 0.0)
                throw DomainError("weight_eval_log: case vii formula undefined at omega = 0");
            return sl_div(sl_mul(sl_power_r(omega, *spec.r),
                                 sl_mul(sl_pochhammer_inf(-omega, q, tol),
                                        sl_pochhammer_inf(-q.q / omega, q, tol))),
                          sl_pochhammer_inf(omega / spec.shifted.c, q, tol));
        case WeightCase::vii_b:
            if (omega == 0.0)
                throw DomainError("weight_eval_log: case vii formula undefined at omega = 0");
            return sl_div(sl_mul(sl_power_r(omega, *spec.r),
                                 sl_mul(sl_pochhammer_inf(omega, q, tol),
                                        sl_pochhammer_inf(q.q / omega, q, tol))),
                          sl_pochhammer_inf(omega / spec.shifted.c, q, tol));
        case WeightCase::viii:
            return sl_power_r(omega, *spec.r);
    }
    throw DomainError("weight_eval_log: unknown case");
}

double pearson_residual(const PearsonData& data, const WeightSpec& spec, double omega) {
    if (omega == 0.0) throw DomainError("pearson_residual: q-derivative undefined at omega = 0");
    const double q = data.q.q;
    const double rw = weight_eval(spec, data, omega, kPochTol);
    const double rqw = weight_eval(spec, data, q * omega, kPochTol);
    const double dq = (rw * data.B(omega) - rqw * data.B(q * omega)) / ((1.0 - q) * omega);
    return dq - rw * data.A(omega);
}

PearsonData derive(const PearsonData& data, int k) {
    if (k < 0) throw DomainError("derive: k must be >= 0");
    if (k == 0) return data;
    const double q = data.q.q;
    const double qk = std::pow(q, k);
    PearsonData out = data;
    out.a1 = data.a1 * qk * qk + data.b2 * qcalc::q_bracket(2L * k, data.q);
    out.a0 = data.a0 * qk + data.b1 * qcalc::q_bracket(k, data.q);
    return out;
}

std::vector<GridNode> support_grid(const WeightSpec& spec, const qcalc::QParam& q, int depth) {
    if (depth < 1) throw DomainError("support_grid: depth must be >= 1");
    std::vector<GridNode> nodes;
    nodes.reserve(2 * static_cast<std::size_t>(depth));
    double qk = 1.0;
    for (int k = 0; k < depth; ++k) {
        const double w = (1.0 - q.q) * qk;
        if (spec.support_hi != 0.0)
            nodes.push_back({qk * spec.support_hi, w * spec.support_hi});
        if (spec.support_lo != 0.0)
            nodes.push_back({qk * spec.support_lo, -w * spec.support_lo});
        qk *= q.q;
    }
    return nodes;
}

} // namespace qhahn::pearson
