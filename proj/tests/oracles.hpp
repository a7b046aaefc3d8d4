// oracles.hpp — test-only reference implementations
//
// These stay independent of the implementation paths they check: moments
// come from raw Jackson sums over the weight, and the monic OPS comes from
// Gram-Schmidt on the moment matrix.
#pragma once

#include <random>
#include <vector>

#include "qhahn/pearson.hpp"

namespace oracles {

using qhahn::pearson::PearsonData;
using qhahn::pearson::WeightSpec;
using qhahn::qcalc::Polynomial;

// Raw truncated Jackson sum of w^n rho(w); depth fixed high instead of the
// library's adaptive tail test.
inline double moment_bruteforce(const PearsonData& data, const WeightSpec& spec, int n,
                                int depth = 400) {
    const double q = data.q.q;
    double sum = 0.0;
    double qk = 1.0;
    for (int k = 0; k < depth; ++k) {
        if (spec.support_hi != 0.0) {
            const double w = qk * spec.support_hi;
            sum += (1.0 - q) * qk * spec.support_hi * std::pow(w, n) *
                   qhahn::pearson::weight_eval(spec, data, w, 1e-16);
        }
        if (spec.support_lo != 0.0) {
            const double w = qk * spec.support_lo;
            sum -= (1.0 - q) * qk * spec.support_lo * std::pow(w, n) *
                   qhahn::pearson::weight_eval(spec, data, w, 1e-16);
        }
        qk *= q;
    }
    return sum;
}

// Monic orthogonal polynomials by Gram-Schmidt on {1, w, ..., w^N} under the
// Jackson inner product. Inner products are taken over grid values with
// long double accumulation; the Hankel/moment-matrix formulation is too
// ill-conditioned at n = 8 for a 1e-7 coefficient comparison.
inline std::vector<Polynomial> gram_schmidt_ops(const PearsonData& data, const WeightSpec& spec,
                                                int N, int depth = 220) {
    const double q = data.q.q;
    std::vector<long double> xs, ws;
    double qk = 1.0;
    for (int k = 0; k < depth; ++k) {
        if (spec.support_hi != 0.0) {
            const double x = qk * spec.support_hi;
            xs.push_back(x);
            ws.push_back((1.0 - q) * qk * spec.support_hi *
                         qhahn::pearson::weight_eval(spec, data, x, 1e-16));
        }
        if (spec.support_lo != 0.0) {
            const double x = qk * spec.support_lo;
            xs.push_back(x);
            ws.push_back(-(1.0 - q) * qk * spec.support_lo *
                         qhahn::pearson::weight_eval(spec, data, x, 1e-16));
        }
        qk *= q;
    }

    auto eval = [](const std::vector<long double>& c, long double x) {
        long double acc = 0.0L;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    };
    auto inner = [&](const std::vector<long double>& p, const std::vector<long double>& r) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * eval(p, xs[i]) * eval(r, xs[i]);
        return s;
    };

    std::vector<std::vector<long double>> basis;
    basis.push_back({1.0L});
    for (int n = 1; n <= N; ++n) {
        std::vector<long double> t(static_cast<std::size_t>(n) + 1, 0.0L);
        t.back() = 1.0L;
        for (int m = 0; m < n; ++m) {
            const auto& g = basis[static_cast<std::size_t>(m)];
            const long double coef = inner(t, g) / inner(g, g);
            for (std::size_t i = 0; i < g.size(); ++i) t[i] -= coef * g[i];
        }
        basis.push_back(std::move(t));
    }

    std::vector<Polynomial> out;
    for (const auto& b : basis) {
        std::vector<double> c(b.begin(), b.end());
        out.push_back(Polynomial(std::move(c)));
    }
    return out;
}

// Deterministic random polynomial stream for property tests.
class PolyGen {
public:
    explicit PolyGen(unsigned seed) : rng_(seed) {}

    Polynomial next(int max_degree = 8) {
        std::uniform_int_distribution<int> degd(0, max_degree);
        std::uniform_real_distribution<double> coefd(-2.0, 2.0);
        const int d = degd(rng_);
        std::vector<double> c(static_cast<std::size_t>(d) + 1);
        for (double& v : c) v = coefd(rng_);
        if (c.back() == 0.0) c.back() = 1.0;
        return Polynomial(std::move(c));
    }

    double real(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

private:
    std::mt19937 rng_;
};

} // namespace oracles
