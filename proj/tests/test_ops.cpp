#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "oracles.hpp"
#include "qhahn/moments.hpp"
#include "qhahn/ops.hpp"
#include "representatives.hpp"

using namespace qhahn;
using namespace qhahn::ops;
using pearson::PearsonData;
using qcalc::Polynomial;
using qcalc::q_bracket;

namespace {

double max_rel_coeff_diff(const Polynomial& a, const Polynomial& b) {
    const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
    double worst = 0.0;
    for (int c = 0; c <= std::max(a.degree(), b.degree()); ++c)
        worst = std::max(worst, std::abs(a[c] - b[c]) / scale);
    return worst;
}

} // namespace

TEST_CASE("structural functions of discrete q-Hermite I") {
    const auto rep = reps::case_iii_hermite();
    const StructuralSeq seq = structural_functions(rep.data);
    const double q = rep.data.q.q;
    CHECK(seq.R(0) == 0.0); // exact: eta(1) = eta(q) = beta(1) = 0
    for (int n = 0; n <= 30; ++n) {
        CHECK(seq.D(n) == 0.0); // beta vanishes identically for a0 = b1 = 0
        if (n >= 1) {
            const double want = std::pow(q, n - 1) * (1.0 - std::pow(q, n));
            CHECK(seq.R(n) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("R_AB(1) = 0 and R_AB(q^n) > 0 for every representative") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const StructuralSeq seq = structural_functions(rep.data);
        CHECK(std::abs(seq.R(0)) <= 1e-14);
        for (int n = 1; n <= 30; ++n) CHECK(seq.R(n) > 0.0);
    }
}

TEST_CASE("recurrence route: first polynomials of discrete q-Hermite I") {
    const auto rep = reps::case_iii_hermite();
    const MonicOps ops = ops_by_recurrence(rep.data, 3);
    CHECK(ops.polys[0].degree() == 0);
    CHECK(ops.polys[0][0] == 1.0);
    CHECK(ops.polys[1].degree() == 1);
    CHECK(ops.polys[1][1] == 1.0);
    CHECK(std::abs(ops.polys[1][0]) <= 1e-15); // P1 = w - D(1), D(1) = 0 here
    CHECK(ops.polys[2][2] == 1.0);
    CHECK(ops.polys[2][1] == 0.0);
    CHECK(ops.polys[2][0] == doctest::Approx(-(1.0 - rep.data.q.q)).epsilon(1e-14));
}

TEST_CASE("P1 = w + a0/a1 from every route") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const double want = rep.data.a0 / rep.data.a1;
        for (auto route : {ops_by_recurrence, ops_by_rodrigues, ops_by_forward}) {
            const MonicOps ops = route(rep.data, 1);
            CHECK(ops.polys[1][1] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(ops.polys[1][0] == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("triple route agreement to 1e-9 for n <= 10") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const MonicOps rec = ops_by_recurrence(rep.data, 10);
        const MonicOps rod = ops_by_rodrigues(rep.data, 10);
        const MonicOps fwd = ops_by_forward(rep.data, 10);
        for (int n = 0; n <= 10; ++n) {
            CHECK(max_rel_coeff_diff(rec.polys[n], rod.polys[n]) <= 1e-9);
            CHECK(max_rel_coeff_diff(rec.polys[n], fwd.polys[n]) <= 1e-9);
        }
    }
}

TEST_CASE("Gram-Schmidt oracle reproduces the recurrence route") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const auto spec = pearson::classify(rep.data);
        const auto oracle = oracles::gram_schmidt_ops(rep.data, spec, 8);
        const MonicOps rec = ops_by_recurrence(rep.data, 8);
        for (int n = 0; n <= 8; ++n)
            CHECK(max_rel_coeff_diff(rec.polys[n], oracle[n]) <= 1e-7);
    }
}

TEST_CASE("Hahn operator basics") {
    const auto rep = reps::case_i();
    CHECK(hahn_apply(rep.data, Polynomial{3.0}).is_zero());
    // degree preserved for generic data
    const MonicOps rec = ops_by_recurrence(rep.data, 6);
    for (int n = 1; n <= 6; ++n)
        CHECK(hahn_apply(rep.data, rec.polys[n]).degree() == n);
}

TEST_CASE("Hahn eigenvalues") {
    const auto rep = reps::case_iii_hermite();
    CHECK(hahn_eigenvalue(rep.data, 1) == rep.data.a1);
    // n=2, q=1/2, a1=2, b2=1: 2*[2] + [2][1] q^{-1} = 3 + 3 = 6
    CHECK(hahn_eigenvalue(rep.data, 2) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK_THROWS_AS(hahn_eigenvalue(rep.data, 0), DomainError);
}

TEST_CASE("Hahn equation: hahn_apply(P_n) = lambda_n P_n") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const MonicOps rec = ops_by_recurrence(rep.data, 10);
        for (int n = 1; n <= 10; ++n) {
            const Polynomial lhs = hahn_apply(rep.data, rec.polys[n]);
            const Polynomial rhs = hahn_eigenvalue(rep.data, n) * rec.polys[n];
            CHECK((lhs - rhs).max_abs_coeff() <= 1e-9 * rec.polys[n].max_abs_coeff());
        }
    }
}

TEST_CASE("subleading coefficients match beta(q^n) and eta(q^n)") {
    // the omega^{n-1} coefficient has the closed form [n]/q^{n-1} *
    // (a0 - b1[-n+1])/(a1 - b2[-2n+2]); the omega^{n-2} coefficient is the
    // rational function eta evaluated at q^n
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const PearsonData& d = rep.data;
        const double q = d.q.q;
        const MonicOps rec = ops_by_recurrence(d, 10);
        for (int n = 2; n <= 10; ++n) {
            const double beta_cf = q_bracket(n, d.q) / std::pow(q, n - 1) *
                                   (d.a0 - d.b1 * q_bracket(-n + 1, d.q)) /
                                   (d.a1 - d.b2 * q_bracket(-2 * n + 2, d.q));
            const double beta_fn = beta_function(d, std::pow(q, n));
            const double eta_fn = eta_function(d, std::pow(q, n));
            const double scale = rec.polys[n].max_abs_coeff();
            CHECK(std::abs(rec.polys[n][n - 1] - beta_cf) <= 1e-9 * scale);
            CHECK(std::abs(rec.polys[n][n - 1] - beta_fn) <= 1e-9 * scale);
            CHECK(std::abs(rec.polys[n][n - 2] - eta_fn) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("orthonormalize: norms and orthogonality") {
    const auto rep = reps::case_iii_hermite();
    const auto spec = pearson::classify(rep.data);
    const MonicOps rec = ops_by_recurrence(rep.data, 8);
    const auto onb = orthonormalize(rec, spec, 1e-12);
    const StructuralSeq seq = structural_functions(rep.data);

    CHECK(onb[0].norm * onb[0].norm == doctest::Approx(rep.mu0).epsilon(1e-10));
    CHECK(onb[1].norm * onb[1].norm ==
          doctest::Approx(rep.mu0 * seq.R(1)).epsilon(1e-10));

    // normalized integrands have O(1) values, so an absolute tail works here
    for (int n = 0; n <= 8; ++n) {
        for (int m = 0; m <= n; ++m) {
            auto f = [&](double w) {
                return onb[n].poly(w) * onb[m].poly(w) *
                       pearson::weight_eval(spec, rep.data, w, 1e-16);
            };
            const double ip =
                qcalc::jackson_integral(f, spec.support_lo, spec.support_hi, rep.data.q, 1e-12);
            CHECK(std::abs(ip - (n == m ? 1.0 : 0.0)) <= 1e-8);
        }
    }
}

TEST_CASE("derivative closure: monic d_q^k P_n is the OPS of the derived data") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        for (int k = 0; k <= 3; ++k) {
            const PearsonData dk = pearson::derive(rep.data, k);
            const MonicOps derived = ops_by_recurrence(dk, 8);
            for (int n = std::max(k, 1); n <= 8; ++n) {
                const Polynomial got = qderiv_closure(rep.data, n, k);
                CHECK(got.degree() == n - k);
                CHECK(max_rel_coeff_diff(got, derived.polys[n - k]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("closure at k = n-1 is linear and monic") {
    const auto rep = reps::case_ii();
    for (int n = 2; n <= 6; ++n) {
        const Polynomial p = qderiv_closure(rep.data, n, n - 1);
        CHECK(p.degree() == 1);
        CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("memoized sequences are safe under concurrent readers") {
    const StructuralSeq seq = structural_functions(reps::case_i().data);
    std::vector<double> reference(41);
    for (int n = 0; n <= 40; ++n) reference[static_cast<std::size_t>(n)] = seq.R(n);

    const StructuralSeq fresh = structural_functions(reps::case_i().data);
    std::atomic<int> mismatches{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&fresh, &reference, &mismatches, t] {
            for (int pass = 0; pass < 50; ++pass) {
                for (int n = (t * 7) % 41; n <= 40; ++n) {
                    if (fresh.R(n) != reference[static_cast<std::size_t>(n)]) ++mismatches;
                    if (fresh.D(n) == 0.0 && n == -1) ++mismatches; // keep D path exercised
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    CHECK(mismatches.load() == 0);
}
