#include <doctest.h>

#include <cmath>

#include "qhahn/pearson.hpp"
#include "representatives.hpp"

using namespace qhahn::pearson;
using qhahn::qcalc::QParam;

namespace {

// residual scale: magnitudes of the three combined terms of the equation
double residual_scale(const PearsonData& d, const WeightSpec& s, double w) {
    const double q = d.q.q;
    const double rw = weight_eval(s, d, w, 1e-15);
    const double rq = weight_eval(s, d, q * w, 1e-15);
    return (std::abs(rw * d.B(w)) + std::abs(rq * d.B(q * w))) / ((1.0 - q) * std::abs(w)) +
           std::abs(rw * d.A(w));
}

} // namespace

TEST_CASE("discrete q-Hermite I classifies as case iii on [-1,1]") {
    const auto rep = reps::case_iii_hermite();
    const WeightSpec spec = classify(rep.data);
    CHECK(spec.tag == WeightCase::iii);
    CHECK(spec.root_a == doctest::Approx(-1.0));
    CHECK(*spec.root_b == doctest::Approx(1.0));
    CHECK(spec.support_lo == doctest::Approx(-1.0));
    CHECK(spec.support_hi == doctest::Approx(1.0));
    // rho(1) = (q;q)_inf (-q;q)_inf = (q^2;q^2)_inf
    CHECK(weight_eval(spec, rep.data, 1.0, 1e-15) ==
          doctest::Approx(reps::kPochQ2Q2Inf).epsilon(1e-13));
    // rho(0) = 1: every Pochhammer factor at argument 0
    CHECK(weight_eval(spec, rep.data, 0.0, 1e-15) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("representative classification per case") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const WeightSpec spec = classify(rep.data);
        CHECK(spec.tag == rep.tag);
    }
    // generic case i carries all four roots
    const WeightSpec si = classify(reps::case_i().data);
    CHECK(si.shifted.count == 2);
    CHECK(!si.shifted.complex_pair);
    CHECK(si.shifted.c == doctest::Approx(-3.0));
    CHECK(si.shifted.d == doctest::Approx(2.0));
    // complex pair representative
    const WeightSpec sa = classify(reps::case_i_alpha().data);
    CHECK(sa.shifted.complex_pair);
    CHECK(sa.shifted.re == doctest::Approx(0.0));
    CHECK(sa.shifted.im == doctest::Approx(1.0));
    // exponent of the little q-Jacobi representative
    const WeightSpec siv = classify(reps::case_iv().data);
    CHECK(*siv.r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(siv.support_lo == 0.0);
    CHECK(siv.support_hi == doctest::Approx(1.0));
    // the Big q-Jacobi identification pins the shifted root d = 1
    const WeightSpec sbig = classify(reps::case_i_bigqjacobi().data);
    CHECK(sbig.shifted.d == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sbig.shifted.c == doctest::Approx(-2.0).epsilon(1e-12));
    // Big q-Laguerre: single shifted root at 1
    const WeightSpec slag = classify(reps::case_ii().data);
    CHECK(slag.shifted.c == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cases vii and viii are rejected") {
    CHECK_THROWS_AS(classify(reps::case_vii_data()), NoPositiveMeasureError);
    CHECK_THROWS_AS(classify(reps::case_viii_data()), NoPositiveMeasureError);
    CHECK_THROWS_AS(classify(PearsonData{0.0, 0.0, 0.0, 0.0, 0.0, reps::q_half()}),
                    DegenerateDataError);
}

TEST_CASE("classification is scale invariant") {
    for (double c : {3.0, -0.5, 1e-3}) {
        for (const auto& rep : reps::all_families()) {
            INFO(rep.name << " x " << c);
            PearsonData scaled = rep.data;
            scaled.a1 *= c;
            scaled.a0 *= c;
            scaled.b2 *= c;
            scaled.b1 *= c;
            scaled.b0 *= c;
            const WeightSpec a = classify(rep.data);
            const WeightSpec b = classify(scaled);
            CHECK(a.tag == b.tag);
            CHECK(a.root_a == doctest::Approx(b.root_a).epsilon(1e-12));
            CHECK(a.support_lo == doctest::Approx(b.support_lo).epsilon(1e-12));
            CHECK(a.support_hi == doctest::Approx(b.support_hi).epsilon(1e-12));
        }
    }
}

TEST_CASE("Pearson residual vanishes on the grid for every representative") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const WeightSpec spec = classify(rep.data);
        for (const auto& node : support_grid(spec, rep.data.q, 50)) {
            const double res = pearson_residual(rep.data, spec, node.omega);
            const double scale = residual_scale(rep.data, spec, node.omega);
            CHECK(std::abs(res) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("negative control: a wrong weight leaves a visible residual") {
    const auto rep = reps::case_iii_hermite();
    WeightSpec wrong = classify(rep.data);
    wrong.root_a = -1.15; // deliberately off the true root
    double worst = 0.0;
    for (const auto& node : support_grid(wrong, rep.data.q, 10)) {
        const double res = pearson_residual(rep.data, wrong, node.omega);
        worst = std::max(worst, std::abs(res) / residual_scale(rep.data, wrong, node.omega));
    }
    CHECK(worst > 1e-3);
}

TEST_CASE("weight positivity on the first 50 nodes of each endpoint") {
    // sign checked in log space: deep nodes of case vi underflow binary64
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const WeightSpec spec = classify(rep.data);
        for (const auto& node : support_grid(spec, rep.data.q, 51)) {
            const SignedLog sl = weight_eval_log(spec, rep.data, node.omega, 1e-15);
            CHECK(sl.sign == 1);
            const double direct = weight_eval(spec, rep.data, node.omega, 1e-15);
            if (direct != 0.0)
                CHECK(direct == doctest::Approx(std::exp(sl.log)).epsilon(1e-10));
        }
    }
}

TEST_CASE("boundary terms rho(a)B(a), rho(b)B(b) vanish for cases i-iii") {
    for (const auto& rep : {reps::case_i(), reps::case_i_alpha(), reps::case_i_bigqjacobi(),
                            reps::case_ii(), reps::case_iii_hermite(),
                            reps::case_iii_ascarlitz()}) {
        INFO(rep.name);
        const WeightSpec spec = classify(rep.data);
        const double scale = rep.data.magnitude();
        const double at_a = weight_eval(spec, rep.data, spec.root_a, 1e-15) * rep.data.B(spec.root_a);
        const double at_b = weight_eval(spec, rep.data, *spec.root_b, 1e-15) * rep.data.B(*spec.root_b);
        CHECK(std::abs(at_a) / scale <= 1e-12);
        CHECK(std::abs(at_b) / scale <= 1e-12);
    }
}

TEST_CASE("derive: identity at k=0 and residual oracle at k=1") {
    for (const auto& rep : reps::all_families()) {
        INFO(rep.name);
        const PearsonData& d = rep.data;
        const PearsonData d0 = derive(d, 0);
        CHECK(d0.a1 == d.a1);
        CHECK(d0.a0 == d.a0);

        // rho^{(1)}(w) = rho(qw) B(qw) must satisfy the Pearson equation for
        // (A^{(1)}, B); evaluated pointwise off the grid as well.
        const WeightSpec spec = classify(d);
        const PearsonData d1 = derive(d, 1);
        const double q = d.q.q;
        auto rho1 = [&](double w) {
            return weight_eval(spec, d, q * w, 1e-16) * d.B(q * w);
        };
        for (double w : {0.77, 0.31, -0.2, 0.055}) {
            if (w < spec.support_lo || w > spec.support_hi) continue;
            if (spec.support_lo == 0.0 && w < 0.0) continue;
            const double lhs = (rho1(w) * d1.B(w) - rho1(q * w) * d1.B(q * w)) / ((1.0 - q) * w);
            const double rhs = rho1(w) * d1.A(w);
            const double scale = std::abs(lhs) + std::abs(rhs) + 1e-30;
            CHECK(std::abs(lhs - rhs) / scale <= 1e-10);
        }
    }
}

TEST_CASE("derive composes: k steps of one equal one step of k") {
    const PearsonData d = reps::case_i().data;
    for (int k = 1; k <= 4; ++k) {
        const PearsonData iter = derive(derive(d, k - 1), 1);
        const PearsonData direct = derive(d, k);
        CHECK(iter.a1 == doctest::Approx(direct.a1).epsilon(1e-12));
        CHECK(iter.a0 == doctest::Approx(direct.a0).epsilon(1e-12));
    }
}

TEST_CASE("support_grid layout and total mass") {
    const auto rep_iv = reps::case_iv(); // support [0,1]
    const WeightSpec s = classify(rep_iv.data);
    const auto nodes = support_grid(s, rep_iv.data.q, 3);
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[0].omega == doctest::Approx(1.0));
    CHECK(nodes[1].omega == doctest::Approx(0.5));
    CHECK(nodes[2].omega == doctest::Approx(0.25));
    CHECK(nodes[0].weight == doctest::Approx(0.5));
    CHECK(nodes[1].weight == doctest::Approx(0.25));
    CHECK(nodes[2].weight == doctest::Approx(0.125));

    // symmetric interval produces a symmetric node set
    const auto rep3 = reps::case_iii_hermite();
    const auto sym = support_grid(classify(rep3.data), rep3.data.q, 4);
    REQUIRE(sym.size() == 8);
    for (std::size_t i = 0; i < sym.size(); i += 2)
        CHECK(sym[i].omega == doctest::Approx(-sym[i + 1].omega));

    // total weight of f == 1 over a deep grid matches the Jackson integral
    double total = 0.0;
    for (const auto& n : support_grid(classify(rep3.data), rep3.data.q, 60)) total += n.weight;
    const double want = qhahn::qcalc::jackson_integral([](double) { return 1.0; }, -1.0, 1.0,
                                                       rep3.data.q, 1e-14);
    CHECK(total == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("weight_eval errors") {
    // the eighth-case formula is a plain power w^r
    WeightSpec viii{};
    viii.tag = WeightCase::viii;
    viii.r = 2.0;
    viii.support_lo = 0.0;
    viii.support_hi = 1.0;
    CHECK(weight_eval(viii, reps::case_viii_data(), 0.5, 1e-15) == doctest::Approx(0.25));
    // non-integer exponent with negative base is a domain error
    viii.r = 0.5;
    CHECK_THROWS_AS(weight_eval(viii, reps::case_viii_data(), -0.5, 1e-15), qhahn::DomainError);

    // a denominator root sitting on the grid is a pole
    WeightSpec pole = classify(reps::case_i().data);
    pole.shifted.c = 0.5; // omega/c = q^{-j} at omega = 1, j = 1
    CHECK_THROWS_AS(weight_eval(pole, reps::case_i().data, 1.0, 1e-15), qhahn::DomainError);
}
