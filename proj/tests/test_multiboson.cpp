#include <doctest.h>

#include <cmath>

#include "qhahn/multiboson.hpp"
#include "qhahn/ops.hpp"
#include "representatives.hpp"

using namespace qhahn;
using namespace qhahn::multiboson;

namespace {

MultibosonModel harmonic_ladder() {
    MultibosonModel m;
    m.k = {1};
    m.alpha = Eigen::MatrixXd::Identity(1, 1);
    m.g0 = [](std::span<const double>) { return 1.0; };
    m.h0 = [](std::span<const double> lam) { return lam[0]; };
    return m;
}

MultibosonModel two_photon() { // single mode, pair creation
    MultibosonModel m;
    m.k = {2};
    m.alpha = Eigen::MatrixXd::Constant(1, 1, 0.5);
    m.g0 = [](std::span<const double>) { return 1.0; };
    m.h0 = [](std::span<const double> lam) { return lam[0]; };
    return m;
}

MultibosonModel beam_splitter() { // k = (1,-1), finite orbits
    MultibosonModel m;
    m.k = {1, -1};
    m.alpha.resize(2, 2);
    m.alpha << 1.0, 0.0, 1.0, 1.0;
    m.g0 = [](std::span<const double>) { return 1.0; };
    m.h0 = [](std::span<const double> lam) { return lam[0]; };
    return m;
}

double interior_abs_max(const FockTruncation& oracle, const Eigen::MatrixXd& M) {
    double worst = 0.0;
    for (long n = 0; n < oracle.dim(); ++n)
        if (oracle.interior(n)) worst = std::max(worst, M.col(n).cwiseAbs().maxCoeff());
    return worst;
}

} // namespace

TEST_CASE("validate_model accepts and rejects per the constraints") {
    CHECK_NOTHROW(validate_model(harmonic_ladder()));
    CHECK_NOTHROW(validate_model(beam_splitter()));
    CHECK_NOTHROW(validate_model(two_photon()));

    MultibosonModel bad = harmonic_ladder();
    bad.k = {2}; // alpha * k = 2 != 1
    CHECK_THROWS_AS(validate_model(bad), DomainError);

    MultibosonModel singular = beam_splitter();
    singular.alpha << 1.0, 0.0, 1.0, 0.0;
    CHECK_THROWS_AS(validate_model(singular), DomainError);

    MultibosonModel zero = harmonic_ladder();
    zero.k = {0};
    CHECK_THROWS_AS(validate_model(zero), DomainError);
}

TEST_CASE("cluster polynomial values") {
    CHECK(cluster_polynomial(0, 7) == 1.0);
    CHECK(cluster_polynomial(2, 0) == 2.0);  // (n+1)(n+2) at n = 0
    CHECK(cluster_polynomial(2, 3) == 20.0); // 4*5
    CHECK(cluster_polynomial(-1, 0) == 0.0); // annihilating the vacuum
    CHECK(cluster_polynomial(-2, 1) == 0.0);
    CHECK(cluster_polynomial(-2, 5) == 20.0); // 5*4
}

TEST_CASE("structural G: ladder and two-mode values vs. the dense oracle") {
    const MultibosonModel ladder = harmonic_ladder();
    const long occ0[] = {0};
    CHECK(structural_G(ladder, occ0) == 1.0); // P_1(0) = 1

    const MultibosonModel bs = beam_splitter();
    const FockTruncation oracle = fock_oracle(bs, 5);
    const Eigen::MatrixXd AAd = oracle.A() * oracle.Adag();
    for (long idx = 0; idx < oracle.dim(); ++idx) {
        if (!oracle.interior(idx)) continue;
        const auto occ = oracle.occupations(idx);
        // (n0 + 1) * n1 for k = (1,-1) with g0 = 1
        const double want = static_cast<double>(occ[0] + 1) * static_cast<double>(occ[1]);
        CHECK(structural_G(bs, occ) == want);
        CHECK(AAd(idx, idx) == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("vacuum decomposition") {
    const MultibosonModel bs = beam_splitter();
    const double lam1 = 3.0;
    const auto dec = vacuum_lambdas(bs, std::span<const double>(&lam1, 1));
    CHECK(dec.kappa == 1);
    REQUIRE(dec.labels.size() == 1);
    CHECK(dec.labels[0] == 0);
    CHECK(dec.lambda0[0] == 0.0); // beta_{01} = 0 for this alpha

    const auto dec2 = vacuum_lambdas(two_photon(), {});
    CHECK(dec2.kappa == 2);
    REQUIRE(dec2.labels.size() == 2);
    CHECK(dec2.labels[0] == 0);
    CHECK(dec2.labels[1] == 1);
    CHECK(dec2.lambda0[0] == doctest::Approx(0.0));
    CHECK(dec2.lambda0[1] == doctest::Approx(0.5));

    MultibosonModel neg = harmonic_ladder();
    neg.k = {-1};
    neg.alpha = Eigen::MatrixXd::Constant(1, 1, -1.0);
    CHECK_THROWS_AS(vacuum_lambdas(neg, {}), DomainError);
}

TEST_CASE("dimension classification") {
    CHECK(dimension_class(beam_splitter()) == DimensionClass::finite);
    CHECK(dimension_class(two_photon()) == DimensionClass::infinite);
    MultibosonModel m = beam_splitter();
    m.k = {2, 1};
    m.alpha << 0.5, 0.0, -0.25, 0.5; // alpha*k = (1,0)
    CHECK(dimension_class(m) == DimensionClass::infinite);
}

TEST_CASE("reduce: harmonic ladder gives R(q^n) = n") {
    const auto red = reduce(harmonic_ladder(), {}, 0, reps::q_half());
    CHECK(red.seq.R(0) == 0.0);
    for (int n = 1; n <= 12; ++n) CHECK(red.seq.R(n) == doctest::Approx(n).epsilon(1e-14));
    for (int n = 0; n <= 12; ++n) CHECK(red.seq.D(n) == doctest::Approx(n).epsilon(1e-14));
}

TEST_CASE("reduce: two-photon sectors match the oracle diagonals") {
    const MultibosonModel m = two_photon();
    const FockTruncation oracle = fock_oracle(m, 12);
    const Eigen::MatrixXd AdA = oracle.Adag() * oracle.A();
    for (long l : {0L, 1L}) {
        const auto red = reduce(m, {}, l, reps::q_half());
        CHECK(red.seq.R(0) == 0.0);
        for (int n = 0; n <= 4; ++n) {
            const long occ = 2 * n + l; // orbit lattice point
            if (occ >= 10) continue;
            CHECK(red.seq.R(n) == doctest::Approx(AdA(occ, occ)).epsilon(1e-13));
        }
    }
    // analytic values on the odd orbit: R(q^n) = 2n (2n + 1)
    const auto red1 = reduce(m, {}, 1, reps::q_half());
    for (int n = 1; n <= 5; ++n)
        CHECK(red1.seq.R(n) == doctest::Approx((2.0 * n) * (2.0 * n + 1.0)).epsilon(1e-14));
}

TEST_CASE("reduce rejects finite models and bad labels") {
    const std::vector<double> lam{1.0};
    CHECK_THROWS_AS(reduce(beam_splitter(), lam, 0, reps::q_half()), DomainError);
    CHECK_THROWS_AS(reduce(two_photon(), {}, 5, reps::q_half()), DomainError);
}

TEST_CASE("reduce matches the Pearson structural functions on a constructed model") {
    // single-mode ladder whose coupling is tuned so that G equals the
    // discrete q-Hermite I structural function
    const auto rep = reps::case_iii_hermite();
    const StructuralSeq ref = ops::structural_functions(rep.data);
    MultibosonModel m = harmonic_ladder();
    m.g0 = [ref](std::span<const double> occ) {
        const int n0 = static_cast<int>(std::lround(occ[0]));
        return std::sqrt(ref.R(n0 + 1) / (n0 + 1.0));
    };
    m.h0 = [](std::span<const double>) { return 0.0; };
    const auto red = reduce(m, {}, 0, rep.data.q);
    for (int n = 0; n <= 20; ++n) {
        CHECK(red.seq.R(n) == doctest::Approx(ref.R(n)).epsilon(1e-13));
        CHECK(red.seq.D(n) == 0.0);
    }
}

TEST_CASE("fock oracle ladder matrix elements") {
    const FockTruncation oracle = fock_oracle(harmonic_ladder(), 5);
    const Eigen::MatrixXd& a = oracle.lowering(0);
    CHECK(a(0, 1) == doctest::Approx(1.0)); // a|1> = |0>
    CHECK(a(1, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(oracle.Adag()(1, 0) == doctest::Approx(1.0)); // a*|0> = |1>
    // [a, a*] = 1 away from the cutoff edge
    const Eigen::MatrixXd comm = a * a.transpose() - a.transpose() * a;
    for (long n = 0; n + 1 < oracle.dim(); ++n) CHECK(comm(n, n) == doctest::Approx(1.0));
}

TEST_CASE("commutation relations on interior states") {
    for (const auto& m : {harmonic_ladder(), two_photon(), beam_splitter()}) {
        const FockTruncation oracle = fock_oracle(m, m.modes() == 1 ? 12 : 6);
        // [A0, A] + A = 0
        const Eigen::MatrixXd c0 =
            oracle.Ai(0) * oracle.A() - oracle.A() * oracle.Ai(0) + oracle.A();
        CHECK(interior_abs_max(oracle, c0) <= 1e-10);
        // [A0, A*] - A* = 0 (checked on interior columns of the adjoint)
        const Eigen::MatrixXd c1 =
            oracle.Ai(0) * oracle.Adag() - oracle.Adag() * oracle.Ai(0) - oracle.Adag();
        CHECK(interior_abs_max(oracle, c1) <= 1e-10);
        // [A, A_i] = 0 for i >= 1 and [A_i, A_j] = 0
        for (int i = 1; i < m.modes(); ++i) {
            const Eigen::MatrixXd ci = oracle.A() * oracle.Ai(i) - oracle.Ai(i) * oracle.A();
            CHECK(interior_abs_max(oracle, ci) <= 1e-10);
        }
        for (int i = 0; i < m.modes(); ++i) {
            for (int j = 0; j < m.modes(); ++j) {
                const Eigen::MatrixXd cij =
                    oracle.Ai(i) * oracle.Ai(j) - oracle.Ai(j) * oracle.Ai(i);
                CHECK(cij.cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
    }
}

TEST_CASE("diagonal identities: A*A and AA* against structural G") {
    for (const auto& m : {harmonic_ladder(), two_photon(), beam_splitter()}) {
        const FockTruncation oracle = fock_oracle(m, m.modes() == 1 ? 12 : 6);
        const Eigen::MatrixXd AdA = oracle.Adag() * oracle.A();
        const Eigen::MatrixXd AAd = oracle.A() * oracle.Adag();
        for (long idx = 0; idx < oracle.dim(); ++idx) {
            if (!oracle.interior(idx)) continue;
            auto occ = oracle.occupations(idx);
            CHECK(AAd(idx, idx) == doctest::Approx(structural_G(m, occ)).epsilon(1e-13));
            for (std::size_t i = 0; i < occ.size(); ++i) occ[i] -= m.k[i];
            CHECK(AdA(idx, idx) == doctest::Approx(structural_G(m, occ)).epsilon(1e-13));
        }
    }
}

TEST_CASE("orbits run parallel to k with exactly one vacuum each") {
    const MultibosonModel m = beam_splitter();
    const FockTruncation oracle = fock_oracle(m, 6);
    // orbits are labeled by the conserved total n0 + n1 (the A_1 eigenvalue)
    std::vector<int> vacua_per_orbit(12, 0);
    for (long idx = 0; idx < oracle.dim(); ++idx) {
        const auto occ = oracle.occupations(idx);
        const bool vacuum = occ[0] == 0; // k_0 = 1 > 0: annihilated iff n_0 < 1
        const Eigen::VectorXd col = oracle.A().col(idx);
        if (vacuum) {
            CHECK(col.cwiseAbs().maxCoeff() == 0.0);
            vacua_per_orbit[static_cast<std::size_t>(occ[0] + occ[1])] += 1;
        } else if (occ[1] + 1 < oracle.cutoff()) {
            // A moves the state along -k: exactly one target amplitude
            std::vector<long> dst = occ;
            dst[0] -= 1;
            dst[1] += 1;
            const long didx = oracle.index(dst);
            REQUIRE(didx >= 0);
            CHECK(col(didx) != 0.0);
            for (long r = 0; r < oracle.dim(); ++r)
                if (r != didx) CHECK(col(r) == 0.0);
        }
    }
    for (int total = 0; total < 6; ++total)
        CHECK(vacua_per_orbit[static_cast<std::size_t>(total)] == 1);
}

TEST_CASE("A_i eigenvalues form the cone alpha * n") {
    const MultibosonModel m = beam_splitter();
    const FockTruncation oracle = fock_oracle(m, 5);
    for (long idx = 0; idx < oracle.dim(); ++idx) {
        const auto occ = oracle.occupations(idx);
        for (int i = 0; i < m.modes(); ++i) {
            double want = 0.0;
            for (int j = 0; j < m.modes(); ++j)
                want += m.alpha(i, j) * static_cast<double>(occ[static_cast<std::size_t>(j)]);
            CHECK(oracle.Ai(i)(idx, idx) == doctest::Approx(want).epsilon(1e-14));
        }
    }
}

TEST_CASE("reduction consistency: Jacobi data equals the oracle Hamiltonian block") {
    // two-photon model, even sector: compare <2m| H |2n> with the Jacobi
    // data from reduce, H = h0(occupations) + A + A*
    const MultibosonModel m = two_photon();
    const FockTruncation oracle = fock_oracle(m, 14);
    const auto red = reduce(m, {}, 0, reps::q_half());

    Eigen::MatrixXd H = oracle.A() + oracle.Adag();
    for (long idx = 0; idx < oracle.dim(); ++idx)
        H(idx, idx) += 0.5 * static_cast<double>(idx); // h0(n) = H0(alpha n) = n/2

    for (int row = 0; row <= 4; ++row) {
        for (int col = 0; col <= 4; ++col) {
            const long ridx = 2 * row, cidx = 2 * col;
            double want = 0.0;
            if (row == col) want = red.seq.D(row);
            else if (row + 1 == col) want = std::sqrt(red.seq.R(col));
            else if (row == col + 1) want = std::sqrt(red.seq.R(row));
            CHECK(H(ridx, cidx) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("reduce rejects non-lattice eigenvalues") {
    // k = (2, 0): occupations recover as n0 = 2 lambda0, n1 = lambda1;
    // a fractional lambda1 cannot come from a Fock state
    MultibosonModel m;
    m.k = {2, 0};
    m.alpha.resize(2, 2);
    m.alpha << 0.5, 0.0, 0.0, 1.0;
    m.g0 = [](std::span<const double>) { return 1.0; };
    m.h0 = [](std::span<const double> lam) { return lam[0]; };
    const std::vector<double> good{3.0};
    CHECK_NOTHROW(reduce(m, good, 0, reps::q_half()).seq.R(2));
    const std::vector<double> bad{0.4};
    CHECK_THROWS_AS(reduce(m, bad, 0, reps::q_half()), DomainError);
}

TEST_CASE("fock oracle guards") {
    CHECK_THROWS_AS(fock_oracle(two_photon(), 3), DomainError); // needs >= 2 max|k|
    MultibosonModel wide = beam_splitter();
    CHECK_THROWS_AS(fock_oracle(wide, 128), DomainError); // 128^2 > budget
}
