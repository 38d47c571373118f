#include <catch2/catch_amalgamated.hpp>

#include "purikit/linalg.hpp"
#include "purikit/rng.hpp"
#include "testutil.hpp"

using namespace purikit;
using testutil::channel_layout;
using testutil::identity_choi;

TEST_CASE("tensor: identity and basis bookkeeping", "[linalg]") {
    CHECK(max_abs_diff(tensor(CMatrix::identity(2), CMatrix::identity(2)), CMatrix::identity(4)) ==
          0.0);

    CMatrix p0 = testutil::proj(0, 2), p1 = testutil::proj(1, 2);
    CMatrix t = tensor(p0, p1);
    REQUIRE(t.rows() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(t(i, j) == ((i == 1 && j == 1) ? cplx(1.0, 0.0) : cplx(0.0, 0.0)));
}

TEST_CASE("tensor: quadruple-loop oracle on random 2x2 blocks", "[linalg]") {
    Rng rng(11);
    CMatrix a = rng.ginibre(2, 2), b = rng.ginibre(2, 2);
    CMatrix t = tensor(a, b);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    CHECK(t(2 * i + k, 2 * j + l) == a(i, j) * b(k, l));
}

TEST_CASE("tensor: associativity is exact", "[linalg]") {
    Rng rng(12);
    CMatrix a = rng.ginibre(2, 2), b = rng.ginibre(3, 3), c = rng.ginibre(2, 2);
    CHECK(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) == 0.0);
}

TEST_CASE("tensor: capacity cap", "[linalg]") {
    CMatrix big(2048, 2048);
    CHECK_THROWS_AS(tensor(big, CMatrix::identity(4)), CapacityError);
}

TEST_CASE("partial_trace: maximally entangled marginal", "[linalg]") {
    CMatrix bell(4, 1);
    bell[0] = 1.0 / std::sqrt(2.0);
    bell[3] = 1.0 / std::sqrt(2.0);
    SpaceLayout l({Factor{"A", 2, Role::wire}, Factor{"B", 2, Role::wire}});
    CMatrix red = partial_trace(outer(bell, bell), l, {"A"});
    CHECK(max_abs_diff(red, CMatrix::identity(2) * cplx(0.5, 0.0)) < 1e-15);
}

TEST_CASE("partial_trace: product state and index-sum oracle", "[linalg]") {
    Rng rng(13);
    CMatrix rho = testutil::random_density(3, rng);
    CMatrix sigma = testutil::random_density(2, rng);
    SpaceLayout l({Factor{"A", 3, Role::wire}, Factor{"B", 2, Role::wire}});
    CHECK(max_abs_diff(partial_trace(tensor(rho, sigma), l, {"B"}), rho) < 1e-12);

    // three factors, trace the middle one, check against explicit index sums
    SpaceLayout l3({Factor{"A", 2, Role::wire}, Factor{"B", 3, Role::wire}, Factor{"C", 2, Role::wire}});
    CMatrix m = testutil::random_hermitian(12, rng);
    CMatrix red = partial_trace(m, l3, {"B"});
    CHECK(std::abs(red.trace() - m.trace()) < 1e-12);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t ap = 0; ap < 2; ++ap)
                for (std::size_t cp = 0; cp < 2; ++cp) {
                    cplx s = 0.0;
                    for (std::size_t b = 0; b < 3; ++b)
                        s += m((a * 3 + b) * 2 + c, (ap * 3 + b) * 2 + cp);
                    CHECK(std::abs(red(a * 2 + c, ap * 2 + cp) - s) < 1e-13);
                }
}

TEST_CASE("partial_trace: tensor marginal scales by the trace", "[linalg]") {
    Rng rng(14);
    CMatrix a = testutil::random_hermitian(3, rng);
    CMatrix b = testutil::random_hermitian(4, rng);
    SpaceLayout l({Factor{"a", 3, Role::wire}, Factor{"b", 4, Role::wire}});
    CHECK(max_abs_diff(partial_trace(tensor(a, b), l, {"b"}), a * b.trace()) < 1e-12);
}

TEST_CASE("partial_trace: unknown label", "[linalg]") {
    SpaceLayout l({Factor{"A", 2, Role::wire}});
    CHECK_THROWS_AS(partial_trace(CMatrix::identity(2), l, {"Z"}), ArgumentError);
}

TEST_CASE("eig_hermitian: reconstruction and orthonormality", "[eig]") {
    Rng rng(15);
    for (std::size_t d : {2, 3, 8, 16, 64}) {
        CMatrix m = testutil::random_hermitian(d, rng);
        auto eig = eig_hermitian(m);
        CMatrix rec(d, d);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    rec(i, j) += eig.values[k] * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
        CHECK(max_abs_diff(rec, m) < 1e-12 * std::max(1.0, m.norm_inf()) * double(d));
        CHECK(max_abs_diff(eig.vectors.dagger() * eig.vectors, CMatrix::identity(d)) < 1e-12);
        for (std::size_t k = 1; k < d; ++k) CHECK(eig.values[k - 1] <= eig.values[k]);
    }
}

TEST_CASE("psd_pow: identity and pseudo-inverse kernel", "[linalg]") {
    CHECK(max_abs_diff(psd_pow(CMatrix::identity(3), 0.5), CMatrix::identity(3)) < 1e-14);

    CMatrix d40(2, 2);
    d40(0, 0) = 4.0;
    CMatrix expect(2, 2);
    expect(0, 0) = 0.5;
    CHECK(max_abs_diff(psd_pow(d40, -0.5), expect) < 1e-14);
}

TEST_CASE("psd_pow: square-back oracle and commutation", "[linalg]") {
    Rng rng(16);
    for (int rep = 0; rep < 10; ++rep) {
        CMatrix m = testutil::random_psd(5, rng);
        CMatrix r = psd_pow(m, 0.5);
        CHECK(max_abs_diff(r * r, m) < 1e-10 * std::max(1.0, m.norm_inf()));
        CHECK(max_abs_diff(m * r, r * m) < 1e-10 * m.norm_inf());
    }
}

TEST_CASE("psd_pow: rejects significantly negative eigenvalues", "[linalg]") {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -0.5;
    CHECK_THROWS_AS(psd_pow(m, 0.5), NotPsdError);
}

TEST_CASE("apply_choi: identity and depolarizing channels", "[linalg]") {
    Rng rng(17);
    SpaceLayout l = channel_layout("I", 2, "O", 2);
    CMatrix rho = testutil::random_density(2, rng);
    CHECK(max_abs_diff(apply_choi(identity_choi(2), l, rho), rho) < 1e-14);

    CMatrix dep = CMatrix::identity(4) * cplx(0.5, 0.0);
    CHECK(max_abs_diff(apply_choi(dep, l, rho), CMatrix::identity(2) * cplx(0.5, 0.0)) < 1e-14);
}

TEST_CASE("apply_choi: Kraus-sum oracle and linearity", "[linalg]") {
    Rng rng(18);
    SpaceLayout l = channel_layout("I", 3, "O", 2);
    auto ks = testutil::random_kraus(3, 2, 2, rng);
    CMatrix choi = kraus_to_choi(ks);
    for (int rep = 0; rep < 5; ++rep) {
        CMatrix rho = testutil::random_density(3, rng);
        CHECK(max_abs_diff(apply_choi(choi, l, rho), testutil::apply_kraus(ks, rho)) < 1e-11);
    }
    CMatrix r1 = testutil::random_density(3, rng), r2 = testutil::random_density(3, rng);
    const cplx c1(0.3, 0.1), c2(-0.2, 0.4);
    CMatrix lhs = apply_choi(choi, l, r1 * c1 + r2 * c2);
    CMatrix rhs = apply_choi(choi, l, r1) * c1 + apply_choi(choi, l, r2) * c2;
    CHECK(max_abs_diff(lhs, rhs) < 1e-11);
}

TEST_CASE("apply_choi: dimension mismatch", "[linalg]") {
    SpaceLayout l = channel_layout("I", 2, "O", 2);
    CHECK_THROWS_AS(apply_choi(identity_choi(2), l, CMatrix::identity(3)), ArgumentError);
}

TEST_CASE("link_product: empty contraction equals tensor", "[linalg]") {
    Rng rng(19);
    CMatrix a = testutil::random_hermitian(2, rng), b = testutil::random_hermitian(3, rng);
    SpaceLayout la = SpaceLayout::single("x", 2), lb = SpaceLayout::single("y", 3);
    auto r = link_product(a, la, b, lb, {});
    CHECK(max_abs_diff(r.m, tensor(a, b)) == 0.0);
    CHECK(r.layout.total_dim() == 6);
}

TEST_CASE("link_product: state through identity channel", "[linalg]") {
    Rng rng(20);
    CMatrix rho = testutil::random_density(2, rng);
    SpaceLayout lrho = SpaceLayout::single("w", 2);
    SpaceLayout lchoi = channel_layout("w", 2, "o", 2);
    auto r = link_product(rho, lrho, identity_choi(2), lchoi, {"w"});
    CHECK(max_abs_diff(r.m, rho) < 1e-14);
    CHECK(r.layout.labels() == std::vector<std::string>{"o"});
}

TEST_CASE("link_product: channel composition against sequential application", "[linalg]") {
    Rng rng(21);
    auto k1 = testutil::random_kraus(2, 3, 2, rng);
    auto k2 = testutil::random_kraus(3, 2, 3, rng);
    CMatrix c1 = kraus_to_choi(k1), c2 = kraus_to_choi(k2);
    SpaceLayout l1 = channel_layout("a", 2, "b", 3);
    SpaceLayout l2 = channel_layout("b", 3, "c", 2);
    auto comp = link_product(c1, l1, c2, l2, {"b"});
    SpaceLayout lcomp = channel_layout("a", 2, "c", 2);
    for (int rep = 0; rep < 20; ++rep) {
        CMatrix rho = testutil::random_density(2, rng);
        CMatrix direct = testutil::apply_kraus(k2, testutil::apply_kraus(k1, rho));
        CHECK(max_abs_diff(apply_choi(comp.m, lcomp, rho), direct) < 1e-11);
    }
}

TEST_CASE("link_product: associativity over disjoint shared labels", "[linalg]") {
    Rng rng(22);
    for (int rep = 0; rep < 5; ++rep) {
        CMatrix a = testutil::random_hermitian(4, rng);
        CMatrix b = testutil::random_hermitian(8, rng);
        CMatrix c = testutil::random_hermitian(4, rng);
        SpaceLayout la({Factor{"p", 2, Role::wire}, Factor{"q", 2, Role::wire}});
        SpaceLayout lb({Factor{"q", 2, Role::wire}, Factor{"r", 2, Role::wire}, Factor{"s", 2, Role::wire}});
        SpaceLayout lc({Factor{"s", 2, Role::wire}, Factor{"t", 2, Role::wire}});
        auto ab = link_product(a, la, b, lb, {"q"});
        auto ab_c = link_product(ab.m, ab.layout, c, lc, {"s"});
        auto bc = link_product(b, lb, c, lc, {"s"});
        auto a_bc = link_product(a, la, bc.m, bc.layout, {"q"});
        CHECK(ab_c.layout == a_bc.layout);
        CHECK(max_abs_diff(ab_c.m, a_bc.m) < 1e-10 * std::max(1.0, ab_c.m.norm_inf()));
    }
}

TEST_CASE("link_product: dim mismatch on shared label", "[linalg]") {
    SpaceLayout la = SpaceLayout::single("w", 2), lb = SpaceLayout::single("w", 3);
    CHECK_THROWS_AS(link_product(CMatrix::identity(2), la, CMatrix::identity(3), lb, {"w"}),
                    ArgumentError);
}

TEST_CASE("contract_pure: matches the matrix-level link product", "[linalg]") {
    Rng rng(23);
    CMatrix a = rng.ginibre(4, 1), b = rng.ginibre(4, 1);
    SpaceLayout la({Factor{"u", 2, Role::wire}, Factor{"w", 2, Role::wire}});
    SpaceLayout lb({Factor{"w", 2, Role::wire}, Factor{"v", 2, Role::wire}});
    auto vec = contract_pure(a, la, b, lb, {"w"});
    auto mat = link_product(outer(a, a), la, outer(b, b), lb, {"w"});
    CHECK(max_abs_diff(outer(vec.v, vec.v), mat.m) < 1e-12 * std::max(1.0, mat.m.norm_inf()));
    CHECK(vec.layout == mat.layout);
}

TEST_CASE("apply_factor_op acts on the named factor only", "[linalg]") {
    Rng rng(24);
    SpaceLayout l({Factor{"a", 2, Role::wire}, Factor{"b", 3, Role::wire}, Factor{"c", 2, Role::wire}});
    CMatrix v = rng.ginibre(12, 1);
    CMatrix op = rng.ginibre(3, 3);
    CMatrix direct = tensor(tensor(CMatrix::identity(2), op), CMatrix::identity(2)) * v;
    CHECK(max_abs_diff(apply_factor_op(v, l, "b", op), direct) < 1e-13);
}

TEST_CASE("second_eigenvalue_bound: rank-1 versus mixed", "[eig]") {
    Rng rng(25);
    CMatrix v = rng.ginibre(6, 1);
    CMatrix pure = outer(v, v);
    CHECK(second_eigenvalue_bound(pure) < 1e-10 * std::real(inner(v, v)));
    CMatrix mixed = testutil::random_psd(6, rng);
    auto eig = eig_hermitian(mixed);
    CHECK(second_eigenvalue_bound(mixed) >= eig.values[4] - 1e-9);
}
