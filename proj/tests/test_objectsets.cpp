#include <catch2/catch_amalgamated.hpp>

#include "purikit/objectsets.hpp"
#include "purikit/rng.hpp"
#include "testutil.hpp"

using namespace purikit;
using testutil::channel_layout;
using testutil::identity_choi;

namespace {

QuantumObjectSet qubit_channel_set() {
    return channel_set(channel_layout("I", 2, "O", 2), {"I"}, {"O"});
}

QuantumObjectSet comb2_set() {
    SpaceLayout l({Factor{"I1", 2, Role::input}, Factor{"O1", 2, Role::output},
                   Factor{"I2", 2, Role::input}, Factor{"O2", 2, Role::output}});
    return comb_set(l, {{"I1", "O1"}, {"I2", "O2"}});
}

}  // namespace

TEST_CASE("gamma defaults", "[objectsets]") {
    CHECK(state_set(SpaceLayout::single("H", 3)).gamma == 1.0);
    CHECK(qubit_channel_set().gamma == 2.0);
    CHECK(comb2_set().gamma == 4.0);
}

TEST_CASE("channel projector: fixed points, idempotence, trace preservation", "[objectsets]") {
    auto set = qubit_channel_set();
    CHECK(max_abs_diff(project(set, identity_choi(2)), identity_choi(2)) < 1e-13);

    CMatrix zero(4, 4);
    CHECK(project(set, zero).norm_inf() == 0.0);

    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        CMatrix x = testutil::random_hermitian(4, rng);
        CMatrix px = project(set, x);
        // displayed formula evaluated directly as the oracle
        CMatrix tr_o = partial_trace(x, set.layout, {"O"});
        CMatrix oracle = x - tensor(tr_o, CMatrix::identity(2)) * cplx(0.5, 0.0) +
                         CMatrix::identity(4) * (x.trace() / 4.0);
        CHECK(max_abs_diff(px, oracle) < 1e-12);

        CMatrix tr_po = partial_trace(px, set.layout, {"O"});
        CHECK(max_abs_diff(tr_po, CMatrix::identity(2) * (px.trace() / 2.0)) < 1e-11);
        CHECK(max_abs_diff(project(set, px), px) < 1e-11 * std::max(1.0, x.norm_inf()));
        CHECK(std::abs(px.trace() - x.trace()) < 1e-11 * std::max(1.0, x.norm_inf()));
        CHECK(px.hermiticity_deviation() < 1e-11 * std::max(1.0, x.norm_inf()));
    }
}

TEST_CASE("channel projector is linear", "[objectsets]") {
    auto set = qubit_channel_set();
    Rng rng(32);
    CMatrix x = testutil::random_hermitian(4, rng), y = testutil::random_hermitian(4, rng);
    const cplx a(0.7, 0.0), b(-1.3, 0.0);
    CHECK(max_abs_diff(project(set, x * a + y * b), project(set, x) * a + project(set, y) * b) <
          1e-11);
}

TEST_CASE("one-tooth comb coincides with the channel projector exactly", "[objectsets]") {
    auto chan = qubit_channel_set();
    auto comb = comb_set(chan.layout, {{"I", "O"}});
    CHECK(comb.gamma == chan.gamma);
    Rng rng(33);
    for (int rep = 0; rep < 10; ++rep) {
        CMatrix x = testutil::random_hermitian(4, rng);
        CHECK(max_abs_diff(project(chan, x), project(comb, x)) < 1e-12);
    }
}

TEST_CASE("comb projector: random memory-channel combs are fixed points", "[objectsets]") {
    auto set = comb2_set();
    Rng rng(34);
    for (int rep = 0; rep < 5; ++rep) {
        CMatrix c = random_object(set, 16, rng);
        CHECK(std::abs(c.trace().real() - set.gamma) < 1e-10);
        CHECK(max_abs_diff(project(set, c), c) < 1e-11 * std::max(1.0, c.norm_inf()));
        // causality: Tr_{O2} C = (channel Choi) ⊗ 1_{I2}
        CMatrix tr2 = partial_trace(c, set.layout, {"O2"});
        SpaceLayout l3({Factor{"I1", 2, Role::input}, Factor{"O1", 2, Role::output},
                        Factor{"I2", 2, Role::input}});
        CMatrix c1 = partial_trace(tr2, l3, {"I2"}) * cplx(0.5, 0.0);
        CHECK(max_abs_diff(tr2, tensor(c1, CMatrix::identity(2))) < 1e-10);
        CMatrix tr_o1 = partial_trace(c1, channel_layout("I1", 2, "O1", 2), {"O1"});
        CHECK(max_abs_diff(tr_o1, CMatrix::identity(2)) < 1e-10);
    }
}

TEST_CASE("comb projector: idempotent and Hermiticity-preserving on random input", "[objectsets]") {
    auto set = comb2_set();
    Rng rng(35);
    for (int rep = 0; rep < 5; ++rep) {
        CMatrix x = testutil::random_hermitian(16, rng);
        CMatrix px = project(set, x);
        CHECK(max_abs_diff(project(set, px), px) < 1e-11 * std::max(1.0, x.norm_inf()));
        CHECK(px.hermiticity_deviation() < 1e-11 * std::max(1.0, x.norm_inf()));
    }
}

TEST_CASE("extended projector: trivial ancilla and identity base", "[objectsets]") {
    auto base = qubit_channel_set();
    auto ext1 = extend_set(base, 1);
    Rng rng(36);
    CMatrix x = testutil::random_hermitian(4, rng);
    CHECK(max_abs_diff(project(ext1, x), project(base, x)) < 1e-13);

    // state base: P' is the identity, every PSD matrix on A ⊗ H is fixed
    auto sbase = state_set(SpaceLayout::single("H", 2));
    auto sext = extend_set(sbase, 3);
    CMatrix y = testutil::random_psd(6, rng);
    CHECK(max_abs_diff(project(sext, y), y) < 1e-13);
}

TEST_CASE("extended projector: marginals of fixed points are base fixed points", "[objectsets]") {
    auto base = qubit_channel_set();
    auto ext = extend_set(base, 4);
    Rng rng(37);
    for (int rep = 0; rep < 50; ++rep) {
        CMatrix x = testutil::random_hermitian(16, rng);
        CMatrix w = project(ext, x);  // a fixed point by idempotence
        CHECK(max_abs_diff(project(ext, w), w) < 1e-11 * std::max(1.0, x.norm_inf()));
        CMatrix t = partial_trace(w, ext.layout, {ext.layout.factor(0).label});
        CHECK(max_abs_diff(project(base, t), t) < 1e-11 * std::max(1.0, t.norm_inf()));
    }
}

TEST_CASE("extend twice equals extending by the product ancilla", "[objectsets]") {
    auto base = qubit_channel_set();
    auto twice = extend_set(extend_set(base, 2, "A1"), 3, "A2");
    auto once = extend_set(base, 6, "A12");
    Rng rng(38);
    for (int rep = 0; rep < 5; ++rep) {
        CMatrix x = testutil::random_hermitian(24, rng);
        CHECK(max_abs_diff(project(twice, x), project(once, x)) < 1e-11 * std::max(1.0, x.norm_inf()));
    }
}

TEST_CASE("is_valid_object: states and channels", "[objectsets]") {
    auto sset = state_set(SpaceLayout::single("H", 2));
    CHECK(is_valid_object(sset, CMatrix::identity(2) * cplx(0.5, 0.0), 1e-9).valid());

    auto cset = qubit_channel_set();
    auto rep = is_valid_object(cset, identity_choi(2), 1e-9);
    CHECK(rep.valid());
    CHECK(rep.trace_value == Catch::Approx(2.0));

    auto bad = is_valid_object(cset, identity_choi(2) * cplx(1.5, 0.0), 1e-9);
    CHECK_FALSE(bad.valid());
    CHECK(bad.trace_value == Catch::Approx(3.0));
    CHECK(bad.psd_ok);
}

TEST_CASE("project: dimension mismatch", "[objectsets]") {
    CHECK_THROWS_AS(project(qubit_channel_set(), CMatrix::identity(3)), ArgumentError);
}
