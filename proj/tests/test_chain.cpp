#include <gtest/gtest.h>

#include "mpsedge/chain.hpp"
#include "mpsedge/samples.hpp"

using namespace mpsedge;

namespace {

Mat basis_vector(int d, int i)
{
    Mat q = Mat::Zero(d, 1);
    q(i, 0) = 1.0;
    return q;
}

template <class F>
void expect_kind(F&& f, ErrorKind k)
{
    try {
        f();
        FAIL() << "expected " << kind_name(k);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), k) << e.what();
    }
}

// level 0: scalar primitive corner on e0; level 1: (σx, σz)/√2 scaled by 1/2
MpsTuple period_two_corner()
{
    const double s = 1.0 / std::sqrt(2.0);
    Mat p[2] = {s * samples::pauli_x(), s * samples::pauli_z()};
    std::vector<Mat> out;
    for (int mu = 0; mu < 2; ++mu) {
        Mat m = Mat::Zero(3, 3);
        m(0, 0) = s;
        m(1, 0) = 0.3 * (mu + 1);
        m(2, 0) = -0.2;
        m.block(1, 1, 2, 2) = 0.5 * p[mu];
        out.push_back(m);
    }
    return MpsTuple(out);
}

} // namespace

TEST(MinimalInvariant, Ghz)
{
    MpsTuple v = samples::ghz();
    Mat q = minimal_invariant_subspace(v);
    ASSERT_EQ(q.cols(), 1);
    EXPECT_LT(invariance_defect(v, q), 1e-10);
    double a = std::abs(q(0, 0)), b = std::abs(q(1, 0));
    EXPECT_NEAR(std::max(a, b), 1.0, 1e-10);
    EXPECT_NEAR(std::min(a, b), 0.0, 1e-10);
}

TEST(MinimalInvariant, PauliFull) { EXPECT_EQ(minimal_invariant_subspace(samples::pauli()).cols(), 2); }

TEST(MinimalInvariant, ToyEdge)
{
    Mat q = minimal_invariant_subspace(samples::toy_classa().B);
    ASSERT_EQ(q.cols(), 1);
    EXPECT_NEAR(std::abs(q(1, 0)), 1.0, 1e-10);
}

TEST(MinimalInvariant, SeedDeterminism)
{
    MpsTuple v = samples::four_corner_classa().B;
    EXPECT_EQ(minimal_invariant_subspace(v, std::nullopt, 5), minimal_invariant_subspace(v, std::nullopt, 5));
}

TEST(BuildChain, GhzTwoLevels)
{
    InvariantChain ch = build_chain(samples::ghz(), basis_vector(2, 0));
    EXPECT_EQ(ch.k, 1);
    Mat r1 = ch.level_projection(1);
    EXPECT_LT((r1 - unit(2, 1, 1)).norm(), 1e-10);
}

TEST(BuildChain, ToyCorner)
{
    ClassAData d = samples::toy_classa();
    InvariantChain ch = build_chain(d.B, basis_vector(2, 1));
    EXPECT_EQ(ch.k, 1);
    EXPECT_LT((ch.level_projection(1) - unit(2, 0, 0)).norm(), 1e-10);
    const double s = 1.0 / std::sqrt(2.0);
    for (int mu = 0; mu < 2; ++mu) EXPECT_NEAR(std::abs(ch.corners[1][mu](0, 0)), 0.5 * s, 1e-12);
}

TEST(BuildChain, PauliTrivial)
{
    InvariantChain ch = build_chain(samples::pauli(), identity(2));
    EXPECT_EQ(ch.k, 0);
}

TEST(BuildChain, LevelsInvariantAndMinimal)
{
    std::mt19937_64 rng(5);
    samples::RandomClassAOptions o;
    o.n0 = 2;
    o.kR = 2;
    o.kL = 1;
    ClassAData d = samples::random_classa(o, rng);
    Mat s = samples::random_block_triangular(d.n0, d.K(), rng);
    MpsTuple v = d.B.similarity(s);
    InvariantChain ch = build_chain(v, minimal_invariant_subspace(v));
    EXPECT_EQ(ch.k, d.kR + d.kL);
    for (int a = 0; a <= ch.k; ++a) {
        EXPECT_LT(invariance_defect(v, ch.basis_upto(a)), 1e-9);
        EXPECT_EQ(ch.levels[static_cast<size_t>(a)].cols(), d.n0);
    }
    // corner products follow the block structure: p_a v_w (1 - p_{a-1})
    for (int a = 1; a <= ch.k; ++a) {
        Mat pa = ch.projection(a), pb = ch.projection(a - 1), one = identity(v.D());
        Mat lvl = ch.levels[static_cast<size_t>(a)];
        Mat w = v[0] * v[1] * v[0];
        Mat corner = ch.corners[static_cast<size_t>(a)][0] * ch.corners[static_cast<size_t>(a)][1] * ch.corners[static_cast<size_t>(a)][0];
        EXPECT_LT((lvl.adjoint() * pa * w * (one - pb) * lvl - corner).norm(), 1e-9);
    }
}

TEST(CornerRescale, ToyQuarter)
{
    InvariantChain ch = corner_rescale(build_chain(samples::toy_classa().B, basis_vector(2, 1)));
    ASSERT_EQ(ch.radii.size(), 2u);
    EXPECT_NEAR(ch.radii[0], 1.0, 1e-12);
    EXPECT_NEAR(ch.radii[1], 0.25, 1e-12);
    EXPECT_TRUE(ch.rescaled[1].normalized());
    const double s = 1.0 / std::sqrt(2.0);
    for (int mu = 0; mu < 2; ++mu) EXPECT_NEAR(std::abs(ch.rescaled[1][mu](0, 0)), s, 1e-12);
}

TEST(CornerRescale, ZeroCorner)
{
    const double s = 1.0 / std::sqrt(2.0);
    MpsTuple v({samples::m2(s, 0, 1, 0), samples::m2(s, 0, 0.5, 0)});
    InvariantChain ch = build_chain(v, basis_vector(2, 0));
    ASSERT_EQ(ch.k, 1);
    expect_kind([&] { corner_rescale(ch); }, ErrorKind::CornerZero);
}

TEST(CornerRescale, GhzContractionFail)
{
    expect_kind([] { corner_rescale(build_chain(samples::ghz(), basis_vector(2, 0))); }, ErrorKind::ContractionFail);
}

TEST(CornerRescale, ClassACornersContract)
{
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 3; ++rep) {
        samples::RandomClassAOptions o;
        o.kR = 2;
        o.kL = 0;
        ClassAData d = samples::random_classa(o, rng);
        InvariantChain ch = corner_rescale(build_chain(d.B, minimal_invariant_subspace(d.B)));
        for (int a = 1; a <= ch.k; ++a) EXPECT_LT(ch.radii[static_cast<size_t>(a)], 1.0);
    }
}

TEST(Align, ToyIdentity)
{
    InvariantChain ch = corner_rescale(build_chain(samples::toy_classa().B, basis_vector(2, 1)));
    ch = align_to_primitive(ch, ch.rescaled.front());
    ASSERT_EQ(ch.phases.size(), 2u);
    for (int a = 0; a < 2; ++a) {
        EXPECT_LT(std::abs(ch.phases[static_cast<size_t>(a)] - 1.0), 1e-10);
        EXPECT_LT((ch.align[static_cast<size_t>(a)] - identity(1)).norm(), 1e-10);
    }
}

TEST(Align, ScrambledToy)
{
    std::mt19937_64 rng(3);
    MpsTuple v = samples::toy_classa().B.similarity(random_matrix(2, 2, rng) + 2.0 * identity(2));
    InvariantChain ch = corner_rescale(build_chain(v, minimal_invariant_subspace(v)));
    ch = align_to_primitive(ch, ch.rescaled.front());
    for (int a = 0; a <= ch.k; ++a) {
        cplx c = ch.phases[static_cast<size_t>(a)];
        EXPECT_NEAR(std::abs(c), 1.0, 1e-10);
        EXPECT_LT(intertwiner_residual(ch.rescaled.front(), ch.rescaled[static_cast<size_t>(a)], ch.align[static_cast<size_t>(a)],
                                       std::conj(c)),
                  1e-8);
    }
}

TEST(Align, PeriodTwoCorner)
{
    MpsTuple v = period_two_corner();
    InvariantChain ch = corner_rescale(build_chain(v, basis_vector(3, 0)));
    ASSERT_EQ(ch.k, 1);
    expect_kind([&] { align_to_primitive(ch, ch.rescaled.front()); }, ErrorKind::NotPrimitive);
}
