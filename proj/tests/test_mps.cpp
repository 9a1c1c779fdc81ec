#include <gtest/gtest.h>

#include "mpsedge/mps.hpp"
#include "mpsedge/samples.hpp"

using namespace mpsedge;

namespace {

std::vector<double> sorted_real(const Vec& v)
{
    std::vector<double> out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i).real());
    std::sort(out.begin(), out.end());
    return out;
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

} // namespace

TEST(MpsTuple, RejectsMixedShapes)
{
    expect_kind([] { MpsTuple({identity(2), identity(3)}); }, ErrorKind::DimensionMismatch);
    expect_kind([] { MpsTuple({identity(2)}); }, ErrorKind::InvalidArgument);
}

TEST(MpsTuple, NormalizedFlag)
{
    EXPECT_TRUE(samples::pauli().normalized());
    EXPECT_TRUE(samples::ghz().normalized());
    EXPECT_FALSE(samples::ghz().scaled(2.0).normalized());
}

TEST(TransferMatrix, ScalarTuple)
{
    const double a = 0.6, b = 0.8;
    Mat t = transfer_matrix(samples::scalar(a, cplx(0, b)));
    ASSERT_EQ(t.rows(), 1);
    EXPECT_NEAR(std::abs(t(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(TransferMatrix, Ghz)
{
    EigenData e = general_eig(transfer_matrix(samples::ghz()));
    auto w = sorted_real(e.eigenvalues);
    std::vector<double> want{0, 0, 1, 1};
    for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], want[i], 1e-12);
}

TEST(TransferMatrix, Pauli)
{
    EigenData e = general_eig(transfer_matrix(samples::pauli()));
    auto w = sorted_real(e.eigenvalues);
    std::vector<double> want{-1.0 / 3, -1.0 / 3, -1.0 / 3, 1};
    for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], want[i], 1e-12);
    EXPECT_LT(e.eigenvalues.imag().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TransferMatrix, MatchesApplyOnVec)
{
    std::mt19937_64 rng(4);
    MpsTuple v = samples::random_primitive(3, 3, rng);
    Mat x = random_matrix(3, 3, rng);
    EXPECT_LT((transfer_matrix(v) * vec(x) - vec(apply_transfer(v, x))).norm(), 1e-12);
    EXPECT_LT((transfer_matrix(v, Direction::L) * vec(x) - vec(apply_dual_transfer(v, x))).norm(), 1e-12);
}

TEST(GammaMap, GhzUnitWord)
{
    Vec g = gamma_map(samples::ghz(), 2, unit(2, 0, 0));
    ASSERT_EQ(g.size(), 4);
    Vec want = Vec::Unit(4, 0);
    EXPECT_LT((g - want).norm(), 1e-15);
}

TEST(GammaMap, GhzIdentity)
{
    Vec g = gamma_map(samples::ghz(), 2, identity(2));
    Vec want = Vec::Zero(4);
    want(0) = 1.0;
    want(3) = 1.0;
    EXPECT_LT((g - want).norm(), 1e-15);
}

TEST(GammaMap, ScalarConjugates)
{
    cplx a(0.6, 0.0), b(0.0, 0.8);
    Vec g = gamma_map(samples::scalar(a, b), 1, identity(1));
    EXPECT_LT(std::abs(g(0) - std::conj(a)), 1e-15);
    EXPECT_LT(std::abs(g(1) - std::conj(b)), 1e-15);
}

TEST(GammaMap, BigEndianWords)
{
    std::mt19937_64 rng(8);
    MpsTuple v = samples::random_primitive(2, 2, rng);
    Mat x = random_matrix(2, 2, rng);
    Vec g = gamma_map(v, 3, x);
    // word (1, 0, 1) sits at index 1*4 + 0*2 + 1 = 5
    Mat w = v[1] * v[0] * v[1];
    EXPECT_LT(std::abs(g(5) - (x * w.adjoint()).trace()), 1e-12);
    EXPECT_EQ(word_digits(5, 2, 3), (std::vector<int>{1, 0, 1}));
}

TEST(GammaMap, LeftReversesWords)
{
    std::mt19937_64 rng(12);
    MpsTuple v = samples::random_primitive(2, 2, rng);
    auto r = word_products(v, 2, Direction::R);
    auto l = word_products(v, 2, Direction::L);
    EXPECT_LT((r[1] - v[0] * v[1]).norm(), 1e-14);
    EXPECT_LT((l[1] - v[1] * v[0]).norm(), 1e-14);
}

TEST(GammaMap, WordCap)
{
    expect_kind([] { checked_pow(2, 40, max_words); }, ErrorKind::TooLarge);
}

TEST(KernelSpace, Ghz)
{
    KernelSpaceBasis k = kernel_space(samples::ghz(), 2);
    EXPECT_EQ(k.dim, 2);
    Mat diag = Mat::Zero(4, 2);
    diag(0, 0) = 1.0;
    diag(3, 1) = 1.0;
    EXPECT_LT(subspace_distance(k.basis, diag), 1e-12);
}

TEST(KernelSpace, PauliFull) { EXPECT_EQ(kernel_space(samples::pauli(), 2).dim, 4); }

TEST(KernelSpace, ToyClassA) { EXPECT_EQ(kernel_space(samples::toy_classa().B, 2).dim, 2); }

TEST(KernelSpace, NonDecreasingAndBounded)
{
    for (const MpsTuple& v : {samples::ghz(), samples::pauli(), samples::period_two(), samples::toy_classa().B,
                              samples::four_corner_classa().B}) {
        int prev = 0;
        for (int l = 1; l <= 6; ++l) {
            int d = kernel_space(v, l).dim;
            EXPECT_LE(d, v.D() * v.D());
            EXPECT_GE(d, prev) << "l = " << l;
            prev = d;
        }
    }
}

TEST(KernelSpace, Multiplicativity)
{
    MpsTuple v = samples::four_corner_classa().B;
    const int d = v.D();
    for (int l1 = 2; l1 <= 3; ++l1)
        for (int l2 = 2; l2 <= 3; ++l2) {
            KernelSpaceBasis a = kernel_space(v, l1), b = kernel_space(v, l2), ab = kernel_space(v, l1 + l2);
            std::vector<Vec> prods;
            for (int i = 0; i < a.dim; ++i)
                for (int j = 0; j < b.dim; ++j) prods.push_back(vec(a.element(i, d) * b.element(j, d)));
            Span s = orthonormal_span(prods);
            EXPECT_EQ(s.rank, ab.dim);
            EXPECT_LT(subspace_distance(s.basis, ab.basis), 1e-9);
        }
}

TEST(SupportProjection, Ghz)
{
    Mat p = support_projection(samples::ghz(), 2);
    Mat want = Mat::Zero(4, 4);
    want(0, 0) = 1.0;
    want(3, 3) = 1.0;
    EXPECT_LT((p - want).norm(), 1e-12);
}

TEST(SupportProjection, Scalar)
{
    cplx a(0.6, 0.0), b(0.0, 0.8);
    Mat p = support_projection(samples::scalar(a, b), 1);
    Vec u(2);
    u << std::conj(a), std::conj(b);
    EXPECT_LT((p - u * u.adjoint()).norm(), 1e-12);
}

TEST(SupportProjection, PauliRank)
{
    Mat p = support_projection(samples::pauli(), 2);
    EXPECT_NEAR(p.trace().real(), 4.0, 1e-10);
    EXPECT_LT((p * p - p).norm(), 1e-10);
}

TEST(SupportProjection, ProjectsGammaImages)
{
    std::mt19937_64 rng(21);
    MpsTuple v = samples::random_primitive(3, 2, rng);
    Mat p = support_projection(v, 2);
    for (int rep = 0; rep < 3; ++rep) {
        Vec g = gamma_map(v, 2, random_matrix(2, 2, rng));
        EXPECT_LT((p * g - g).norm(), 1e-10 * g.norm());
    }
}
