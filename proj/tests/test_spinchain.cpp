#include <gtest/gtest.h>

#include "mpsedge/cpmap.hpp"
#include "mpsedge/samples.hpp"
#include "mpsedge/spinchain.hpp"

using namespace mpsedge;

namespace {

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

std::vector<int> range(int lo, int hi)
{
    std::vector<int> out;
    for (int N = lo; N <= hi; ++N) out.push_back(N);
    return out;
}

// Tr(G (A ⊗ 1)) / Tr G, or with A on the last l sites
cplx ed_expectation(const Mat& g, const Mat& a, int n, int N, Direction dir)
{
    const Eigen::Index rest = static_cast<Eigen::Index>(std::pow(n, N)) / a.rows();
    Mat big = dir == Direction::R ? kron(a, identity(rest)) : kron(identity(rest), a);
    return (g * big).trace() / g.trace();
}

} // namespace

TEST(ParentInteraction, Ghz)
{
    Interaction h = parent_interaction(samples::ghz(), 2);
    Mat want = unit(4, 1, 1) + unit(4, 2, 2);
    EXPECT_LT((h.h - want).norm(), 1e-12);
}

TEST(ParentInteraction, PauliRankFive)
{
    Interaction h = parent_interaction(samples::pauli(), 2);
    EXPECT_NEAR(h.h.trace().real(), 5.0, 1e-10);
    EXPECT_LT((h.h * h.h - h.h).norm(), 1e-10);
    EXPECT_LT(hermiticity_defect(h.h), 1e-12);
}

TEST(ParentInteraction, Degenerate)
{
    expect_kind([] { parent_interaction(samples::ghz(), 1); }, ErrorKind::DegenerateInteraction);
}

TEST(Hamiltonian, GhzThreeSites)
{
    SpMat H = assemble_hamiltonian(parent_interaction(samples::ghz(), 2), 3);
    EigenData e = hermitian_eig(to_dense(H));
    std::vector<double> want{0, 0, 1, 1, 1, 1, 2, 2};
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(e.eigenvalues(i).real(), want[static_cast<size_t>(i)], 1e-12);
}

TEST(Hamiltonian, RangeEqualsN)
{
    Interaction h = parent_interaction(samples::pauli(), 2);
    EXPECT_LT((to_dense(assemble_hamiltonian(h, 2)) - h.h).norm(), 1e-15);
}

TEST(Hamiltonian, NBelowRange)
{
    Interaction h = parent_interaction(samples::pauli(), 2);
    expect_kind([&] { assemble_hamiltonian(h, 1); }, ErrorKind::NLessThanRange);
}

TEST(Hamiltonian, SizeCap)
{
    Interaction h = parent_interaction(samples::ghz(), 2);
    expect_kind([&] { assemble_hamiltonian(h, 30); }, ErrorKind::TooLarge);
}

TEST(GroundData, Ghz)
{
    ChainSpectrum s = chain_spectrum(parent_interaction(samples::ghz(), 2), 3);
    EXPECT_EQ(s.kernel_dim, 2);
    EXPECT_NEAR(s.gap, 1.0, 1e-12);
    Mat g = s.projector();
    EXPECT_LT((g * g - g).norm(), 1e-12);
}

TEST(GroundData, AkltMatchesDense)
{
    SpMat H = assemble_hamiltonian(parent_interaction(samples::aklt(), 2), 6);
    ChainSpectrum s = ground_data(H, 1e-9, 6);
    EXPECT_EQ(s.kernel_dim, 4);
    EigenData e = hermitian_eig(to_dense(H), 1e-12, false);
    EXPECT_NEAR(s.gap, e.eigenvalues(4).real(), 1e-10);
    EXPECT_LT(e.eigenvalues(3).real(), 1e-10);
    for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i) EXPECT_NEAR(s.eigenvalues(i), e.eigenvalues(i).real(), 1e-10);
}

TEST(GroundData, GapBound)
{
    SpMat H = assemble_hamiltonian(parent_interaction(samples::toy_classa().B, 3), 6);
    ChainSpectrum s = ground_data(H);
    Mat lhs = to_dense(H) - s.gap * (identity(s.ground.rows()) - s.projector());
    EXPECT_GT(hermitian_eig(lhs, 1e-10, false).eigenvalues.real().minCoeff(), -1e-10);
}

TEST(GroundData, ZeroHamiltonian)
{
    expect_kind([] { ground_data(Mat(Mat::Zero(4, 4))); }, ErrorKind::NoGap);
}

TEST(GroundData, KernelIsGammaRange)
{
    MpsTuple b = samples::toy_classa().B;
    for (int N = 3; N <= 7; ++N) {
        ChainSpectrum s = chain_spectrum(parent_interaction(b, 3), N);
        Span sup = support_basis(b, N);
        EXPECT_EQ(s.kernel_dim, sup.rank);
        EXPECT_LT(projector_distance_bases(s.ground, sup.basis).op_norm, 1e-10);
    }
}

TEST(FrustrationFree, MatchesDiagonalization)
{
    Interaction h = parent_interaction(samples::aklt(), 2);
    for (int N = 2; N <= 6; ++N) {
        Mat q = frustration_free_kernel(h, N);
        ChainSpectrum s = chain_spectrum(h, N);
        EXPECT_EQ(q.cols(), s.kernel_dim);
        EXPECT_LT(projector_distance_bases(q, s.ground).op_norm, 1e-10);
    }
}

TEST(ProjectorDistance, Basics)
{
    Mat g = unit(2, 0, 0);
    EXPECT_NEAR(projector_distance(g, g).op_norm, 0.0, 1e-15);
    EXPECT_NEAR(projector_distance(g, unit(2, 1, 1)).op_norm, 1.0, 1e-15);
    EXPECT_NEAR(projector_distance(g, unit(2, 1, 1)).trace_overlap, 1.0, 1e-15);
}

TEST(ProjectorDistance, ToyRangesAgree)
{
    MpsTuple b = samples::toy_classa().B;
    ChainSpectrum s3 = chain_spectrum(parent_interaction(b, 3), 6);
    ChainSpectrum s4 = chain_spectrum(parent_interaction(b, 4), 6);
    EXPECT_LT(projector_distance(s3.projector(), s4.projector()).op_norm, 1e-10);
    EXPECT_LT(projector_distance_bases(s3.ground, s4.ground).op_norm, 1e-10);
}

TEST(EdgeDensity, MatchesGroundProjector)
{
    MpsTuple b = samples::four_corner_classa().B;
    std::mt19937_64 rng(8);
    Interaction h = parent_interaction(b, 5);
    for (int N : {6, 7}) {
        Mat g = chain_spectrum(h, N).projector();
        for (Direction dir : {Direction::R, Direction::L})
            for (int l = 1; l <= 2; ++l) {
                Mat a = random_matrix(1 << l, 1 << l, rng);
                Mat rho = edge_density(b, l, N, dir);
                EXPECT_LT(std::abs((rho * a).trace() - ed_expectation(g, a, 2, N, dir)), 1e-12);
            }
    }
}

TEST(EdgeExpectation, Identity)
{
    EdgeSeries s = edge_expectation(samples::toy_classa().B, identity(2), 1, range(4, 8));
    for (cplx x : s.values) EXPECT_LT(std::abs(x - 1.0), 1e-12);
    EXPECT_LT(std::abs(s.limit - 1.0), 1e-12);
}

TEST(EdgeExpectation, ToyConverges)
{
    EdgeSeries s = edge_expectation(samples::toy_classa().B, unit(2, 0, 0), 1, range(4, 10));
    EXPECT_LT(std::abs(s.ratio), 1.0);
    EXPECT_TRUE(s.converged);
    for (size_t i = 2; i < s.values.size(); ++i)
        EXPECT_LE(std::abs(s.values[i] - s.values[i - 1]), std::abs(s.values[i - 1] - s.values[i - 2]) + 1e-14);
}

TEST(EdgeExpectation, GhzHalf)
{
    EdgeSeries s = edge_expectation(samples::ghz(), unit(2, 0, 0), 1, range(3, 7));
    for (cplx x : s.values) EXPECT_LT(std::abs(x - 0.5), 1e-12);
}

TEST(EdgeExpectation, NeedsConsecutiveRange)
{
    EXPECT_THROW(edge_expectation(samples::ghz(), unit(2, 0, 0), 1, {3, 5}), Error);
}

TEST(Ltqo, ToyDecays)
{
    LtqoScan sc = ltqo_scan(samples::toy_classa().B, {samples::pauli_z(), samples::pauli_x()}, 1, range(4, 10));
    EXPECT_FALSE(sc.fit_skipped);
    EXPECT_GT(sc.s1, 0.0);
    EXPECT_LT(sc.s1, 1.0);
    EXPECT_TRUE(sc.monotone);
    EXPECT_GT(sc.support_floor, 0.0);
}

TEST(Ltqo, IdentitySkipsFit)
{
    LtqoScan sc = ltqo_scan(samples::toy_classa().B, {identity(2)}, 1, range(4, 8));
    EXPECT_TRUE(sc.fit_skipped);
    for (const auto& r : sc.rows) EXPECT_LT(r.error, 1e-12);
}

TEST(Interpolation, ToyRanges)
{
    MpsTuple b = samples::toy_classa().B;
    Interaction h0 = parent_interaction(b, 3), h1 = parent_interaction(b, 4);
    InterpolationReport rep = interpolation_scan(h0, h1, uniform_grid(5), range(4, 6));
    EXPECT_TRUE(rep.kernel_constant);
    EXPECT_GT(rep.gamma_star, 0.0);
    for (const auto& c : rep.cells) EXPECT_EQ(c.kernel_dim, 2);
    // endpoints
    for (const auto& c : rep.cells) {
        if (c.t != 0.0 && c.t != 1.0) continue;
        ChainSpectrum s = chain_spectrum(c.t == 0.0 ? h0 : h1, c.N);
        EXPECT_NEAR(c.lambda_min_nonzero, s.gap, 1e-12);
        EXPECT_NEAR(c.lambda_max, s.eigenvalues(s.eigenvalues.size() - 1), 1e-12);
    }
}

TEST(Interpolation, DegeneratePath)
{
    Interaction h0 = parent_interaction(samples::toy_classa().B, 3);
    InterpolationReport rep = interpolation_scan(h0, h0, uniform_grid(3), range(4, 5));
    for (const auto& c : rep.cells) {
        ChainSpectrum s = chain_spectrum(h0, c.N);
        EXPECT_NEAR(c.lambda_min_nonzero, s.gap, 1e-12);
    }
}

TEST(Interpolation, GridNeedsTwoPoints) { EXPECT_THROW(uniform_grid(1), Error); }

TEST(Fcs, IdentityIsOne)
{
    FcsTriple f = bulk_triple(samples::aklt());
    EXPECT_LT(std::abs(fcs_evaluate(f, {identity(3), identity(3), identity(3)}) - 1.0), 1e-12);
}

TEST(Fcs, AkltSzVanishes)
{
    FcsTriple f = bulk_triple(samples::pauli());
    EXPECT_LT((f.rho - 0.5 * identity(2)).norm(), 1e-10);
    Mat sz = Mat::Zero(3, 3);
    sz(0, 0) = 1.0;
    sz(2, 2) = -1.0;
    EXPECT_LT(std::abs(fcs_evaluate(f, {sz})), 1e-12);
    EXPECT_LT(std::abs(fcs_evaluate(bulk_triple(samples::aklt()), {sz})), 1e-12);
}

TEST(Fcs, AkltCorrelation)
{
    // ⟨S^z_0 S^z_1⟩ = −4/9 for the AKLT state
    Mat sz = Mat::Zero(3, 3);
    sz(0, 0) = 1.0;
    sz(2, 2) = -1.0;
    FcsTriple f = bulk_triple(samples::aklt());
    EXPECT_LT(std::abs(fcs_evaluate(f, {sz, sz}) + 4.0 / 9.0), 1e-12);
    EXPECT_LT(std::abs(fcs_evaluate(f, {sz, identity(3), sz}) - 4.0 / 27.0), 1e-12);
}

TEST(Fcs, LeftAndRightAgree)
{
    std::mt19937_64 rng(19);
    samples::RandomClassAOptions o;
    o.n0 = 2;
    ClassAData d = samples::random_classa(o, rng);
    FcsTriple r = bulk_triple(d.omega);
    Reflected ref = reflect_tuple(r.tuple, r.rho);
    FcsTriple l{ref.rho, ref.tuple, Direction::L};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int m = 0; m < 2; ++m) {
                    std::vector<Mat> ops{unit(2, i, j), unit(2, k, m)};
                    EXPECT_LT(std::abs(fcs_evaluate(r, ops) - fcs_evaluate(l, ops)), 1e-10);
                }
    EXPECT_LT((fcs_word_table(r, 3) - fcs_word_table(l, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Fcs, WordTableMatchesEvaluate)
{
    FcsTriple f = bulk_triple(samples::pauli());
    Mat t = fcs_word_table(f, 2);
    // ω(|w⟩⟨w'|) with w = (0, 2), w' = (1, 1)
    cplx direct = fcs_evaluate(f, {unit(3, 0, 1), unit(3, 2, 1)});
    EXPECT_LT(std::abs(t(2, 4) - direct), 1e-12);
}

TEST(Fcs, InvalidTriple)
{
    FcsTriple f{identity(2), samples::pauli(), Direction::R};
    expect_kind([&] { fcs_evaluate(f, {identity(3)}); }, ErrorKind::InvalidTriple);
    FcsTriple g{0.5 * identity(2), samples::pauli().scaled(2.0), Direction::R};
    expect_kind([&] { fcs_evaluate(g, {identity(3)}); }, ErrorKind::InvalidTriple);
}
