#pragma once

#include <cstdint>
#include <vector>

#include "canonical.hpp"

namespace mpsedge {

// canonical data of one side, indexed by level a = 0..k
struct SideData {
    int n0 = 1;
    int k = 0;
    MpsTuple omega;
    std::vector<cplx> lambda;
    std::vector<Mat> D;              // a = 1..k at index a-1, (k+1) x (k+1)
    Mat Y;
    std::vector<std::vector<Mat>> x; // x[mu][a-1]
    int l0 = 1;
    double graded_defect = 0.0;
    double residual = 0.0;
};

inline SideData canonical_side(const MpsTuple& v, std::uint64_t seed = 0, double tol = 1e-8)
{
    Mat k0 = minimal_invariant_subspace(v, std::nullopt, seed);
    InvariantChain ch = corner_rescale(build_chain(v, k0, seed));
    ch = align_to_primitive(ch, ch.rescaled.front());
    GradedTuple gt = graded_form(v, ch);
    double gd = condition5_defect(gt);
    require(gd <= 1e-8 * std::max(1.0, v[0].norm()), ErrorKind::ConditionViolated, "graded tuple violates Condition 5: " + num(gd));
    Septuplet s = reduce_fully(make_septuplet(gt), tol);
    Structure st = extract_structure(s, tol);
    Reordered ro = weyl_reorder(st.lambda, st.D, st.Y);
    require(ro.triangular, ErrorKind::StructureViolation, "reordering broke triangularity");
    SideData out;
    out.n0 = st.n0;
    out.k = st.k;
    out.omega = st.omega;
    out.lambda = ro.lambda;
    out.D = ro.D;
    out.Y = ro.Y;
    out.l0 = st.l0;
    out.graded_defect = gd;
    out.residual = st.residual;
    out.x.assign(static_cast<size_t>(v.n()), {});
    for (int mu = 0; mu < v.n(); ++mu)
        for (int p = 1; p <= st.k; ++p)
            out.x[static_cast<size_t>(mu)].push_back(st.x[static_cast<size_t>(mu)][static_cast<size_t>(ro.order[static_cast<size_t>(p)] - 1)]);
    return out;
}

// smallest B-invariant subspace containing the range of the fixed point of X -> sum B X B*
inline Mat edge_subspace(const MpsTuple& b, double tol = 1e-9)
{
    const int d = b.D();
    EigenData ed = general_eig(transfer_matrix(b, Direction::R));
    double r = ed.eigenvalues.cwiseAbs().maxCoeff();
    Mat x = detail::hermitian_from_eigvec(ed.eigenvectors.col(detail::closest_index(ed.eigenvalues, r)), d);
    EigenData he = hermitian_eig(x, 1e-8);
    RVec w = he.eigenvalues.real().cwiseAbs();
    std::vector<Vec> cols;
    for (Eigen::Index i = 0; i < d; ++i)
        if (w(i) > 1e-8 * w.maxCoeff()) cols.push_back(he.eigenvectors.col(i));
    Span s = orthonormal_span(cols, tol);
    return detail::krylov_closure(b.matrices(), s.basis, tol);
}

struct CanonicalResult {
    ClassAData data;
    SideData right;
    SideData left;
    Mat M;  // omega_R = c M^{-1} omega_Lᵀ M
    cplx c = 1.0;
    double match_residual = 0.0;
};

inline CanonicalResult canonicalize(const MpsTuple& b_in, std::uint64_t seed = 0, double tol = 1e-8)
{
    double r = peripheral_structure(b_in).radius;
    require(r > 1e-14, ErrorKind::CornerZero, "transfer map is nilpotent");
    MpsTuple b = b_in.scaled(1.0 / std::sqrt(r));
    MpsTuple bt = b.transpose();
    CanonicalResult out;
    out.right = canonical_side(b.compress(edge_subspace(b)), seed, tol);
    out.left = canonical_side(bt.compress(edge_subspace(bt)), seed, tol);
    const SideData& R = out.right;
    const SideData& L = out.left;
    require(R.n0 == L.n0, ErrorKind::DecompositionFail, "left and right bulk dimensions differ");
    const int n0 = R.n0;

    TransferSpectrum ls = peripheral_structure(L.omega);
    auto m = find_antiunitary_match(L.omega, R.omega, ls.rho, tol);
    require(m.has_value(), ErrorKind::DecompositionFail, "left and right bulk tuples do not match");
    Mat big_m = m->W.conjugate() * m->weights.cwiseSqrt().cast<cplx>().asDiagonal() * m->U;
    Mat big_m_inv = big_m.inverse();
    double res = 0.0;
    for (int mu = 0; mu < b.n(); ++mu)
        res = std::max(res, (R.omega[mu] - m->c * big_m_inv * L.omega[mu].transpose() * big_m).norm());
    require(res <= 1e-7, ErrorKind::DecompositionFail, "antiunitary match residual " + num(res));
    out.M = big_m;
    out.c = m->c;
    out.match_residual = res;

    ClassAData d;
    d.n = b.n();
    d.n0 = n0;
    d.kR = R.k;
    d.kL = L.k;
    const int K = d.K();
    d.lambda.assign(static_cast<size_t>(K), 1.0);
    for (int a = 1; a <= R.k; ++a) d.lambda[static_cast<size_t>(d.pos(-a))] = R.lambda[static_cast<size_t>(a)];
    for (int c = 1; c <= L.k; ++c) d.lambda[static_cast<size_t>(d.pos(c))] = L.lambda[static_cast<size_t>(c)];
    for (const auto& x : R.D) d.D.push_back(embed_right(x, d.kR, d.kL));
    for (const auto& x : L.D) d.G.push_back(embed_left(x.transpose(), d.kR, d.kL));
    d.Y = embed_right(R.Y, d.kR, d.kL) + embed_left(L.Y.transpose(), d.kR, d.kL);
    d.omega = R.omega;
    d.xR = R.x;
    d.xL.assign(static_cast<size_t>(d.n), {});
    for (int mu = 0; mu < d.n; ++mu)
        for (const auto& x : L.x[static_cast<size_t>(mu)])
            d.xL[static_cast<size_t>(mu)].push_back(out.c * big_m_inv * x.transpose() * big_m);
    d.l0 = std::max(R.l0, L.l0);
    out.data = assemble_classa(d, 1e-8);
    return out;
}

} // namespace mpsedge
