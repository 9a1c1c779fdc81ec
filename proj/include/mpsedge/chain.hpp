#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpmap.hpp"

namespace mpsedge {

inline constexpr double default_chain_tol = 1e-9;

namespace detail {

// smallest subspace containing the columns of x and invariant under every a_mu
inline Mat krylov_closure(const std::vector<Mat>& a, const Mat& x, double tol)
{
    Span s = orthonormal_span(x, tol);
    for (;;) {
        const Eigen::Index r = s.rank;
        Mat cols(s.basis.rows(), r * static_cast<Eigen::Index>(a.size() + 1));
        cols.leftCols(r) = s.basis;
        for (size_t mu = 0; mu < a.size(); ++mu)
            cols.middleCols(r * static_cast<Eigen::Index>(mu + 1), r) = a[mu] * s.basis;
        Span next = orthonormal_span(cols, tol);
        if (next.rank == r) return s.basis;
        s = next;
    }
}

inline bool same_subspace(const Mat& a, const Mat& b)
{
    if (a.cols() != b.cols()) return false;
    return (a * a.adjoint() - b * b.adjoint()).norm() < 1e-7;
}

// lexicographic comparison of per-axis overlaps, larger first
inline bool overlap_greater(const Mat& a, const Mat& b)
{
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double oa = a.row(i).squaredNorm();
        double ob = b.row(i).squaredNorm();
        if (oa > ob + 1e-9) return true;
        if (ob > oa + 1e-9) return false;
    }
    return false;
}

// Newton polish of an approximately common invariant subspace: solve the stacked
// Sylvester equations A22 X - X A11 = -A21 in least squares and rotate q by X
inline Mat refine_invariant(const std::vector<Mat>& a, Mat q, int steps = 4)
{
    const Eigen::Index d = q.rows(), m = q.cols();
    if (m == 0 || m == d) return q;
    for (int it = 0; it < steps; ++it) {
        Mat qc = orthogonal_complement(q, d);
        const Eigen::Index c = qc.cols();
        Mat sys = Mat::Zero(static_cast<Eigen::Index>(a.size()) * c * m, c * m);
        Vec rhs(sys.rows());
        double defect = 0.0;
        for (size_t mu = 0; mu < a.size(); ++mu) {
            Mat a11 = q.adjoint() * a[mu] * q;
            Mat a21 = qc.adjoint() * a[mu] * q;
            Mat a22 = qc.adjoint() * a[mu] * qc;
            defect = std::max(defect, a21.norm());
            const Eigen::Index off = static_cast<Eigen::Index>(mu) * c * m;
            // row-major vec: vec(A22 X - X A11) = (A22 ⊗ 1 - 1 ⊗ A11ᵀ) vec(X)
            sys.middleRows(off, c * m) = kron(a22, identity(m)) - kron(identity(c), a11.transpose());
            rhs.segment(off, c * m) = -vec(a21);
        }
        if (defect < 1e-15) break;
        Vec x = sys.completeOrthogonalDecomposition().solve(rhs);
        Mat next = q + qc * unvec(x, c, m);
        Eigen::HouseholderQR<Mat> qr(next);
        Mat cand = qr.householderQ() * Mat::Identity(d, m);
        double after = 0.0;
        Mat cc = orthogonal_complement(cand, d);
        for (const auto& am : a) after = std::max(after, (cc.adjoint() * am * cand).norm());
        if (after >= defect) break;
        q = cand;
    }
    return q;
}

// q: orthonormal basis of a subspace invariant under all a_mu; returns its minimal invariant subspaces of least dimension
inline std::vector<Mat> minimal_search(const std::vector<Mat>& a, const Mat& q, std::mt19937_64& rng, double tol)
{
    const Eigen::Index d = q.cols();
    if (d == 1) return {q};
    std::vector<Mat> comp;
    for (const auto& m : a) comp.push_back(q.adjoint() * m * q);
    Mat mix = Mat::Zero(d, d);
    for (const auto& m : comp) mix += random_normal_c(rng) * m;
    Eigen::ComplexEigenSolver<Mat> es(mix, true);
    std::vector<Mat> closures;
    Eigen::Index best = d;
    for (Eigen::Index j = 0; j < d; ++j) {
        Mat c = krylov_closure(comp, es.eigenvectors().col(j), tol);
        if (c.cols() >= d) continue;
        Mat full = q * c;
        bool dup = false;
        for (const auto& o : closures) dup = dup || same_subspace(o, full);
        if (dup) continue;
        best = std::min(best, c.cols());
        closures.push_back(full);
    }
    if (closures.empty()) return {q};
    std::vector<Mat> found;
    for (const auto& c : closures) {
        if (c.cols() != best) continue;
        for (auto& m : minimal_search(a, c, rng, tol)) {
            bool dup = false;
            for (const auto& o : found) dup = dup || same_subspace(o, m);
            if (!dup) found.push_back(m);
        }
    }
    Eigen::Index least = found.front().cols();
    for (const auto& m : found) least = std::min(least, m.cols());
    std::vector<Mat> out;
    for (auto& m : found)
        if (m.cols() == least) out.push_back(m);
    return out;
}

} // namespace detail

// minimal {v_mu*}-invariant subspace inside `within` (orthonormal columns, itself invariant)
inline Mat minimal_invariant_subspace(const MpsTuple& v, const std::optional<Mat>& within = std::nullopt, std::uint64_t seed = 0,
                                      double tol = default_chain_tol)
{
    const int d = v.D();
    Mat q = within ? *within : identity(d);
    require(q.rows() == d && q.cols() >= 1, ErrorKind::DimensionMismatch, "within must be a D x m basis");
    std::vector<Mat> adj;
    for (int mu = 0; mu < v.n(); ++mu) adj.push_back(v[mu].adjoint());
    std::mt19937_64 rng(seed);
    auto cands = detail::minimal_search(adj, q, rng, tol);
    Mat best = cands.front();
    for (const auto& c : cands)
        if (detail::overlap_greater(c, best)) best = c;
    std::vector<Mat> comp;
    for (const auto& m : adj) comp.push_back(q.adjoint() * m * q);
    return q * detail::refine_invariant(comp, q.adjoint() * best);
}

struct InvariantChain {
    int k = 0;
    int D = 0;
    std::vector<Mat> levels;   // orthonormal basis of Ran r_a, a = 0..k
    std::vector<MpsTuple> corners;  // r_a v r_a in level coordinates
    std::vector<double> radii;
    std::vector<Mat> perron;
    std::vector<MpsTuple> rescaled;  // u_a
    std::vector<cplx> phases;        // c_a
    std::vector<Mat> align;          // V_a
    bool rescaled_ok = false;
    bool aligned_ok = false;

    Mat basis_upto(int a) const
    {
        Eigen::Index cols = 0;
        for (int b = 0; b <= a; ++b) cols += levels[static_cast<size_t>(b)].cols();
        Mat out(D, cols);
        Eigen::Index off = 0;
        for (int b = 0; b <= a; ++b) {
            out.middleCols(off, levels[static_cast<size_t>(b)].cols()) = levels[static_cast<size_t>(b)];
            off += levels[static_cast<size_t>(b)].cols();
        }
        return out;
    }

    Mat projection(int a) const
    {
        Mat q = basis_upto(a);
        return q * q.adjoint();
    }

    Mat level_projection(int a) const { return levels[static_cast<size_t>(a)] * levels[static_cast<size_t>(a)].adjoint(); }
};

inline InvariantChain build_chain(const MpsTuple& v, const Mat& k0, std::uint64_t seed = 0, double tol = default_chain_tol)
{
    const int d = v.D();
    require(k0.rows() == d && k0.cols() >= 1, ErrorKind::DimensionMismatch, "K0 must be a D x m basis");
    InvariantChain ch;
    ch.D = d;
    ch.levels.push_back(k0);
    Eigen::Index have = k0.cols();
    std::uint64_t s = seed;
    while (have < d) {
        Mat p = ch.basis_upto(static_cast<int>(ch.levels.size()) - 1);
        Mat c = orthogonal_complement(p, d);
        MpsTuple quotient = v.compress(c);
        Mat w = minimal_invariant_subspace(quotient, std::nullopt, ++s, tol);
        ch.levels.push_back(c * w);
        have += w.cols();
    }
    ch.k = static_cast<int>(ch.levels.size()) - 1;
    for (const auto& q : ch.levels) ch.corners.push_back(v.compress(q));
    return ch;
}

inline double invariance_defect(const MpsTuple& v, const Mat& q)
{
    Mat p = q * q.adjoint();
    Mat one = identity(v.D());
    double worst = 0.0;
    for (int mu = 0; mu < v.n(); ++mu) worst = std::max(worst, ((one - p) * v[mu].adjoint() * p).norm());
    return worst;
}

inline InvariantChain corner_rescale(InvariantChain ch)
{
    ch.radii.clear();
    ch.perron.clear();
    ch.rescaled.clear();
    for (int a = 0; a <= ch.k; ++a) {
        const MpsTuple& w = ch.corners[static_cast<size_t>(a)];
        double norm = 0.0;
        for (int mu = 0; mu < w.n(); ++mu) norm = std::max(norm, w[mu].norm());
        require(norm > 1e-12, ErrorKind::CornerZero, "corner at level " + num(a) + " vanishes");
        TransferSpectrum ts = peripheral_structure(w);
        require(ts.radius > 1e-14, ErrorKind::CornerZero, "corner transfer map at level " + num(a) + " is nilpotent");
        if (a >= 1)
            require(ts.radius < 1.0 - 1e-10, ErrorKind::ContractionFail,
                    "corner radius " + num(ts.radius) + " at level " + num(a));
        require(ts.irreducible, ErrorKind::NotIrreducible, "corner at level " + num(a) + " is not irreducible");
        ch.radii.push_back(ts.radius);
        ch.perron.push_back(ts.perron);
        ch.rescaled.push_back(unital_gauge(w, ts.radius, ts.perron));
    }
    ch.rescaled_ok = true;
    return ch;
}

inline InvariantChain align_to_primitive(InvariantChain ch, const MpsTuple& base)
{
    require(ch.rescaled_ok, ErrorKind::InvalidArgument, "corners must be rescaled first");
    require(peripheral_structure(base).primitive, ErrorKind::NotPrimitive, "base tuple is not primitive");
    ch.phases.clear();
    ch.align.clear();
    for (int a = 0; a <= ch.k; ++a) {
        const MpsTuple& u = ch.rescaled[static_cast<size_t>(a)];
        require(peripheral_structure(u).primitive, ErrorKind::NotPrimitive, "level " + num(a) + " is not primitive");
        if (a == 0 && u == base) {
            ch.phases.push_back(1.0);
            ch.align.push_back(identity(base.D()));
            continue;
        }
        auto it = find_intertwiner(base, u);
        require(it.has_value(), ErrorKind::ConditionViolated, "level " + num(a) + " is not equivalent to the base tuple");
        // U base = c u U  =>  u = conj(c) U base U*
        ch.phases.push_back(std::conj(it->c));
        ch.align.push_back(it->U);
    }
    ch.aligned_ok = true;
    return ch;
}

inline std::vector<cplx> chain_lambdas(const InvariantChain& ch)
{
    std::vector<cplx> out;
    for (int a = 0; a <= ch.k; ++a) out.push_back(std::sqrt(ch.radii[static_cast<size_t>(a)]) * ch.phases[static_cast<size_t>(a)]);
    return out;
}

} // namespace mpsedge
