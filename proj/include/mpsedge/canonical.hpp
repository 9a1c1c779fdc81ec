#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "chain.hpp"

namespace mpsedge {

// Layout of Mat_{n0} ⊗ Mat_{k+1}: index alpha*(k+1) + a, the n0 factor is the slow one.
struct Grading {
    int n0 = 1;
    int K = 1;  // k + 1

    int dim() const { return n0 * K; }
    int idx(int alpha, int a) const { return alpha * K + a; }

    Mat block(const Mat& m, int a, int b) const
    {
        Mat out(n0, n0);
        for (int al = 0; al < n0; ++al)
            for (int be = 0; be < n0; ++be) out(al, be) = m(idx(al, a), idx(be, b));
        return out;
    }

    void set_block(Mat& m, int a, int b, const Mat& x) const
    {
        for (int al = 0; al < n0; ++al)
            for (int be = 0; be < n0; ++be) m(idx(al, a), idx(be, b)) = x(al, be);
    }

    // (chi_alpha* ⊗ 1) m (chi_beta ⊗ 1)
    Mat grade_part(const Mat& m, int alpha, int beta) const { return m.block(alpha * K, beta * K, K, K); }

    Mat e(int alpha, int beta, const Mat& x) const { return kron(unit(n0, alpha, beta), x); }

    Mat level_zero() const { return kron(identity(n0), unit(K, 0, 0)); }
};

inline Mat lambda_diag(const std::vector<cplx>& lam)
{
    Vec d(static_cast<Eigen::Index>(lam.size()));
    for (size_t i = 0; i < lam.size(); ++i) d(static_cast<Eigen::Index>(i)) = lam[i];
    return d.asDiagonal();
}

inline Mat mat_pow(const Mat& a, int l)
{
    Mat out = identity(a.rows());
    for (int i = 0; i < l; ++i) out = out * a;
    return out;
}

// ---------------------------------------------------------------- graded gauge

struct GradedTuple {
    int n0 = 1;
    int k = 0;
    MpsTuple omega;
    MpsTuple v;
    std::vector<cplx> lambda;
    std::vector<Mat> h_sqrt;  // h_a^{1/2}, h_0 = 1
    Mat W;                    // v = W v_in W^{-1}
    Mat W_inv;
};

inline GradedTuple graded_form(const MpsTuple& v_in, const InvariantChain& ch)
{
    require(ch.aligned_ok, ErrorKind::InvalidArgument, "chain must be rescaled and aligned");
    const int n0 = static_cast<int>(ch.levels.front().cols());
    for (const auto& q : ch.levels)
        require(q.cols() == n0, ErrorKind::StructureViolation, "chain levels have unequal rank");
    const int K = ch.k + 1;
    Grading g{n0, K};
    Mat w(g.dim(), v_in.D());
    GradedTuple out;
    out.n0 = n0;
    out.k = ch.k;
    // u_0 = c_0 V_0 base V_0*
    out.omega = ch.rescaled.front().similarity(ch.align.front().adjoint(), ch.align.front()).scaled(std::conj(ch.phases.front()));
    out.lambda = chain_lambdas(ch);
    for (int a = 0; a < K; ++a) {
        PsdRoots rt = psd_roots(ch.perron[static_cast<size_t>(a)]);
        const Mat& va = ch.align[static_cast<size_t>(a)];
        Mat rows = va.adjoint() * rt.inv_sqrt * ch.levels[static_cast<size_t>(a)].adjoint();
        for (int al = 0; al < n0; ++al) w.row(g.idx(al, a)) = rows.row(al);
        out.h_sqrt.push_back(a == 0 ? identity(n0) : Mat(va.adjoint() * rt.inv_sqrt * va));
    }
    out.W = w;
    out.W_inv = w.inverse();
    out.v = v_in.similarity(out.W, out.W_inv);
    return out;
}

// max violation of block lower-triangularity and of the diagonal blocks lambda_a omega
inline double condition5_defect(const GradedTuple& gt)
{
    Grading g{gt.n0, gt.k + 1};
    double worst = 0.0;
    for (int mu = 0; mu < gt.v.n(); ++mu)
        for (int a = 0; a < g.K; ++a)
            for (int b = 0; b < g.K; ++b) {
                Mat blk = g.block(gt.v[mu], a, b);
                if (b > a) worst = std::max(worst, blk.norm());
                if (a == b) worst = std::max(worst, (blk - gt.lambda[static_cast<size_t>(a)] * gt.omega[mu]).norm());
            }
    return worst;
}

// ---------------------------------------------------------------- dual basis

using YFamily = std::vector<Mat>;  // index (a*n0 + alpha)*n0 + beta

inline size_t yidx(int n0, int a, int alpha, int beta)
{
    return static_cast<size_t>((a * n0 + alpha) * n0 + beta);
}

// y with y (1⊗E00) = h_a^{1/2} e_{alpha beta} ⊗ E_{a0}, y in K_l(v)
inline YFamily dual_basis(const MpsTuple& v, int n0, int k, const std::vector<Mat>& h_sqrt, int l, double tol = default_rank_tol)
{
    Grading g{n0, k + 1};
    const int d = g.dim();
    require(v.D() == d, ErrorKind::DimensionMismatch, "tuple dimension does not match the grading");
    KernelSpaceBasis ks = kernel_space(v, l, tol);
    Mat p0 = g.level_zero();
    Mat img(d * d, ks.dim);
    for (int i = 0; i < ks.dim; ++i) img.col(i) = vec(ks.element(i, d) * p0);
    Span s = orthonormal_span(img, tol);
    require(ks.dim == d * n0 && s.rank == ks.dim, ErrorKind::NotInjective,
            "l = " + num(l) + ": dim K_l = " + num(ks.dim) + ", rank of restriction = " + num(s.rank) +
                ", need " + num(d * n0));
    Eigen::ColPivHouseholderQR<Mat> qr(img);
    YFamily out(static_cast<size_t>(g.K * n0 * n0));
    for (int a = 0; a < g.K; ++a)
        for (int al = 0; al < n0; ++al)
            for (int be = 0; be < n0; ++be) {
                Mat hs = h_sqrt.empty() ? identity(n0) : h_sqrt[static_cast<size_t>(a)];
                Mat target = kron(hs * unit(n0, al, be), unit(g.K, a, 0));
                Vec c = qr.solve(vec(target));
                require((img * c - vec(target)).norm() <= 1e-8 * std::max(1.0, target.norm()), ErrorKind::NotInjective,
                        "dual system is not solvable");
                Mat y = Mat::Zero(d, d);
                for (int i = 0; i < ks.dim; ++i) y += c(i) * ks.element(i, d);
                out[yidx(n0, a, al, be)] = y;
            }
    return out;
}

// smallest l at which the restriction K_l -> B(K)(1⊗E00) is a bijection
inline int measure_l0(const MpsTuple& v, int n0, int k, int l_max = 64, double tol = default_rank_tol)
{
    Grading g{n0, k + 1};
    const int d = g.dim();
    Mat p0 = g.level_zero();
    for (int l = 1; l <= l_max; ++l) {
        KernelSpaceBasis ks = kernel_space(v, l, tol);
        if (ks.dim != d * n0) continue;
        Mat img(d * d, ks.dim);
        for (int i = 0; i < ks.dim; ++i) img.col(i) = vec(ks.element(i, d) * p0);
        if (orthonormal_span(img, tol).rank == ks.dim) return l;
    }
    fail(ErrorKind::NotInjective, "restriction never becomes injective up to l = " + num(l_max));
}

// ---------------------------------------------------------------- septuplet

struct Septuplet {
    int n0 = 1;
    int k = 0;
    MpsTuple omega;
    MpsTuple v;
    std::vector<cplx> lambda;
    int l0 = 1;
    int l_max = 1;
    std::map<int, YFamily> y;
    std::vector<Mat> h_sqrt;
    Mat Y;        // (k+1) x (k+1), accumulated ladder part
    Mat R_total;  // v = R_total v_graded R_total^{-1}

    Grading grading() const { return {n0, k + 1}; }
    Mat lambda_tilde() const { return lambda_diag(lambda) * (identity(k + 1) + Y); }
};

// values closer than this are treated as one eigenvalue of the ladder
inline constexpr double lambda_merge_tol = 1e-6;
// floor for the relation checks inside a reduction: the x family carries lambda^{-l}
inline constexpr double relation_check_tol = 1e-6;

// snap numerically equal lambdas to a common value
inline std::vector<cplx> merge_lambdas(std::vector<cplx> lam)
{
    for (size_t a = 0; a < lam.size(); ++a)
        for (size_t b = 0; b < a; ++b)
            if (std::abs(lam[a] - lam[b]) <= lambda_merge_tol) {
                lam[a] = lam[b];
                break;
            }
    return lam;
}

inline Septuplet make_septuplet(const GradedTuple& gt, double tol = default_rank_tol)
{
    Septuplet s;
    s.n0 = gt.n0;
    s.k = gt.k;
    s.omega = gt.omega;
    s.v = gt.v;
    s.lambda = merge_lambdas(gt.lambda);
    s.h_sqrt = gt.h_sqrt;
    s.l0 = measure_l0(gt.v, gt.n0, gt.k, 64, tol);
    s.l_max = 2 * s.l0 + gt.k + 2;
    for (int l = s.l0; l <= s.l_max; ++l) s.y[l] = dual_basis(gt.v, gt.n0, gt.k, gt.h_sqrt, l, tol);
    s.Y = Mat::Zero(gt.k + 1, gt.k + 1);
    s.R_total = identity(gt.n0 * (gt.k + 1));
    return s;
}

// Condition 5 (iv)(2): y_{a,al,b1}^{(l1)} y_{0,a2,b2}^{(l2)} = delta y_{a,al,b2}^{(l1+l2)}
inline double product_law_defect(const Septuplet& s)
{
    double worst = 0.0;
    const int n0 = s.n0;
    for (const auto& [l1, f1] : s.y)
        for (const auto& [l2, f2] : s.y) {
            auto it = s.y.find(l1 + l2);
            if (it == s.y.end()) continue;
            for (int a = 0; a <= s.k; ++a)
                for (int al = 0; al < n0; ++al)
                    for (int b1 = 0; b1 < n0; ++b1)
                        for (int a2 = 0; a2 < n0; ++a2)
                            for (int b2 = 0; b2 < n0; ++b2) {
                                Mat lhs = f1[yidx(n0, a, al, b1)] * f2[yidx(n0, 0, a2, b2)];
                                Mat rhs = b1 == a2 ? it->second[yidx(n0, a, al, b2)] : Mat::Zero(lhs.rows(), lhs.cols());
                                worst = std::max(worst, (lhs - rhs).norm());
                            }
        }
    return worst;
}

// Condition 6-i clause (iii): y_0 - e ⊗ Λ^l(1+Y)^l lives in the blocks with a - a' >= i + 1
inline double condition6_defect(const Septuplet& s, int i)
{
    Grading g = s.grading();
    Mat lt = s.lambda_tilde();
    double worst = 0.0;
    for (const auto& [l, fam] : s.y) {
        Mat lp = mat_pow(lt, l);
        for (int al = 0; al < s.n0; ++al)
            for (int be = 0; be < s.n0; ++be) {
                Mat diff = fam[yidx(s.n0, 0, al, be)] - g.e(al, be, lp);
                for (int a = 0; a < g.K; ++a)
                    for (int b = 0; b < g.K; ++b)
                        if (a - b < i + 1) worst = std::max(worst, g.block(diff, a, b).norm());
            }
    }
    return worst;
}

// ---------------------------------------------------------------- key solver

struct KeySolution {
    Mat J;
    cplx c = 0.0;
    double residual = 0.0;
};

using XFamily = std::map<int, std::vector<Mat>>;  // l -> x_{alpha beta} at index alpha*n0 + beta

inline double cocycle_defect(const XFamily& x, cplx lambda, int n0)
{
    double worst = 0.0;
    for (const auto& [l1, f1] : x)
        for (const auto& [l2, f2] : x) {
            auto it = x.find(l1 + l2);
            if (it == x.end()) continue;
            cplx w = std::pow(lambda, -l1);
            for (int a1 = 0; a1 < n0; ++a1)
                for (int b1 = 0; b1 < n0; ++b1)
                    for (int a2 = 0; a2 < n0; ++a2)
                        for (int b2 = 0; b2 < n0; ++b2) {
                            Mat lhs = f1[static_cast<size_t>(a1 * n0 + b1)] * unit(n0, a2, b2) +
                                      w * unit(n0, a1, b1) * f2[static_cast<size_t>(a2 * n0 + b2)];
                            Mat rhs = b1 == a2 ? it->second[static_cast<size_t>(a1 * n0 + b2)] : Mat::Zero(n0, n0);
                            worst = std::max(worst, (lhs - rhs).norm());
                        }
        }
    return worst;
}

inline Mat key_representation(const Mat& j, cplx c, cplx lambda, int l, int alpha, int beta, int n0)
{
    Mat e = unit(n0, alpha, beta);
    Mat out = j * e - std::pow(lambda, -l) * e * j;
    if (c != 0.0) out += c * static_cast<double>(l) * e;
    return out;
}

inline bool is_one(cplx z) { return std::abs(z - 1.0) <= 1e-12; }

inline KeySolution key_solve(const XFamily& x, cplx lambda, int l0, double tol = 1e-8)
{
    require(!x.empty() && x.count(l0), ErrorKind::InvalidArgument, "x family must contain l0");
    const int n0 = static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.at(l0).size()))));
    double scale = 1.0;
    for (const auto& [l, f] : x)
        for (const auto& m : f) scale = std::max(scale, m.norm());
    double oi = cocycle_defect(x, lambda, n0);
    require(oi <= tol * scale, ErrorKind::Inconsistent, "cocycle relation violated by " + num(oi) + " (scale " + num(scale) + ")");
    auto xa = [&](int l, int a, int b) -> const Mat& { return x.at(l)[static_cast<size_t>(a * n0 + b)]; };

    // J~ = sum_b e_bb F_b (1 - e_bb), F_b = sum_{a != b} x_aa^{(l0)}
    Mat jt = Mat::Zero(n0, n0);
    for (int b = 0; b < n0; ++b) {
        Mat f = Mat::Zero(n0, n0);
        for (int a = 0; a < n0; ++a)
            if (a != b) f += xa(l0, a, a);
        Mat ebb = unit(n0, b, b);
        jt += ebb * f * (identity(n0) - ebb);
    }
    KeySolution sol;
    if (!is_one(lambda)) {
        int lp = -1;
        for (const auto& [l, f] : x)
            if (l >= l0 && std::abs(std::pow(lambda, l) - 1.0) > 1e-12) {
                lp = l;
                break;
            }
        require(lp >= 0, ErrorKind::Inconsistent, "no length with lambda^l != 1 in the window");
        auto cab = [&](int l, int a, int b) { return xa(l, a, b)(a, b); };
        cplx li = std::pow(lambda, -lp);
        cplx d = li * cab(lp, 0, 0) / (1.0 - li);
        sol.J = jt;
        for (int a = 0; a < n0; ++a) sol.J(a, a) += cab(lp, a, 0) + d;
        sol.c = 0.0;
    } else {
        require(x.count(l0 + 1), ErrorKind::InvalidArgument, "lambda = 1 needs x at l0 + 1");
        auto cab = [&](int l, int a, int b) { return xa(l, a, b)(a, b); };
        sol.c = cab(l0 + 1, 0, 0) - cab(l0, 0, 0);
        sol.J = jt;
        for (int a = 0; a < n0; ++a) sol.J(a, a) += cab(l0, a, 0);
        // J and J + z·1 give the same family; keep J traceless
        sol.J -= (sol.J.trace() / static_cast<double>(n0)) * identity(n0);
    }
    double res = 0.0;
    for (const auto& [l, f] : x)
        for (int a = 0; a < n0; ++a)
            for (int b = 0; b < n0; ++b)
                res = std::max(res, (key_representation(sol.J, sol.c, lambda, l, a, b, n0) - xa(l, a, b)).norm());
    sol.residual = res;
    require(res <= tol * scale, ErrorKind::Inconsistent, "representation residual " + num(res));
    return sol;
}

// ---------------------------------------------------------------- reduction

struct ReductionResult {
    Mat R;
    Mat Y_prime;
    std::vector<Mat> J;  // J_j for j = i+1..k
    std::vector<cplx> c;
    Septuplet next;
};

inline bool same_lambda(cplx a, cplx b) { return std::abs(a - b) <= lambda_merge_tol; }

inline ReductionResult reduction_step(const Septuplet& s, int i, double tol = 1e-8)
{
    require(i >= 0 && i < s.k, ErrorKind::InvalidArgument, "reduction level out of range");
    Grading g = s.grading();
    const int n0 = s.n0;
    double pre = condition6_defect(s, i);
    double scale = 1.0;
    for (const auto& [l, fam] : s.y)
        for (const auto& m : fam) scale = std::max(scale, m.norm());
    require(pre <= std::max(tol, relation_check_tol) * scale, ErrorKind::ConditionViolated, "Condition 6-" + num(i) + " (iii) defect " + num(pre));

    Mat lt = s.lambda_tilde();
    std::map<int, Mat> diffs;
    ReductionResult out;
    Mat jhat = Mat::Zero(g.dim(), g.dim());
    out.Y_prime = Mat::Zero(g.K, g.K);
    for (int j = i + 1; j <= s.k; ++j) {
        const int jp = j - (i + 1);
        const cplx lj = s.lambda[static_cast<size_t>(j)];
        const cplx ljp = s.lambda[static_cast<size_t>(jp)];
        XFamily xt;
        for (const auto& [l, fam] : s.y) {
            Mat lp = mat_pow(lt, l);
            std::vector<Mat> row(static_cast<size_t>(n0 * n0));
            for (int al = 0; al < n0; ++al)
                for (int be = 0; be < n0; ++be) {
                    Mat diff = fam[yidx(n0, 0, al, be)] - g.e(al, be, lp);
                    row[static_cast<size_t>(al * n0 + be)] = std::pow(ljp, -l) * g.block(diff, j, jp);
                }
            xt[l] = std::move(row);
        }
        KeySolution ks = key_solve(xt, ljp / lj, s.l0, std::max(tol, relation_check_tol));
        Mat jj = ks.J;
        if (j == i + 1) jj.setZero();  // forced by y_0 (1⊗E00) = (1⊗E00) y_0 (1⊗E00)
        out.J.push_back(jj);
        out.c.push_back(ks.c);
        g.set_block(jhat, j, jp, jj);
        if (same_lambda(lj, ljp)) out.Y_prime(j, jp) = ks.c;
    }
    out.R = identity(g.dim()) - jhat;
    Mat r_inv = identity(g.dim());
    Mat pw = identity(g.dim());
    for (int p = 0; p < s.k; ++p) {
        pw = pw * jhat;
        r_inv += pw;
    }
    Septuplet n = s;
    n.v = s.v.similarity(out.R, r_inv);
    for (auto& [l, fam] : n.y)
        for (auto& m : fam) m = out.R * m * r_inv;
    n.Y = s.Y + out.Y_prime;
    n.R_total = out.R * s.R_total;
    double post = condition6_defect(n, i + 1);
    require(post <= std::max(tol, relation_check_tol) * scale, ErrorKind::ConditionViolated,
            "Condition 6-" + num(i + 1) + " (iii) defect " + num(post) + " after reduction");
    out.next = std::move(n);
    return out;
}

// ---------------------------------------------------------------- structure extraction

struct Structure {
    int n0 = 1;
    int k = 0;
    MpsTuple omega;
    std::vector<cplx> lambda;
    Mat Y;
    std::vector<Mat> D;                   // D_a, a = 1..k, stored at index a-1
    std::vector<std::vector<Mat>> x;      // x[mu][a-1]
    std::vector<Mat> h_sqrt;
    Mat R_total;
    MpsTuple v;                           // tuple in the final gauge
    int l0 = 1;
    double residual = 0.0;
};

inline Septuplet reduce_fully(Septuplet s, double tol = 1e-8)
{
    for (int i = 0; i < s.k; ++i) s = reduction_step(s, i, tol).next;
    return s;
}

inline Structure extract_structure(const Septuplet& s, double tol = 1e-8)
{
    Grading g = s.grading();
    const int n0 = s.n0;
    double c6 = condition6_defect(s, s.k);
    require(c6 <= 10 * tol * std::max(1.0, s.v[0].norm()), ErrorKind::ConditionViolated, "Condition 6-k does not hold");
    Structure st;
    st.n0 = n0;
    st.k = s.k;
    st.omega = s.omega;
    st.lambda = s.lambda;
    st.Y = s.Y;
    st.h_sqrt = s.h_sqrt;
    st.R_total = s.R_total;
    st.v = s.v;
    st.l0 = s.l0;
    Mat lt = s.lambda_tilde();
    Mat lt_inv = lt.inverse();
    std::vector<Mat> ones(static_cast<size_t>(g.K), identity(n0));
    double worst = 0.0;
    // D_a from the shortest length (least amplification by Λ~^{-l}), every length checked directly
    for (int l = s.l0; l <= s.l_max; ++l) {
        YFamily yh = dual_basis(s.v, n0, s.k, ones, l);
        Mat lp = mat_pow(lt, l);
        if (l == s.l0) {
            Mat lp_inv = mat_pow(lt_inv, l);
            for (int a = 1; a < g.K; ++a) st.D.push_back(g.grade_part(yh[yidx(n0, a, 0, 0)], 0, 0) * lp_inv);
        }
        for (int a = 0; a < g.K; ++a) {
            const Mat dref = a == 0 ? identity(g.K) : st.D[static_cast<size_t>(a - 1)];
            for (int al = 0; al < n0; ++al)
                for (int be = 0; be < n0; ++be) {
                    const Mat& y = yh[yidx(n0, a, al, be)];
                    worst = std::max(worst, (y - g.e(al, be, dref * lp)).norm() / std::max(1.0, y.norm()));
                }
        }
    }
    require(worst <= 10 * tol, ErrorKind::DecompositionFail, "hat-y family is not of the form e ⊗ D_a Λ~^l: " + num(worst));
    Mat lam = lambda_diag(s.lambda);
    for (int a = 1; a < g.K; ++a) {
        const Mat& da = st.D[static_cast<size_t>(a - 1)];
        worst = std::max(worst, (lam * da - s.lambda[static_cast<size_t>(a)] * da * lam).norm());
        worst = std::max(worst, (da * unit(g.K, 0, 0) - unit(g.K, a, 0)).norm());
        worst = std::max(worst, Mat(da.triangularView<Eigen::Upper>()).norm());
    }
    st.x.assign(static_cast<size_t>(s.v.n()), {});
    double dec = 0.0;
    for (int mu = 0; mu < s.v.n(); ++mu) {
        Mat rebuilt = kron(s.omega[mu], lt);
        dec = std::max(dec, (g.block(s.v[mu], 0, 0) - s.omega[mu]).norm());
        for (int a = 1; a < g.K; ++a) {
            Mat xa = g.block(s.v[mu], a, 0);
            st.x[static_cast<size_t>(mu)].push_back(xa);
            rebuilt += kron(xa, st.D[static_cast<size_t>(a - 1)] * lt);
        }
        dec = std::max(dec, (s.v[mu] - rebuilt).norm());
    }
    st.residual = std::max(worst, dec);
    require(dec <= 10 * tol * std::max(1.0, s.v[0].norm()), ErrorKind::DecompositionFail,
            "tuple does not decompose over {1, D_a}: " + num(dec));
    return st;
}

// ---------------------------------------------------------------- Weyl reordering

inline double arg_2pi(cplx z)
{
    double a = std::arg(z);
    return a < 0 ? a + 2 * M_PI : a;
}

// strict "comes first" in the descending ≺ order
inline bool weyl_before(cplx a, cplx b)
{
    double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-10) return ma > mb;
    double ta = arg_2pi(a), tb = arg_2pi(b);
    if (std::abs(ta - tb) > 1e-10) return ta > tb;
    return false;
}

struct Reordered {
    std::vector<int> order;  // new position p holds old index order[p]
    Mat P;                   // X' = P X Pᵀ
    std::vector<cplx> lambda;
    std::vector<Mat> D;
    Mat Y;
    bool triangular = true;
};

inline Reordered weyl_reorder(const std::vector<cplx>& lambda, const std::vector<Mat>& D, const Mat& Y)
{
    const int K = static_cast<int>(lambda.size());
    Reordered r;
    r.order.resize(static_cast<size_t>(K));
    std::iota(r.order.begin(), r.order.end(), 0);
    std::stable_sort(r.order.begin() + 1, r.order.end(),
                     [&](int a, int b) { return weyl_before(lambda[static_cast<size_t>(a)], lambda[static_cast<size_t>(b)]); });
    r.P = Mat::Zero(K, K);
    for (int p = 0; p < K; ++p) r.P(p, r.order[static_cast<size_t>(p)]) = 1.0;
    for (int p = 0; p < K; ++p) r.lambda.push_back(lambda[static_cast<size_t>(r.order[static_cast<size_t>(p)])]);
    for (int p = 1; p < K; ++p) r.D.push_back(r.P * D[static_cast<size_t>(r.order[static_cast<size_t>(p)] - 1)] * r.P.transpose());
    r.Y = Y.size() ? Mat(r.P * Y * r.P.transpose()) : Mat::Zero(K, K);
    auto upper_norm = [](const Mat& m) { return Mat(m.triangularView<Eigen::Upper>()).norm(); };
    for (const auto& d : r.D) r.triangular = r.triangular && upper_norm(d) <= 1e-9;
    r.triangular = r.triangular && upper_norm(r.Y) <= 1e-9;
    return r;
}

// ---------------------------------------------------------------- ClassA data

struct ClassAData {
    int n = 2;
    int n0 = 1;
    int kR = 0;
    int kL = 0;
    std::vector<cplx> lambda;  // position p = i + kR for i in -kR..kL
    std::vector<Mat> D;        // D_a, a = 1..kR, embedded (K x K)
    std::vector<Mat> G;        // G_b, b = 1..kL, embedded
    Mat Y;
    MpsTuple omega;
    std::vector<std::vector<Mat>> xR;  // xR[mu][a-1]
    std::vector<std::vector<Mat>> xL;  // xL[mu][b-1]
    MpsTuple B;
    int l0 = 0;

    int K() const { return kR + kL + 1; }
    int pos(int i) const { return i + kR; }
    cplx lam(int i) const { return lambda[static_cast<size_t>(pos(i))]; }
    Mat lambda_tilde() const { return lambda_diag(lambda) * (identity(K()) + Y); }
};

// I_R: index a in 0..kR goes to -a; I_L: b in 0..kL goes to b
inline Mat embed_right(const Mat& x, int kR, int kL)
{
    const int K = kR + kL + 1;
    Mat out = Mat::Zero(K, K);
    for (int a = 0; a <= kR; ++a)
        for (int b = 0; b <= kR; ++b) out(kR - a, kR - b) = x(a, b);
    return out;
}

inline Mat embed_left(const Mat& x, int kR, int kL)
{
    const int K = kR + kL + 1;
    Mat out = Mat::Zero(K, K);
    out.block(kR, kR, kL + 1, kL + 1) = x;
    return out;
}

inline Mat restrict_right(const Mat& x, int kR)
{
    Mat out(kR + 1, kR + 1);
    for (int a = 0; a <= kR; ++a)
        for (int b = 0; b <= kR; ++b) out(a, b) = x(kR - a, kR - b);
    return out;
}

inline MpsTuple classa_tensor(const ClassAData& d)
{
    const int K = d.K();
    Mat lt = d.lambda_tilde();
    std::vector<Mat> b;
    for (int mu = 0; mu < d.n; ++mu) {
        Mat m = kron(d.omega[mu], lt);
        for (int a = 1; a <= d.kR; ++a) m += kron(d.xR[static_cast<size_t>(mu)][static_cast<size_t>(a - 1)], d.D[static_cast<size_t>(a - 1)] * lt);
        for (int c = 1; c <= d.kL; ++c) m += kron(d.xL[static_cast<size_t>(mu)][static_cast<size_t>(c - 1)], lt * d.G[static_cast<size_t>(c - 1)]);
        b.push_back(m);
    }
    (void)K;
    return MpsTuple(std::move(b));
}

struct StructureReport {
    double lambda_commute = 0.0;  // Λ D_a = λ_{-a} D_a Λ and the G analogue
    double corner_units = 0.0;    // D_a E00 = E_{-a,0}, E00 G_b = E_{0,b}
    double products = 0.0;        // D_a D_a' in span{D_b : λ λ' = λ_b}
    double y_commute = 0.0;       // [Λ, Y]
    double triangular = 0.0;
    int independence_rank = 0;
    bool ordered = true;
    bool ok = false;
};

namespace detail {

inline double span_residual(const Mat& target, const std::vector<Mat>& gens)
{
    if (gens.empty()) return target.norm();
    Mat a(target.size(), static_cast<Eigen::Index>(gens.size()));
    for (size_t i = 0; i < gens.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = vec(gens[i]);
    Vec c = a.colPivHouseholderQr().solve(vec(target));
    return (a * c - vec(target)).norm();
}

inline bool side_ordered(const std::vector<cplx>& side)
{
    for (size_t i = 1; i + 1 < side.size(); ++i)
        if (weyl_before(side[i + 1], side[i])) return false;
    return true;
}

} // namespace detail

inline StructureReport check_structure(const ClassAData& d, double tol = 1e-10)
{
    StructureReport r;
    const int K = d.K();
    Mat lam = lambda_diag(d.lambda);
    Mat e00 = unit(K, d.pos(0), d.pos(0));
    double sc = 1.0;
    for (const auto& m : d.D) sc = std::max(sc, m.norm());
    for (const auto& m : d.G) sc = std::max(sc, m.norm());
    for (int a = 1; a <= d.kR; ++a) {
        const Mat& da = d.D[static_cast<size_t>(a - 1)];
        r.lambda_commute = std::max(r.lambda_commute, (lam * da - d.lam(-a) * da * lam).norm());
        r.corner_units = std::max(r.corner_units, (da * e00 - unit(K, d.pos(-a), d.pos(0))).norm());
        r.triangular = std::max(r.triangular, Mat(da.triangularView<Eigen::Lower>()).norm());
        for (int a2 = 1; a2 <= d.kR; ++a2) {
            std::vector<Mat> gens;
            for (int b = 1; b <= d.kR; ++b)
                if (same_lambda(d.lam(-a) * d.lam(-a2), d.lam(-b))) gens.push_back(d.D[static_cast<size_t>(b - 1)]);
            r.products = std::max(r.products, detail::span_residual(da * d.D[static_cast<size_t>(a2 - 1)], gens));
        }
    }
    for (int b = 1; b <= d.kL; ++b) {
        const Mat& gb = d.G[static_cast<size_t>(b - 1)];
        r.lambda_commute = std::max(r.lambda_commute, (d.lam(b) * lam * gb - gb * lam).norm());
        r.corner_units = std::max(r.corner_units, (e00 * gb - unit(K, d.pos(0), d.pos(b))).norm());
        r.triangular = std::max(r.triangular, Mat(gb.triangularView<Eigen::Lower>()).norm());
        for (int b2 = 1; b2 <= d.kL; ++b2) {
            std::vector<Mat> gens;
            for (int c = 1; c <= d.kL; ++c)
                if (same_lambda(d.lam(b) * d.lam(b2), d.lam(c))) gens.push_back(d.G[static_cast<size_t>(c - 1)]);
            r.products = std::max(r.products, detail::span_residual(gb * d.G[static_cast<size_t>(b2 - 1)], gens));
        }
    }
    r.y_commute = (lam * d.Y - d.Y * lam).norm();
    r.triangular = std::max(r.triangular, Mat(d.Y.triangularView<Eigen::Lower>()).norm());
    std::vector<Mat> all{identity(K)};
    for (const auto& m : d.D) all.push_back(m);
    for (const auto& m : d.G) all.push_back(m);
    Mat stack(K * K, static_cast<Eigen::Index>(all.size()));
    for (size_t i = 0; i < all.size(); ++i) stack.col(static_cast<Eigen::Index>(i)) = vec(all[i]);
    r.independence_rank = orthonormal_span(stack).rank;
    std::vector<cplx> right, left;
    for (int a = 0; a <= d.kR; ++a) right.push_back(d.lam(-a));
    for (int b = 0; b <= d.kL; ++b) left.push_back(d.lam(b));
    r.ordered = detail::side_ordered(right) && detail::side_ordered(left);
    double t = tol * sc;
    r.ok = r.lambda_commute <= t && r.corner_units <= t && r.products <= t * sc && r.y_commute <= t && r.triangular <= t &&
           r.independence_rank == static_cast<int>(all.size()) && r.ordered;
    return r;
}

inline void check_lambda(const ClassAData& d)
{
    require(static_cast<int>(d.lambda.size()) == d.K(), ErrorKind::InvalidLambda, "lambda has the wrong length");
    require(std::abs(d.lam(0) - 1.0) <= 1e-12, ErrorKind::InvalidLambda, "lambda_0 must equal 1");
    for (int i = -d.kR; i <= d.kL; ++i) {
        if (i == 0) continue;
        double m = std::abs(d.lam(i));
        require(m > 0.0 && m < 1.0, ErrorKind::InvalidLambda, "|lambda_" + num(i) + "| = " + num(m));
    }
}

inline void check_shapes(const ClassAData& d)
{
    const int K = d.K();
    require(d.kR >= 0 && d.kL >= 0 && d.n0 >= 1, ErrorKind::StructureViolation, "negative sizes");
    require(d.omega.D() == d.n0 && d.omega.n() == d.n, ErrorKind::StructureViolation, "omega has the wrong shape");
    require(static_cast<int>(d.D.size()) == d.kR && static_cast<int>(d.G.size()) == d.kL, ErrorKind::StructureViolation,
            "wrong number of D or G matrices");
    for (const auto& m : d.D) require(m.rows() == K && m.cols() == K, ErrorKind::StructureViolation, "D_a has the wrong size");
    for (const auto& m : d.G) require(m.rows() == K && m.cols() == K, ErrorKind::StructureViolation, "G_b has the wrong size");
    require(d.Y.rows() == K && d.Y.cols() == K, ErrorKind::StructureViolation, "Y has the wrong size");
    require(static_cast<int>(d.xR.size()) == d.n && static_cast<int>(d.xL.size()) == d.n, ErrorKind::StructureViolation,
            "x coefficients need one entry per mu");
    for (int mu = 0; mu < d.n; ++mu) {
        require(static_cast<int>(d.xR[static_cast<size_t>(mu)].size()) == d.kR && static_cast<int>(d.xL[static_cast<size_t>(mu)].size()) == d.kL,
                ErrorKind::StructureViolation, "x coefficient count");
        for (const auto& m : d.xR[static_cast<size_t>(mu)]) require(m.rows() == d.n0 && m.cols() == d.n0, ErrorKind::StructureViolation, "xR shape");
        for (const auto& m : d.xL[static_cast<size_t>(mu)]) require(m.rows() == d.n0 && m.cols() == d.n0, ErrorKind::StructureViolation, "xL shape");
    }
}

inline ClassAData assemble_classa(ClassAData d, double tol = 1e-10)
{
    check_shapes(d);
    check_lambda(d);
    StructureReport r = check_structure(d, tol);
    require(r.ok, ErrorKind::StructureViolation,
            "commute " + num(r.lambda_commute) + ", units " + num(r.corner_units) + ", products " +
                num(r.products) + ", [Λ,Y] " + num(r.y_commute) + ", rank " + num(r.independence_rank) +
                (r.ordered ? "" : ", lambda not ordered"));
    d.B = classa_tensor(d);
    return d;
}

// ---------------------------------------------------------------- validation against the model space

struct ClassAValidation {
    struct Row {
        int l;
        int kernel_dim;
        int model_dim;
        int joint_dim;
    };
    std::vector<Row> rows;
    int l0 = -1;
    int dim = 0;
    int expected_dim = 0;
};

inline Mat classa_model_space(const ClassAData& d, int l)
{
    const int K = d.K();
    Mat lp = mat_pow(d.lambda_tilde(), l);
    std::vector<Mat> grade{lp};
    for (const auto& m : d.D) grade.push_back(m * lp);
    for (const auto& m : d.G) grade.push_back(lp * m);
    for (int p = 0; p < d.kR; ++p)
        for (int q = d.kR + 1; q < K; ++q) grade.push_back(unit(K, p, q));
    std::vector<Vec> cols;
    for (int al = 0; al < d.n0; ++al)
        for (int be = 0; be < d.n0; ++be)
            for (const auto& x : grade) cols.push_back(vec(kron(unit(d.n0, al, be), x)));
    return orthonormal_span(cols).basis;
}

inline ClassAValidation validate_classa(const ClassAData& d, int l_min = 1, int l_max = 8)
{
    ClassAValidation out;
    out.expected_dim = d.n0 * d.n0 * (d.kR + 1) * (d.kL + 1);
    MpsTuple b = d.B.n() ? d.B : classa_tensor(d);
    std::string why;
    for (int l = l_min; l <= l_max; ++l) {
        KernelSpaceBasis ks = kernel_space(b, l);
        Mat model = classa_model_space(d, l);
        Mat both(ks.basis.rows(), ks.basis.cols() + model.cols());
        both << ks.basis, model;
        int joint = orthonormal_span(both).rank;
        out.rows.push_back({l, ks.dim, static_cast<int>(model.cols()), joint});
        if (ks.dim == joint && static_cast<int>(model.cols()) == joint) {
            if (out.l0 < 0) {
                out.l0 = l;
                out.dim = joint;
            }
        } else if (out.l0 >= 0) {
            out.l0 = -1;
        }
        if (joint > static_cast<int>(model.cols()))
            why = "K_l not inside the model space at l = " + num(l);
        else if (joint > ks.dim)
            why = "model space not inside K_l at l = " + num(l);
    }
    require(out.l0 >= 0, ErrorKind::NotClassA, why.empty() ? "no stabilization" : why);
    require(out.dim == out.expected_dim, ErrorKind::NotClassA, "stabilized dimension " + num(out.dim));
    return out;
}

// ---------------------------------------------------------------- combinatorics

inline Vec sieve_coefficients(const std::vector<cplx>& s, int degree, int target_i, int target_gamma, int window)
{
    const int m = static_cast<int>(s.size());
    require(m >= 1 && degree >= 0, ErrorKind::InvalidArgument, "empty value set");
    require(target_i >= 0 && target_i < m && target_gamma >= 0 && target_gamma <= degree, ErrorKind::OutOfRange, "target pair");
    const int pairs = m * (degree + 1);
    require(window >= pairs, ErrorKind::SingularSystem, "window shorter than the number of pairs");
    for (int i = 0; i < m; ++i) {
        require(std::abs(s[static_cast<size_t>(i)]) > 0.0, ErrorKind::SingularSystem, "zero value");
        for (int j = 0; j < i; ++j)
            require(std::abs(s[static_cast<size_t>(i)] - s[static_cast<size_t>(j)]) > 1e-12, ErrorKind::SingularSystem, "duplicate values");
    }
    Mat a(pairs, window);
    Vec rhs = Vec::Zero(pairs);
    for (int i = 0; i < m; ++i)
        for (int gam = 0; gam <= degree; ++gam) {
            const int row = i * (degree + 1) + gam;
            for (int j = 0; j < window; ++j) {
                double binom = 1.0;
                for (int t = 0; t < gam; ++t) binom = binom * (j - t) / (t + 1);
                a(row, j) = std::pow(s[static_cast<size_t>(i)], j) * binom;
            }
            if (i == target_i && gam == target_gamma) rhs(row) = 1.0;
        }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
    require(cod.rank() == pairs, ErrorKind::SingularSystem, "generalized Vandermonde matrix is rank deficient");
    Vec xi = cod.solve(rhs);
    require((a * xi - rhs).norm() <= 1e-10 * std::max(1.0, xi.norm()), ErrorKind::SingularSystem, "ill-conditioned solve");
    return xi;
}

inline long long binomial(long long n, long long k)
{
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// lC_{m1} · lC_{m2} = sum_k alpha[k] · lC_k
inline std::vector<long long> binomial_convolution(int l, int m1, int m2)
{
    require(l >= 1 && m1 >= 0 && m2 >= 0 && m1 + m2 <= l, ErrorKind::OutOfRange, "need m1 + m2 <= l");
    std::vector<long long> alpha(static_cast<size_t>(m1 + m2 + 1), 0);
    for (int k = m2; k <= m1 + m2; ++k) {
        int j = k - m1;
        if (j >= 0 && j <= m2) alpha[static_cast<size_t>(k)] = binomial(k, m2) * binomial(m2, j);
    }
    return alpha;
}

} // namespace mpsedge
