#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "chain.hpp"
#include "cpmap.hpp"
#include "mps.hpp"

namespace mpsedge {

using SpMat = Eigen::SparseMatrix<cplx>;

// ---------------------------------------------------------------- interactions

struct Interaction {
    int n = 2;
    int m = 1;
    Mat h;  // n^m x n^m orthogonal projection
};

namespace detail {

inline long long ipow(int n, int l)
{
    long long p = 1;
    for (int i = 0; i < l; ++i) p *= n;
    return p;
}

// drop entries far below the matrix scale so sparsity and realness survive rounding
inline Mat clean(const Mat& a, double rel = 1e-14)
{
    const double cut = rel * std::max(1.0, a.cwiseAbs().maxCoeff());
    Mat out = a;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double re = std::abs(a(i, j).real()) > cut ? a(i, j).real() : 0.0;
            double im = std::abs(a(i, j).imag()) > cut ? a(i, j).imag() : 0.0;
            out(i, j) = cplx(re, im);
        }
    return out;
}

} // namespace detail

inline void check_interaction(const Interaction& h, double tol = 1e-10)
{
    require(h.n >= 2 && h.m >= 1, ErrorKind::InvalidArgument, "interaction needs n >= 2 and m >= 1");
    const long long dim = checked_pow(h.n, h.m, max_chain_dim);
    require(h.h.rows() == dim && h.h.cols() == dim, ErrorKind::DimensionMismatch, "h must be n^m x n^m");
    require(hermiticity_defect(h.h) <= tol, ErrorKind::NotHermitian, "h is not Hermitian");
    require((h.h * h.h - h.h).norm() <= tol * std::max(1.0, h.h.norm()), ErrorKind::InvalidArgument, "h is not a projection");
}

// projection onto the orthogonal complement of Ran Γ_m
inline Interaction parent_interaction(const MpsTuple& v, int m)
{
    require(m >= 1, ErrorKind::InvalidArgument, "range must be >= 1");
    const long long dim = checked_pow(v.n(), m, max_chain_dim);
    Span s = support_basis(v, m);
    require(s.rank < dim, ErrorKind::DegenerateInteraction, "Γ_" + num(m) + " is surjective, h = 0");
    Interaction out;
    out.n = v.n();
    out.m = m;
    out.h = detail::clean(identity(dim) - s.basis * s.basis.adjoint());
    return out;
}

// H_[0,N-1] = sum_x τ_x(h), sparse storage, dense values
inline SpMat assemble_hamiltonian(const Interaction& h, int N)
{
    require(N >= h.m, ErrorKind::NLessThanRange, "N = " + num(N) + " below range m = " + num(h.m));
    const long long dim = checked_pow(h.n, N, max_chain_dim);
    const long long hd = detail::ipow(h.n, h.m);
    std::vector<std::vector<std::pair<long long, cplx>>> cols(static_cast<size_t>(hd));
    for (long long j = 0; j < hd; ++j)
        for (long long i = 0; i < hd; ++i)
            if (h.h(i, j) != 0.0) cols[static_cast<size_t>(j)].push_back({i, h.h(i, j)});
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int x = 0; x + h.m <= N; ++x) {
        const long long right = detail::ipow(h.n, N - h.m - x);
        for (long long s = 0; s < dim; ++s) {
            const long long r = s % right;
            const long long mid = (s / right) % hd;
            const long long left = s / (right * hd);
            for (const auto& [i, val] : cols[static_cast<size_t>(mid)])
                trip.emplace_back((left * hd + i) * right + r, s, val);
        }
    }
    SpMat H(dim, dim);
    H.setFromTriplets(trip.begin(), trip.end());
    H.prune(cplx(0.0));
    return H;
}

inline Mat to_dense(const SpMat& a) { return Mat(a); }

// ---------------------------------------------------------------- ground data

struct ChainSpectrum {
    int N = 0;
    RVec eigenvalues;  // ascending
    int kernel_dim = 0;
    double gap = 0.0;
    double kernel_cut = 0.0;
    Mat ground;        // orthonormal basis of the kernel

    Mat projector() const { return ground * ground.adjoint(); }
};

namespace detail {

inline std::vector<std::vector<Eigen::Index>> components(const SpMat& a)
{
    const Eigen::Index d = a.rows();
    std::vector<Eigen::Index> parent(static_cast<size_t>(d));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    for (Eigen::Index k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it) {
            Eigen::Index p = find(it.row()), q = find(it.col());
            if (p != q) parent[static_cast<size_t>(std::max(p, q))] = std::min(p, q);
        }
    std::map<Eigen::Index, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < d; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<Eigen::Index>> out;
    for (auto& [root, idx] : groups) out.push_back(std::move(idx));
    return out;
}

} // namespace detail

// kernel: eigenvalues <= kernel_tol * max(1, ‖H‖); each connected block is diagonalized densely
inline ChainSpectrum ground_data(const SpMat& H, double kernel_tol = 1e-9, int N = 0)
{
    require(H.rows() == H.cols() && H.rows() > 0, ErrorKind::DimensionMismatch, "H must be square");
    const Eigen::Index d = H.rows();
    struct Part {
        std::vector<Eigen::Index> idx;
        RVec w;
        Mat v;
    };
    std::vector<Part> parts;
    double herm = 0.0;
    auto comps = detail::components(H);
    std::vector<std::pair<size_t, Eigen::Index>> where(static_cast<size_t>(d));
    std::vector<Mat> blocks;
    for (size_t c = 0; c < comps.size(); ++c) {
        for (size_t i = 0; i < comps[c].size(); ++i) where[static_cast<size_t>(comps[c][i])] = {c, static_cast<Eigen::Index>(i)};
        const auto b = static_cast<Eigen::Index>(comps[c].size());
        blocks.push_back(Mat::Zero(b, b));
    }
    for (Eigen::Index k = 0; k < H.outerSize(); ++k)
        for (SpMat::InnerIterator it(H, k); it; ++it) {
            auto [c, i] = where[static_cast<size_t>(it.row())];
            blocks[c](i, where[static_cast<size_t>(it.col())].second) = it.value();
        }
    for (size_t c = 0; c < comps.size(); ++c) {
        auto& idx = comps[c];
        const Mat& blk = blocks[c];
        herm = std::max(herm, (blk - blk.adjoint()).cwiseAbs().maxCoeff());
        Part p{std::move(idx), {}, {}};
        if (blk.imag().cwiseAbs().maxCoeff() == 0.0) {
            RMat re = blk.real();
            Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (re + re.transpose()));
            require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "block eigensolver");
            p.w = es.eigenvalues();
            p.v = es.eigenvectors().cast<cplx>();
        } else {
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (blk + blk.adjoint()));
            require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "block eigensolver");
            p.w = es.eigenvalues();
            p.v = es.eigenvectors();
        }
        parts.push_back(std::move(p));
    }
    double scale = 0.0;
    for (const auto& p : parts) scale = std::max(scale, p.w.cwiseAbs().maxCoeff());
    require(herm <= 1e-10 * std::max(1.0, scale), ErrorKind::NotHermitian, "H is not Hermitian");
    ChainSpectrum out;
    out.N = N;
    out.kernel_cut = kernel_tol * std::max(1.0, scale);
    require(scale > out.kernel_cut, ErrorKind::NoGap, "all eigenvalues lie below the kernel tolerance");
    std::vector<double> all;
    std::vector<Vec> kern;
    for (const auto& p : parts)
        for (Eigen::Index i = 0; i < p.w.size(); ++i) {
            all.push_back(p.w(i));
            if (p.w(i) <= out.kernel_cut) {
                Vec g = Vec::Zero(d);
                for (size_t r = 0; r < p.idx.size(); ++r) g(p.idx[r]) = p.v(static_cast<Eigen::Index>(r), i);
                fix_phase(g);
                kern.push_back(std::move(g));
            }
        }
    std::sort(all.begin(), all.end());
    out.eigenvalues = Eigen::Map<RVec>(all.data(), static_cast<Eigen::Index>(all.size()));
    out.kernel_dim = static_cast<int>(kern.size());
    out.ground = Mat::Zero(d, out.kernel_dim);
    for (int i = 0; i < out.kernel_dim; ++i) out.ground.col(i) = kern[static_cast<size_t>(i)];
    out.gap = all[static_cast<size_t>(out.kernel_dim)];
    return out;
}

inline ChainSpectrum ground_data(const Mat& H, double kernel_tol = 1e-9, int N = 0)
{
    require(H.rows() == H.cols(), ErrorKind::DimensionMismatch, "H must be square");
    SpMat s = detail::clean(H).sparseView();
    return ground_data(s, kernel_tol, N);
}

inline ChainSpectrum chain_spectrum(const Interaction& h, int N, double kernel_tol = 1e-9)
{
    return ground_data(assemble_hamiltonian(h, N), kernel_tol, N);
}

// ker H_[0,N-1] = ∩_x ker τ_x(h) for the positive sum, built site by site:
// K_N = {ψ ∈ K_{N-1} ⊗ C^n : (1 ⊗ h) ψ = 0 on the last window}
inline Mat frustration_free_kernel(const Interaction& h, int N, double tol = 1e-10)
{
    require(N >= h.m, ErrorKind::NLessThanRange, "N = " + num(N) + " below range m = " + num(h.m));
    checked_pow(h.n, N, max_chain_dim);
    const long long hd = detail::ipow(h.n, h.m);
    EigenData he = hermitian_eig(0.5 * (h.h + h.h.adjoint()), 1e-8);
    std::vector<Vec> k0;
    for (Eigen::Index i = 0; i < he.eigenvalues.size(); ++i)
        if (he.eigenvalues(i).real() < 0.5) k0.push_back(he.eigenvectors.col(i));
    if (k0.empty()) return Mat::Zero(hd, 0);
    Mat q = orthonormal_span(k0).basis;
    const Mat ht = h.h.transpose();
    for (int len = h.m + 1; len <= N; ++len) {
        if (q.cols() == 0) return Mat::Zero(detail::ipow(h.n, len), 0);
        const long long dim = detail::ipow(h.n, len);
        const long long r = q.cols() * h.n;
        Mat x = Mat::Zero(dim, r);
        for (Eigen::Index c = 0; c < q.cols(); ++c)
            for (int s = 0; s < h.n; ++s)
                for (Eigen::Index i = 0; i < q.rows(); ++i) x(i * h.n + s, c * h.n + s) = q(i, c);
        Mat y(dim, r);
        for (long long j = 0; j < r; ++j) {
            Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> z(x.col(j).data(), dim / hd, hd);
            Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = z * ht;
            y.col(j) = Eigen::Map<const Vec>(w.data(), dim);
        }
        Eigen::JacobiSVD<Mat> svd(y, Eigen::ComputeFullV);
        const RVec& sv = svd.singularValues();
        std::vector<Eigen::Index> null;
        for (Eigen::Index i = 0; i < r; ++i)
            if (i >= sv.size() || sv(i) <= tol) null.push_back(i);
        Mat c(r, static_cast<Eigen::Index>(null.size()));
        for (size_t i = 0; i < null.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = svd.matrixV().col(null[i]);
        q = x * c;
    }
    return q;
}

// ---------------------------------------------------------------- projector distance

struct ProjectorDistance {
    double op_norm = 0.0;
    double trace_overlap = 0.0;  // Tr((1 − G2) G1)
};

inline ProjectorDistance projector_distance(const Mat& g1, const Mat& g2)
{
    require(g1.rows() == g2.rows() && g1.cols() == g2.cols() && g1.rows() == g1.cols(), ErrorKind::DimensionMismatch,
            "projectors must share a square shape");
    ProjectorDistance out;
    Mat diff = g1 - g2;
    out.op_norm = hermitian_eig(0.5 * (diff + diff.adjoint()), 1e-8, false).eigenvalues.real().cwiseAbs().maxCoeff();
    out.trace_overlap = ((identity(g1.rows()) - g2) * g1).trace().real();
    return out;
}

// same quantities from orthonormal bases of the two ranges
inline ProjectorDistance projector_distance_bases(const Mat& q1, const Mat& q2)
{
    require(q1.rows() == q2.rows(), ErrorKind::DimensionMismatch, "bases live in different spaces");
    auto leak = [](const Mat& a, const Mat& b) {
        if (a.cols() == 0) return 0.0;
        Mat r = a - b * (b.adjoint() * a);
        Eigen::SelfAdjointEigenSolver<Mat> es(r.adjoint() * r, Eigen::EigenvaluesOnly);
        return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    };
    ProjectorDistance out;
    out.op_norm = std::min(1.0, std::max(leak(q1, q2), leak(q2, q1)));
    out.trace_overlap = static_cast<double>(q1.cols()) - (q2.adjoint() * q1).squaredNorm();
    return out;
}

// ---------------------------------------------------------------- edge states

namespace detail {

// M -> sum_mu (v_mu ⊗ 1) M (v_mu ⊗ 1)*, the Gram recursion of Γ, and its adjoint
inline Mat gram_step(const std::vector<Mat>& big, const Mat& m)
{
    Mat out = Mat::Zero(m.rows(), m.cols());
    for (const auto& b : big) out += b * m * b.adjoint();
    return out;
}

inline Mat gram_step_adjoint(const std::vector<Mat>& big, const Mat& m)
{
    Mat out = Mat::Zero(m.rows(), m.cols());
    for (const auto& b : big) out += b.adjoint() * m * b;
    return out;
}

} // namespace detail

// Reduced density of Tr(G_N ·)/Tr(G_N), G_N the projection onto Ran Γ_N, computed on D^2 x D^2 matrices.
// R: A on the window [0, l-1]. L: A translated to [N-l, N-1], i.e. τ_{N-l}(A).
inline Mat edge_density(const MpsTuple& v, int l, int N, Direction dir = Direction::R, double tol = default_rank_tol)
{
    require(l >= 1 && l <= N, ErrorKind::InvalidArgument, "window must fit in the chain");
    const int d = v.D();
    const long long nl = checked_pow(v.n(), l, max_chain_dim);
    std::vector<Mat> big;
    for (int mu = 0; mu < v.n(); ++mu) big.push_back(kron(v[mu], identity(d)));
    const Vec e = vec(identity(d));
    const Mat seed = e * e.adjoint();

    // R: Γ*(A ⊗ 1)Γ = sum A_{uu'} X_u S X_{u'}*, S = E^{N-l}(seed); L: E^{N-l} of the same sum with S = seed
    Mat middle = seed;
    if (dir == Direction::R)
        for (int i = 0; i < N - l; ++i) middle = detail::gram_step(big, middle);
    Mat gram = seed;
    for (int i = 0; i < N; ++i) gram = detail::gram_step(big, gram);
    EigenData ge = hermitian_eig(0.5 * (gram + gram.adjoint()), 1e-8);
    RVec w = ge.eigenvalues.real();
    const double cut = tol * w.cwiseAbs().maxCoeff();
    Mat pinv = Mat::Zero(d * d, d * d);
    int rank = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > cut) {
            pinv += ge.eigenvectors.col(i) * ge.eigenvectors.col(i).adjoint() / w(i);
            ++rank;
        }
    Mat folded = pinv;
    if (dir == Direction::L)
        for (int i = 0; i < N - l; ++i) folded = detail::gram_step_adjoint(big, folded);

    std::vector<Mat> xs(static_cast<size_t>(nl)), xs_mid(static_cast<size_t>(nl));
    for (long long s = 0; s < nl; ++s) {
        Mat p = identity(d * d);
        for (int mu : word_digits(s, v.n(), l)) p = p * big[static_cast<size_t>(mu)];
        xs[static_cast<size_t>(s)] = folded * p;
        xs_mid[static_cast<size_t>(s)] = middle * p.adjoint();
    }
    // tr(rho A) = sum A_{uu'} c_{uu'}  =>  rho = cᵀ
    Mat rho(nl, nl);
    for (long long u = 0; u < nl; ++u)
        for (long long u2 = 0; u2 < nl; ++u2)
            rho(u2, u) = (xs[static_cast<size_t>(u)].array() * xs_mid[static_cast<size_t>(u2)].transpose().array()).sum() /
                         static_cast<double>(rank);
    return rho;
}

struct EdgeSeries {
    std::vector<int> N;
    std::vector<cplx> values;
    cplx limit = 0.0;
    cplx ratio = 0.0;     // fitted ratio of successive differences
    bool converged = false;
};

namespace detail {

// geometric (Aitken-type) extrapolation over the last four values
inline void extrapolate(EdgeSeries& s)
{
    const size_t m = s.values.size();
    s.limit = s.values.back();
    s.ratio = 0.0;
    if (m < 2) {
        s.converged = false;
        return;
    }
    std::vector<cplx> diff;
    for (size_t i = 1; i < m; ++i) diff.push_back(s.values[i] - s.values[i - 1]);
    const double floor = 1e-14 * std::max(1.0, std::abs(s.values.back()));
    if (std::abs(diff.back()) <= floor) {
        s.converged = true;
        return;
    }
    const size_t from = diff.size() >= 3 ? diff.size() - 3 : 0;
    cplx num_ = 0.0;
    double den = 0.0;
    for (size_t i = from; i + 1 < diff.size(); ++i) {
        num_ += diff[i + 1] * std::conj(diff[i]);
        den += std::norm(diff[i]);
    }
    if (den > 0.0) s.ratio = num_ / den;
    if (std::abs(s.ratio) < 1.0) s.limit = s.values.back() + diff.back() * s.ratio / (1.0 - s.ratio);
    bool mono = true;
    for (size_t i = 2; i < diff.size(); ++i)
        if (std::abs(diff[i]) > std::abs(diff[i - 1]) && std::abs(diff[i]) > floor) mono = false;
    s.converged = mono && std::abs(s.ratio) < 1.0;
}

} // namespace detail

inline EdgeSeries edge_expectation(const MpsTuple& v, const Mat& a, int l, const std::vector<int>& n_range,
                                   Direction dir = Direction::R)
{
    require(!n_range.empty(), ErrorKind::EmptyInput, "empty N range");
    const long long nl = checked_pow(v.n(), l, max_chain_dim);
    require(a.rows() == nl && a.cols() == nl, ErrorKind::DimensionMismatch, "observable must act on n^l dimensions");
    for (size_t i = 1; i < n_range.size(); ++i)
        require(n_range[i] == n_range[i - 1] + 1, ErrorKind::InvalidArgument, "N range must be consecutive");
    require(n_range.front() >= l, ErrorKind::InvalidArgument, "window longer than the chain");
    EdgeSeries s;
    for (int N : n_range) {
        Mat rho = edge_density(v, l, N, dir);
        s.N.push_back(N);
        s.values.push_back((rho * a).trace());
    }
    detail::extrapolate(s);
    return s;
}

// ---------------------------------------------------------------- LTQO scan

struct LtqoRow {
    int N;
    int observable;
    double value;
    double error;
};

struct AssumptionDiagnostics {
    int d1 = 0;                 // A1: largest kernel dimension seen
    double gamma = 0.0;         // A2: smallest gap seen
    double ltqo_C1 = 0.0;       // A4 fit
    double ltqo_s1 = 0.0;
    double support_floor = 0.0; // smallest nonzero eigenvalue of the edge reduced densities
    std::vector<std::string> chain_flags;
};

struct LtqoScan {
    std::vector<LtqoRow> rows;
    std::vector<EdgeSeries> series;
    double C1 = 0.0;
    double s1 = 0.0;
    bool fit_skipped = false;
    bool monotone = false;
    double support_floor = 0.0;
    std::vector<double> max_error;  // max over observables of error / ‖A‖, per N
};

inline LtqoScan ltqo_scan(const MpsTuple& v, const std::vector<Mat>& observables, int l, const std::vector<int>& n_range,
                          Direction dir = Direction::R, int burn_in = 1)
{
    require(!observables.empty(), ErrorKind::EmptyInput, "no observables");
    LtqoScan out;
    out.max_error.assign(n_range.size(), 0.0);
    for (size_t k = 0; k < observables.size(); ++k) {
        const Mat& a = observables[k];
        EdgeSeries s = edge_expectation(v, a, l, n_range, dir);
        const double na = std::max(op_norm(a), 1e-300);
        for (size_t i = 0; i < s.N.size(); ++i) {
            double err = std::abs(s.values[i] - s.limit);
            out.rows.push_back({s.N[i], static_cast<int>(k), s.values[i].real(), err});
            out.max_error[i] = std::max(out.max_error[i], err / na);
        }
        out.series.push_back(std::move(s));
    }
    const double floor = 1e-13;
    std::vector<double> xs, ys;
    for (size_t i = 0; i < n_range.size(); ++i)
        if (out.max_error[i] > floor) {
            xs.push_back(n_range[i] - l);
            ys.push_back(std::log(out.max_error[i]));
        }
    double top = *std::max_element(out.max_error.begin(), out.max_error.end());
    if (top <= floor) {
        out.fit_skipped = true;
        out.monotone = true;
    } else {
        require(xs.size() >= 3, ErrorKind::FitFailure, "fewer than three decaying points");
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double sxy = 0.0, sxx = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        require(sxx > 0.0, ErrorKind::FitFailure, "degenerate N range");
        const double slope = sxy / sxx;
        out.s1 = std::exp(slope);
        out.C1 = std::exp(my - slope * mx);
        out.monotone = true;
        for (size_t i = static_cast<size_t>(burn_in) + 1; i < out.max_error.size(); ++i)
            if (out.max_error[i] > out.max_error[i - 1] && out.max_error[i] > floor) out.monotone = false;
    }
    double sf = 1.0;
    for (int w = 1; w <= l; ++w) {
        Mat rho = edge_density(v, w, n_range.back(), dir);
        RVec ev = hermitian_eig(0.5 * (rho + rho.adjoint()), 1e-8, false).eigenvalues.real();
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) > 1e-10) sf = std::min(sf, ev(i));
    }
    out.support_floor = sf;
    return out;
}

// corner diagnostics of the invariant chain; "ok" when every level passes
inline std::vector<std::string> chain_flags(const MpsTuple& v, std::uint64_t seed = 0)
{
    std::vector<std::string> flags;
    try {
        Mat k0 = minimal_invariant_subspace(v, std::nullopt, seed);
        corner_rescale(build_chain(v, k0, seed));
        flags.push_back("ok");
    } catch (const Error& e) {
        flags.push_back(kind_name(e.kind()));
    }
    return flags;
}

inline AssumptionDiagnostics assumption_diagnostics(const MpsTuple& v, int m, const std::vector<int>& n_range,
                                                    const std::vector<Mat>& observables, int l, std::uint64_t seed = 0)
{
    AssumptionDiagnostics d;
    Interaction h = parent_interaction(v, m);
    d.gamma = std::numeric_limits<double>::infinity();
    for (int N : n_range) {
        if (N < m) continue;
        ChainSpectrum cs = chain_spectrum(h, N);
        d.d1 = std::max(d.d1, cs.kernel_dim);
        d.gamma = std::min(d.gamma, cs.gap);
    }
    LtqoScan sc = ltqo_scan(v, observables, l, n_range);
    d.ltqo_C1 = sc.C1;
    d.ltqo_s1 = sc.s1;
    d.support_floor = sc.support_floor;
    d.chain_flags = chain_flags(v.scaled(1.0 / std::sqrt(peripheral_structure(v).radius)), seed);
    return d;
}

// ---------------------------------------------------------------- interpolation

struct InterpolationCell {
    double t;
    int N;
    int kernel_dim;
    double lambda_min_nonzero;
    double lambda_max;
    double kernel_max;  // largest eigenvalue counted as kernel
};

struct InterpolationReport {
    std::vector<InterpolationCell> cells;
    double gamma_star = 0.0;     // smallest nonzero eigenvalue over the grid
    double window_lo = 0.0;      // largest kernel eigenvalue over the grid
    bool kernel_constant = true; // kernel dimension independent of t for every N
};

inline InterpolationReport interpolation_scan(const Interaction& h0, const Interaction& h1, const std::vector<double>& t_grid,
                                              const std::vector<int>& n_range, double kernel_tol = 1e-9)
{
    require(h0.n == h1.n, ErrorKind::DimensionMismatch, "interactions act on different spins");
    require(!t_grid.empty() && !n_range.empty(), ErrorKind::EmptyInput, "empty grid");
    InterpolationReport rep;
    rep.gamma_star = std::numeric_limits<double>::infinity();
    for (int N : n_range) {
        SpMat a = assemble_hamiltonian(h0, N);
        SpMat b = assemble_hamiltonian(h1, N);
        int dim0 = -1;
        for (double t : t_grid) {
            SpMat H = (1.0 - t) * a + t * b;
            H.prune(cplx(0.0));
            ChainSpectrum cs = ground_data(H, kernel_tol, N);
            double kmax = cs.kernel_dim > 0 ? cs.eigenvalues(cs.kernel_dim - 1) : 0.0;
            rep.cells.push_back({t, N, cs.kernel_dim, cs.gap, cs.eigenvalues(cs.eigenvalues.size() - 1), kmax});
            rep.gamma_star = std::min(rep.gamma_star, cs.gap);
            rep.window_lo = std::max(rep.window_lo, kmax);
            if (dim0 < 0) dim0 = cs.kernel_dim;
            if (cs.kernel_dim != dim0) rep.kernel_constant = false;
        }
    }
    return rep;
}

inline std::vector<double> uniform_grid(int steps)
{
    require(steps >= 2, ErrorKind::InvalidArgument, "need at least two grid points");
    std::vector<double> t;
    for (int i = 0; i < steps; ++i) t.push_back(static_cast<double>(i) / (steps - 1));
    return t;
}

// ---------------------------------------------------------------- finitely correlated states

struct FcsTriple {
    Mat rho;
    MpsTuple tuple;
    Direction direction = Direction::R;
};

inline void check_triple(const FcsTriple& f, double tol = 1e-10)
{
    const int d = f.tuple.D();
    require(f.rho.rows() == d && f.rho.cols() == d, ErrorKind::InvalidTriple, "rho has the wrong shape");
    require(hermiticity_defect(f.rho) <= tol, ErrorKind::InvalidTriple, "rho is not Hermitian");
    require(std::abs(f.rho.trace() - 1.0) <= tol, ErrorKind::InvalidTriple, "rho must have trace one");
    RVec w = hermitian_eig(0.5 * (f.rho + f.rho.adjoint()), 1e-8, false).eigenvalues.real();
    require(w.minCoeff() > 1e-12, ErrorKind::InvalidTriple, "rho is not faithful");
    require(f.tuple.normalized(tol), ErrorKind::InvalidTriple, "tuple is not unital");
    require((apply_dual_transfer(f.tuple, f.rho) - f.rho).norm() <= tol, ErrorKind::InvalidTriple, "rho is not invariant");
}

// ω(A_1 ⊗ ... ⊗ A_l) = ρ(E_{A_1} ∘ ... ∘ E_{A_l}(1)), E_A(X) = sum A_{μν} v_μ X v_ν*; L applies the sites in reverse
inline cplx fcs_evaluate(const FcsTriple& f, const std::vector<Mat>& ops)
{
    check_triple(f);
    const int n = f.tuple.n();
    Mat x = identity(f.tuple.D());
    auto apply = [&](const Mat& a) {
        require(a.rows() == n && a.cols() == n, ErrorKind::DimensionMismatch, "local operator must be n x n");
        Mat y = Mat::Zero(x.rows(), x.cols());
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
                if (a(mu, nu) != 0.0) y += a(mu, nu) * f.tuple[mu] * x * f.tuple[nu].adjoint();
        x = y;
    };
    if (f.direction == Direction::R)
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) apply(*it);
    else
        for (const auto& a : ops) apply(a);
    return (f.rho * x).trace();
}

// ω(|w⟩⟨w'|) for all words of length l, rows w, columns w'
inline Mat fcs_word_table(const FcsTriple& f, int l)
{
    check_triple(f);
    auto words = word_products(f.tuple, l, f.direction == Direction::R ? Direction::R : Direction::L);
    const Eigen::Index m = static_cast<Eigen::Index>(words.size());
    std::vector<Mat> rw;
    for (const auto& w : words) rw.push_back(f.rho * w);
    Mat out(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            out(i, j) = (rw[static_cast<size_t>(i)].array() * words[static_cast<size_t>(j)].conjugate().array()).sum();
    return out;
}

// bulk triple of a primitive unital tuple
inline FcsTriple bulk_triple(const MpsTuple& omega)
{
    TransferSpectrum ts = peripheral_structure(omega);
    require(ts.primitive, ErrorKind::NotPrimitive, "bulk tuple must be primitive");
    MpsTuple u = std::abs(ts.radius - 1.0) <= 1e-10 && omega.normalized() ? omega : unital_gauge(omega, ts.radius, ts.perron);
    FcsTriple f{peripheral_structure(u).rho, u, Direction::R};
    return f;
}

} // namespace mpsedge
