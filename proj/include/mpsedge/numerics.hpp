#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace mpsedge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double default_rank_tol = 1e-10;

struct EigenData {
    Vec eigenvalues;  // real for Hermitian input (imaginary parts exactly zero)
    Mat eigenvectors;
    double residual = 0.0;
    bool defective = false;
};

struct Span {
    int rank = 0;
    Mat basis;  // rows x rank, orthonormal columns
    RVec singular_values;
};

inline bool all_finite(const Mat& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

inline double fro(const Mat& a) { return a.norm(); }

inline double op_norm(const Mat& a)
{
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

inline Mat kron(const Mat& a, const Mat& b)
{
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat identity(Eigen::Index d) { return Mat::Identity(d, d); }

// row-major vectorization: vec(X)[i*cols + j] = X(i, j), so vec(A X B) = (A ⊗ Bᵀ) vec(X)
inline Vec vec(const Mat& x)
{
    Vec out(x.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) out(i * x.cols() + j) = x(i, j);
    return out;
}

inline Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols)
{
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = v(i * cols + j);
    return out;
}

inline Mat unit(Eigen::Index d, Eigen::Index i, Eigen::Index j)
{
    Mat e = Mat::Zero(d, d);
    e(i, j) = 1.0;
    return e;
}

// first entry with modulus > 1e-8 becomes real positive
inline void fix_phase(Eigen::Ref<Vec> v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double m = std::abs(v(i));
        if (m > 1e-8) {
            v *= std::conj(v(i)) / m;
            v(i) = cplx(m, 0.0);
            return;
        }
    }
}

inline void fix_phase_columns(Mat& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        Vec col = a.col(j);
        fix_phase(col);
        a.col(j) = col;
    }
}

inline double hermiticity_defect(const Mat& a)
{
    double n = a.norm();
    if (n == 0.0) return 0.0;
    return (a - a.adjoint()).norm() / n;
}

inline EigenData hermitian_eig(const Mat& a, double tol = 1e-12, bool vectors = true)
{
    require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "hermitian_eig needs a square matrix");
    require(hermiticity_defect(a) <= tol, ErrorKind::NotHermitian,
            "relative defect " + std::to_string(hermiticity_defect(a)));
    const Eigen::Index d = a.rows();
    EigenData out;
    if (d == 0) return out;
    Mat h = 0.5 * (a + a.adjoint());
    bool real = h.imag().cwiseAbs().maxCoeff() == 0.0;
    auto opt = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    if (real) {
        Eigen::SelfAdjointEigenSolver<RMat> es(h.real(), opt);
        require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "real symmetric solver");
        out.eigenvalues = es.eigenvalues().cast<cplx>();
        if (vectors) out.eigenvectors = es.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(h, opt);
        require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "hermitian solver");
        out.eigenvalues = es.eigenvalues().cast<cplx>();
        if (vectors) out.eigenvectors = es.eigenvectors();
    }
    if (vectors) {
        fix_phase_columns(out.eigenvectors);
        double an = a.norm();
        Mat rec = out.eigenvectors * out.eigenvalues.asDiagonal() * out.eigenvectors.adjoint();
        out.residual = an > 0 ? (a - rec).norm() / an : (a - rec).norm();
    }
    return out;
}

inline RVec real_part(const Vec& v) { return v.real(); }

inline EigenData general_eig(const Mat& a)
{
    require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "general_eig needs a square matrix");
    const Eigen::Index d = a.rows();
    EigenData out;
    if (d == 0) return out;
    Eigen::ComplexEigenSolver<Mat> es(a, true);
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "complex eigen solver");
    std::vector<Eigen::Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    const Vec& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        if (ev(x).real() != ev(y).real()) return ev(x).real() < ev(y).real();
        return ev(x).imag() < ev(y).imag();
    });
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    double an = std::max(a.norm(), 1e-300);
    for (Eigen::Index k = 0; k < d; ++k) {
        out.eigenvalues(k) = ev(order[static_cast<size_t>(k)]);
        Vec v = es.eigenvectors().col(order[static_cast<size_t>(k)]);
        v.normalize();
        fix_phase(v);
        out.eigenvectors.col(k) = v;
        out.residual = std::max(out.residual, (a * v - out.eigenvalues(k) * v).norm() / an);
    }
    require(out.residual <= 1e-8, ErrorKind::ConvergenceFailure, "eigenpair residual too large");
    Eigen::JacobiSVD<Mat> svd(out.eigenvectors);
    out.defective = svd.singularValues()(d - 1) < 1e-7;
    return out;
}

// columns of `vectors` are the input vectors
inline Span orthonormal_span(const Mat& vectors, double tol = default_rank_tol)
{
    require(vectors.rows() > 0 && vectors.cols() > 0, ErrorKind::EmptyInput, "orthonormal_span");
    require(tol > 0.0 && tol < 1.0, ErrorKind::InvalidArgument, "tol must lie in (0,1)");
    Span out;
    // BDCSVD in Eigen 3.4.0 loses small singular values on some complex inputs
    Eigen::JacobiSVD<Mat> svd(vectors, Eigen::ComputeThinU);
    out.singular_values = svd.singularValues();
    double top = out.singular_values.size() ? out.singular_values(0) : 0.0;
    int r = 0;
    if (top > 0.0)
        while (r < out.singular_values.size() && out.singular_values(r) > tol * top) ++r;
    out.rank = r;
    out.basis = svd.matrixU().leftCols(r);
    return out;
}

inline Span orthonormal_span(const std::vector<Vec>& vs, double tol = default_rank_tol)
{
    require(!vs.empty(), ErrorKind::EmptyInput, "orthonormal_span");
    Mat m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    for (size_t i = 0; i < vs.size(); ++i) {
        require(vs[i].size() == m.rows(), ErrorKind::DimensionMismatch, "vectors of unequal length");
        m.col(static_cast<Eigen::Index>(i)) = vs[i];
    }
    return orthonormal_span(m, tol);
}

// orthonormal basis of the orthogonal complement of span(q), q with orthonormal columns
inline Mat orthogonal_complement(const Mat& q, Eigen::Index dim)
{
    if (q.cols() == 0) return identity(dim);
    Mat p = identity(dim) - q * q.adjoint();
    Eigen::JacobiSVD<Mat> svd(p, Eigen::ComputeFullU);
    return svd.matrixU().leftCols(dim - q.cols());
}

// ‖P1 − P2‖ for the projections onto two spans given by orthonormal columns
inline double subspace_distance(const Mat& q1, const Mat& q2)
{
    if (q1.cols() != q2.cols()) return 1.0;
    if (q1.cols() == 0) return 0.0;
    Mat r = q1 - q2 * (q2.adjoint() * q1);
    Eigen::SelfAdjointEigenSolver<Mat> es(r.adjoint() * r, Eigen::EigenvaluesOnly);
    return std::min(1.0, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
}

// principal square root and inverse square root of a positive definite matrix
struct PsdRoots {
    Mat sqrt;
    Mat inv_sqrt;
};

inline PsdRoots psd_roots(const Mat& h, double floor = 1e-12)
{
    EigenData ed = hermitian_eig(0.5 * (h + h.adjoint()), 1e-12);
    RVec w = ed.eigenvalues.real();
    require(w.size() == 0 || w.minCoeff() > floor * std::max(1.0, w.maxCoeff()), ErrorKind::SingularRho,
            "matrix not strictly positive");
    RVec s = w.cwiseSqrt();
    PsdRoots out;
    out.sqrt = ed.eigenvectors * s.cast<cplx>().asDiagonal() * ed.eigenvectors.adjoint();
    out.inv_sqrt = ed.eigenvectors * s.cwiseInverse().cast<cplx>().asDiagonal() * ed.eigenvectors.adjoint();
    return out;
}

// unitary factor of the polar decomposition
inline Mat polar_unitary(const Mat& x)
{
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline cplx random_normal_c(std::mt19937_64& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    double re = nd(rng);
    double im = nd(rng);
    return {re, im};
}

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng)
{
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = random_normal_c(rng);
    return m;
}

inline Mat random_unitary(Eigen::Index d, std::mt19937_64& rng)
{
    Eigen::HouseholderQR<Mat> qr(random_matrix(d, d, rng));
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        cplx z = r(i, i);
        if (std::abs(z) > 0) q.col(i) *= z / std::abs(z);
    }
    return q;
}

} // namespace mpsedge
