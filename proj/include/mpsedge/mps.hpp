#pragma once

#include <string>
#include <vector>

#include "numerics.hpp"

namespace mpsedge {

enum class Direction { L, R };

inline const char* direction_name(Direction d) { return d == Direction::L ? "L" : "R"; }

class MpsTuple {
public:
    MpsTuple() = default;

    explicit MpsTuple(std::vector<Mat> matrices) : m_(std::move(matrices))
    {
        require(m_.size() >= 2, ErrorKind::InvalidArgument, "a tuple needs at least two matrices");
        const Eigen::Index d = m_.front().rows();
        require(d >= 1, ErrorKind::InvalidArgument, "bond dimension must be positive");
        for (const auto& a : m_) {
            require(a.rows() == d && a.cols() == d, ErrorKind::DimensionMismatch, "matrices must share a D x D shape");
            require(all_finite(a), ErrorKind::InvalidArgument, "non-finite matrix entry");
        }
    }

    int n() const { return static_cast<int>(m_.size()); }
    int D() const { return m_.empty() ? 0 : static_cast<int>(m_.front().rows()); }
    const Mat& operator[](int mu) const { return m_[static_cast<size_t>(mu)]; }
    const std::vector<Mat>& matrices() const { return m_; }

    Mat gram() const
    {
        Mat s = Mat::Zero(D(), D());
        for (const auto& a : m_) s += a * a.adjoint();
        return s;
    }

    bool normalized(double tol = 1e-10) const { return (gram() - identity(D())).norm() <= tol; }

    MpsTuple similarity(const Mat& s, const Mat& s_inv) const
    {
        std::vector<Mat> out;
        for (const auto& a : m_) out.push_back(s * a * s_inv);
        return MpsTuple(std::move(out));
    }

    MpsTuple similarity(const Mat& s) const { return similarity(s, s.inverse()); }

    MpsTuple compress(const Mat& q) const
    {
        std::vector<Mat> out;
        for (const auto& a : m_) out.push_back(q.adjoint() * a * q);
        return MpsTuple(std::move(out));
    }

    MpsTuple transpose() const
    {
        std::vector<Mat> out;
        for (const auto& a : m_) out.push_back(a.transpose());
        return MpsTuple(std::move(out));
    }

    MpsTuple scaled(cplx c) const
    {
        std::vector<Mat> out;
        for (const auto& a : m_) out.push_back(c * a);
        return MpsTuple(std::move(out));
    }

    bool operator==(const MpsTuple& o) const
    {
        if (m_.size() != o.m_.size()) return false;
        for (size_t i = 0; i < m_.size(); ++i)
            if (m_[i].rows() != o.m_[i].rows() || m_[i] != o.m_[i]) return false;
        return true;
    }

private:
    std::vector<Mat> m_;
};

inline Mat apply_transfer(const MpsTuple& v, const Mat& x)
{
    Mat out = Mat::Zero(v.D(), v.D());
    for (int mu = 0; mu < v.n(); ++mu) out += v[mu] * x * v[mu].adjoint();
    return out;
}

inline Mat apply_dual_transfer(const MpsTuple& v, const Mat& x)
{
    Mat out = Mat::Zero(v.D(), v.D());
    for (int mu = 0; mu < v.n(); ++mu) out += v[mu].adjoint() * x * v[mu];
    return out;
}

// R: X -> sum v X v*, L: X -> sum v* X v; both on row-major vec
inline Mat transfer_matrix(const MpsTuple& v, Direction dir = Direction::R)
{
    const int d = v.D();
    Mat t = Mat::Zero(d * d, d * d);
    for (int mu = 0; mu < v.n(); ++mu) {
        if (dir == Direction::R)
            t += kron(v[mu], v[mu].conjugate());
        else
            t += kron(v[mu].adjoint(), v[mu].transpose());
    }
    return t;
}

inline long long checked_pow(int n, int l, long long cap)
{
    long long p = 1;
    for (int i = 0; i < l; ++i) {
        p *= n;
        if (p > cap) fail(ErrorKind::TooLarge, "n^l exceeds " + std::to_string(cap));
    }
    return p;
}

// word = (mu_1, ..., mu_l), site 0 first
inline Mat word_product(const MpsTuple& v, const std::vector<int>& word)
{
    Mat p = identity(v.D());
    for (int mu : word) p = p * v[mu];
    return p;
}

inline std::vector<int> word_digits(long long index, int n, int l)
{
    std::vector<int> w(static_cast<size_t>(l));
    for (int i = l - 1; i >= 0; --i) {
        w[static_cast<size_t>(i)] = static_cast<int>(index % n);
        index /= n;
    }
    return w;
}

inline constexpr long long max_words = 1LL << 22;

// all products of length l, ordered big-endian; direction L reverses each word
inline std::vector<Mat> word_products(const MpsTuple& v, int l, Direction dir = Direction::R)
{
    require(l >= 1, ErrorKind::InvalidArgument, "word length must be >= 1");
    checked_pow(v.n(), l, max_words);
    std::vector<Mat> cur(v.matrices());
    for (int step = 1; step < l; ++step) {
        std::vector<Mat> next;
        next.reserve(cur.size() * static_cast<size_t>(v.n()));
        for (const auto& p : cur)
            for (int mu = 0; mu < v.n(); ++mu) next.push_back(dir == Direction::R ? Mat(p * v[mu]) : Mat(v[mu] * p));
        cur.swap(next);
    }
    return cur;
}

// rows: words; columns: row-major matrix units. gamma(X) = M * vec(X)
inline Mat gamma_matrix(const MpsTuple& v, int l, Direction dir = Direction::R)
{
    auto words = word_products(v, l, dir);
    const int d2 = v.D() * v.D();
    Mat m(static_cast<Eigen::Index>(words.size()), d2);
    for (size_t w = 0; w < words.size(); ++w) m.row(static_cast<Eigen::Index>(w)) = vec(words[w]).conjugate().transpose();
    return m;
}

inline Vec gamma_map(const MpsTuple& v, int l, const Mat& x, Direction dir = Direction::R)
{
    require(x.rows() == v.D() && x.cols() == v.D(), ErrorKind::DimensionMismatch, "X must be D x D");
    require(l >= 1, ErrorKind::InvalidArgument, "word length must be >= 1");
    return gamma_matrix(v, l, dir) * vec(x);
}

struct KernelSpaceBasis {
    int l = 0;
    int dim = 0;
    Mat basis;  // D^2 x dim, columns are row-major vec of orthonormal matrices
    double word_gram_condition = 0.0;
    RVec singular_values;  // of the last spanning step, descending

    Mat element(int i, int d) const { return unvec(basis.col(i), d, d); }
};

inline KernelSpaceBasis kernel_space(const MpsTuple& v, int l, double tol = default_rank_tol)
{
    require(l >= 1, ErrorKind::InvalidArgument, "word length must be >= 1");
    const int d = v.D();
    Mat cols(d * d, v.n());
    for (int mu = 0; mu < v.n(); ++mu) cols.col(mu) = vec(v[mu]);
    Span s = orthonormal_span(cols, tol);
    // carry the singular values so every step sees the word Gram matrix, not a renormalized basis
    for (int step = 1; step < l; ++step) {
        Mat next(d * d, static_cast<Eigen::Index>(v.n()) * s.rank);
        for (int i = 0; i < s.rank; ++i) {
            const Mat x = unvec(s.basis.col(i), d, d) * (s.singular_values(i) / s.singular_values(0));
            for (int mu = 0; mu < v.n(); ++mu) next.col(mu * s.rank + i) = vec(v[mu] * x);
        }
        s = orthonormal_span(next, tol);
    }
    KernelSpaceBasis out;
    out.l = l;
    out.dim = s.rank;
    out.basis = s.basis;
    out.word_gram_condition = s.rank > 0 ? s.singular_values(s.rank - 1) : 0.0;
    out.singular_values = s.singular_values;
    return out;
}

// orthonormal basis of Ran gamma_l, the finite-window support
inline Span support_basis(const MpsTuple& v, int l, Direction dir = Direction::R, double tol = default_rank_tol)
{
    return orthonormal_span(gamma_matrix(v, l, dir), tol);
}

inline constexpr long long max_chain_dim = 16384;

inline Mat support_projection(const MpsTuple& v, int l, Direction dir = Direction::R, double tol = default_rank_tol)
{
    checked_pow(v.n(), l, max_chain_dim);
    Span s = support_basis(v, l, dir, tol);
    return s.basis * s.basis.adjoint();
}

} // namespace mpsedge
