#pragma once

#include <optional>
#include <vector>

#include "mps.hpp"

namespace mpsedge {

struct TransferSpectrum {
    double radius = 0.0;
    Vec eigenvalues;
    Vec peripheral;
    int period = 0;  // 0 when the peripheral set is not r times the b-th roots of unity
    Mat perron;      // t, Hermitian, unit Frobenius norm, positive trace
    Mat rho;         // invariant state of the dual map, trace one
    int support_rank = 0;
    bool reducible = true;
    bool irreducible = false;
    bool primitive = false;
    Mat period_unitary;           // filled when irreducible with period > 1 (unital gauge)
    std::vector<Mat> projections; // Q_k, T(Q_k) = Q_{k-1}
};

namespace detail {

inline Mat hermitian_from_eigvec(const Vec& x, int d)
{
    Mat m = unvec(x, d, d);
    cplx tr = m.trace();
    if (std::abs(tr) > 1e-14) m *= std::conj(tr) / std::abs(tr);
    else {
        // traceless eigvector: fall back to the phase of the largest entry
        Eigen::Index i, j;
        m.cwiseAbs().maxCoeff(&i, &j);
        m *= std::conj(m(i, j)) / std::abs(m(i, j));
    }
    return 0.5 * (m + m.adjoint());
}

inline Eigen::Index closest_index(const Vec& ev, cplx target)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i)
        if (std::abs(ev(i) - target) < std::abs(ev(best) - target)) best = i;
    return best;
}

inline double min_eig(const Mat& h) { return hermitian_eig(0.5 * (h + h.adjoint()), 1e-8, false).eigenvalues.real().minCoeff(); }
inline double max_eig(const Mat& h) { return hermitian_eig(0.5 * (h + h.adjoint()), 1e-8, false).eigenvalues.real().maxCoeff(); }

} // namespace detail

// unital gauge u = r^{-1/2} t^{-1/2} v t^{1/2}
inline MpsTuple unital_gauge(const MpsTuple& v, double r, const Mat& t)
{
    PsdRoots rt = psd_roots(t);
    std::vector<Mat> out;
    for (int mu = 0; mu < v.n(); ++mu) out.push_back(rt.inv_sqrt * v[mu] * rt.sqrt / std::sqrt(r));
    return MpsTuple(std::move(out));
}

inline TransferSpectrum peripheral_structure(const MpsTuple& v, double tol = 1e-8)
{
    const int d = v.D();
    TransferSpectrum s;
    EigenData right = general_eig(transfer_matrix(v, Direction::R));
    s.eigenvalues = right.eigenvalues;
    s.radius = s.eigenvalues.cwiseAbs().maxCoeff();
    if (s.radius < 1e-300) return s;
    const double r = s.radius;

    std::vector<cplx> per;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
        if (std::abs(s.eigenvalues(i)) >= r * (1.0 - tol)) per.push_back(s.eigenvalues(i));
    // order by argument in [0, 2pi)
    auto arg2pi = [](cplx z) {
        double a = std::arg(z);
        return a < 0 ? a + 2 * M_PI : a;
    };
    std::stable_sort(per.begin(), per.end(), [&](cplx a, cplx b) { return arg2pi(a) < arg2pi(b); });
    s.peripheral = Eigen::Map<Vec>(per.data(), static_cast<Eigen::Index>(per.size()));

    int mult_r = 0;
    for (cplx z : per)
        if (std::abs(z - r) <= 1e-6 * r) ++mult_r;

    s.perron = detail::hermitian_from_eigvec(right.eigenvectors.col(detail::closest_index(right.eigenvalues, r)), d);
    s.perron /= s.perron.norm();
    EigenData left = general_eig(transfer_matrix(v, Direction::L));
    s.rho = detail::hermitian_from_eigvec(left.eigenvectors.col(detail::closest_index(left.eigenvalues, r)), d);
    s.rho /= s.rho.trace().real();

    EigenData rho_eig = hermitian_eig(s.rho, 1e-8, false);
    RVec rw = rho_eig.eigenvalues.real();
    s.support_rank = static_cast<int>((rw.array() > 1e-10 * rw.maxCoeff()).count());
    double t_min = detail::min_eig(s.perron) / detail::max_eig(s.perron);
    double rho_min = rw.minCoeff() / rw.maxCoeff();

    // peripheral set equals r times the b-th roots, each simple
    const int b = static_cast<int>(per.size());
    bool roots = b >= 1;
    for (int k = 0; k < b && roots; ++k)
        roots = std::abs(per[static_cast<size_t>(k)] - r * std::polar(1.0, 2 * M_PI * k / b)) <= 1e-6 * r;
    s.period = roots ? b : 0;

    s.irreducible = mult_r == 1 && t_min > 1e-10 && rho_min > 1e-10 && roots;
    s.reducible = !s.irreducible;
    s.primitive = s.irreducible && b == 1;

    if (s.irreducible && b > 1) {
        MpsTuple u = unital_gauge(v, r, s.perron);
        EigenData tu = general_eig(transfer_matrix(u, Direction::R));
        cplx z1 = std::polar(1.0, 2 * M_PI / b);
        Mat x = unvec(tu.eigenvectors.col(detail::closest_index(tu.eigenvalues, z1)), d, d);
        Mat uu = polar_unitary(x);
        Mat ub = identity(d);
        for (int j = 0; j < b; ++j) ub = ub * uu;
        cplx c = ub.trace() / static_cast<double>(d);
        uu *= std::pow(c, -1.0 / b);
        s.period_unitary = uu;
        std::vector<Mat> powers{identity(d)};
        for (int j = 1; j < b; ++j) powers.push_back(powers.back() * uu);
        for (int k = 0; k < b; ++k) {
            Mat q = Mat::Zero(d, d);
            for (int j = 0; j < b; ++j) q += std::polar(1.0, -2 * M_PI * j * k / b) * powers[static_cast<size_t>(j)];
            s.projections.push_back(q / static_cast<double>(b));
        }
        for (int k = 0; k < b; ++k) {
            Mat img = apply_transfer(u, s.projections[static_cast<size_t>(k)]);
            require((img - s.projections[static_cast<size_t>((k + b - 1) % b)]).norm() <= 1e-8, ErrorKind::ConvergenceFailure,
                    "period projections do not cycle");
        }
    }
    return s;
}

struct PerronData {
    double r = 0.0;
    Mat t;
    Mat rho;
};

inline PerronData perron_data(const MpsTuple& v)
{
    TransferSpectrum s = peripheral_structure(v);
    require(s.irreducible, ErrorKind::NotIrreducible, "transfer map is not irreducible");
    return {s.radius, s.perron, s.rho};
}

struct Intertwiner {
    Mat U;
    cplx c;
    double residual = 0.0;
};

inline double intertwiner_residual(const MpsTuple& v1, const MpsTuple& v2, const Mat& u, cplx c)
{
    double res = 0.0;
    for (int mu = 0; mu < v1.n(); ++mu) res = std::max(res, (u * v1[mu] - c * v2[mu] * u).norm());
    return res;
}

inline void fix_phase_matrix(Mat& u)
{
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j)
            if (std::abs(u(i, j)) > 1e-8) {
                u *= std::conj(u(i, j)) / std::abs(u(i, j));
                return;
            }
}

// U v1_mu = c v2_mu U with U unitary, |c| = 1
inline std::optional<Intertwiner> find_intertwiner(const MpsTuple& v1, const MpsTuple& v2, double tol = 1e-8)
{
    require(v1.n() == v2.n(), ErrorKind::DimensionMismatch, "tuples have different n");
    if (v1.D() != v2.D()) return std::nullopt;
    const int d = v1.D();
    PerronData p1 = perron_data(v1);
    Mat cross = Mat::Zero(d * d, d * d);
    for (int mu = 0; mu < v1.n(); ++mu) cross += kron(v2[mu], v1[mu].conjugate());
    EigenData ed = general_eig(cross);
    std::vector<Eigen::Index> order(static_cast<size_t>(ed.eigenvalues.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(ed.eigenvalues(a)) > std::abs(ed.eigenvalues(b)); });
    Mat t_inv = psd_roots(p1.t).inv_sqrt;
    t_inv = t_inv * t_inv;
    for (Eigen::Index idx : order) {
        cplx lam = ed.eigenvalues(idx);
        if (std::abs(lam) < p1.r * (1.0 - std::max(tol, 1e-6))) break;
        Mat x = unvec(ed.eigenvectors.col(idx), d, d);
        Mat u = polar_unitary(x * t_inv);
        fix_phase_matrix(u);
        cplx c = std::conj(lam) / std::abs(lam);
        double res = intertwiner_residual(v1, v2, u, c);
        if (res <= tol) return Intertwiner{u, c, res};
    }
    return std::nullopt;
}

struct AntiunitaryMatch {
    Mat U;          // J xi = W conj(U xi)
    Mat W;          // eigenbasis of rho
    RVec weights;   // eigenvalues of rho
    cplx c;
    MpsTuple transformed;  // conj(rho^{-1/2} omega_L* rho^{1/2}) in rho's eigenbasis
    double residual = 0.0;
};

inline MpsTuple antiunitary_transform(const MpsTuple& omega_l, const Mat& w, const RVec& p)
{
    RVec s = p.cwiseSqrt();
    std::vector<Mat> out;
    for (int mu = 0; mu < omega_l.n(); ++mu) {
        Mat a = w.adjoint() * omega_l[mu] * w;
        Mat x = s.cwiseInverse().cast<cplx>().asDiagonal() * a.adjoint() * s.cast<cplx>().asDiagonal();
        out.push_back(x.conjugate());
    }
    return MpsTuple(std::move(out));
}

inline std::optional<AntiunitaryMatch> find_antiunitary_match(const MpsTuple& omega_l, const MpsTuple& omega_r, const Mat& rho,
                                                              double tol = 1e-8)
{
    require(rho.rows() == omega_l.D() && rho.cols() == omega_l.D(), ErrorKind::DimensionMismatch, "rho shape");
    EigenData re = hermitian_eig(rho, 1e-10);
    RVec p = re.eigenvalues.real();
    require(p.minCoeff() > 1e-12 * std::max(1.0, p.maxCoeff()), ErrorKind::SingularRho, "rho must be strictly positive");
    require(peripheral_structure(omega_l).primitive, ErrorKind::NotPrimitive, "omega_L is not primitive");
    require(peripheral_structure(omega_r).primitive, ErrorKind::NotPrimitive, "omega_R is not primitive");
    Mat inv = apply_dual_transfer(omega_l, rho);
    require((inv - rho).norm() <= 1e-8 * std::max(1.0, rho.norm()), ErrorKind::InvalidArgument, "rho is not invariant for omega_L");
    MpsTuple tr = antiunitary_transform(omega_l, re.eigenvectors, p);
    auto it = find_intertwiner(omega_r, tr, tol);
    if (!it) return std::nullopt;
    AntiunitaryMatch m{it->U, re.eigenvectors, p, it->c, tr, 0.0};
    double res = 0.0;
    for (int mu = 0; mu < omega_r.n(); ++mu)
        res = std::max(res, (omega_r[mu] - m.c * m.U.adjoint() * tr[mu] * m.U).norm());
    m.residual = res;
    if (res > tol) return std::nullopt;
    return m;
}

// tuple and state that generate, from the left, the state right-generated by (omega, rho)
struct Reflected {
    MpsTuple tuple;
    Mat rho;
};

inline Reflected reflect_tuple(const MpsTuple& omega, const Mat& rho)
{
    EigenData re = hermitian_eig(rho, 1e-10);
    RVec p = re.eigenvalues.real();
    require(p.minCoeff() > 1e-12, ErrorKind::SingularRho, "rho must be strictly positive");
    RVec s = p.cwiseSqrt();
    std::vector<Mat> out;
    for (int mu = 0; mu < omega.n(); ++mu) {
        Mat a = re.eigenvectors.adjoint() * omega[mu] * re.eigenvectors;
        Mat x = s.cast<cplx>().asDiagonal() * a * s.cwiseInverse().cast<cplx>().asDiagonal();
        out.push_back(x.transpose());
    }
    return {MpsTuple(std::move(out)), Mat(p.cast<cplx>().asDiagonal())};
}

} // namespace mpsedge
