#pragma once

#include <cstdint>
#include <random>

#include "canonical.hpp"

// Reference tuples and generators shared by tests, the acceptance run and the CLI.
namespace mpsedge::samples {

inline Mat m2(cplx a, cplx b, cplx c, cplx d)
{
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Mat pauli_x() { return m2(0, 1, 1, 0); }
inline Mat pauli_y() { return m2(0, cplx(0, -1), cplx(0, 1), 0); }
inline Mat pauli_z() { return m2(1, 0, 0, -1); }

inline MpsTuple ghz() { return MpsTuple({unit(2, 0, 0), unit(2, 1, 1)}); }

inline MpsTuple pauli()
{
    const double s = 1.0 / std::sqrt(3.0);
    return MpsTuple({s * pauli_x(), s * pauli_y(), s * pauli_z()});
}

inline MpsTuple period_two()
{
    const double s = 1.0 / std::sqrt(2.0);
    return MpsTuple({s * pauli_x(), s * pauli_z()});
}

inline MpsTuple scalar(cplx a, cplx b)
{
    Mat x(1, 1), y(1, 1);
    x << a;
    y << b;
    return MpsTuple({x, y});
}

// spin-1 AKLT tensor in the S^z basis (+, 0, -)
inline MpsTuple aklt()
{
    return MpsTuple({std::sqrt(2.0 / 3.0) * unit(2, 0, 1), -std::sqrt(1.0 / 3.0) * pauli_z(), -std::sqrt(2.0 / 3.0) * unit(2, 1, 0)});
}

inline Mat scalar_mat(cplx z)
{
    Mat m(1, 1);
    m << z;
    return m;
}

// n0 = 1, kR = 1, kL = 0, lambda_{-1} = 1/2, x^R = (1, -1)
inline ClassAData toy_classa()
{
    ClassAData d;
    d.n = 2;
    d.n0 = 1;
    d.kR = 1;
    d.kL = 0;
    d.lambda = {0.5, 1.0};
    const double s = 1.0 / std::sqrt(2.0);
    d.omega = MpsTuple({scalar_mat(s), scalar_mat(s)});
    d.D = {unit(2, 0, 1)};
    d.Y = Mat::Zero(2, 2);
    d.xR = {{scalar_mat(1.0)}, {scalar_mat(-1.0)}};
    d.xL = {{}, {}};
    return assemble_classa(d);
}

// n0 = 1, kR = kL = 1
inline ClassAData four_corner_classa()
{
    ClassAData d;
    d.n = 2;
    d.n0 = 1;
    d.kR = 1;
    d.kL = 1;
    d.lambda = {0.5, 1.0, 0.4};
    const double s = 1.0 / std::sqrt(2.0);
    d.omega = MpsTuple({scalar_mat(s), scalar_mat(s)});
    d.D = {unit(3, 0, 1)};
    d.G = {unit(3, 1, 2)};
    d.Y = Mat::Zero(3, 3);
    d.xR = {{scalar_mat(1.0)}, {scalar_mat(-1.0)}};
    d.xL = {{scalar_mat(0.5)}, {scalar_mat(-0.5)}};
    return assemble_classa(d);
}

// random unital primitive tuple of bond dimension n0
inline MpsTuple random_primitive(int n, int n0, std::mt19937_64& rng)
{
    for (;;) {
        std::vector<Mat> a;
        for (int mu = 0; mu < n; ++mu) a.push_back(random_matrix(n0, n0, rng));
        MpsTuple t(a);
        PsdRoots g = psd_roots(t.gram());
        std::vector<Mat> u;
        for (const auto& m : a) u.push_back(g.inv_sqrt * m);
        MpsTuple out(std::move(u));
        if (peripheral_structure(out).primitive) return out;
    }
}

struct RandomClassAOptions {
    int n = 2;
    int n0 = 1;
    int kR = 1;
    int kL = 1;
    bool ladder = false;   // D_1 D_1 = D_2 with lambda_{-2} = lambda_{-1}^2 (needs kR = 2)
    bool jordan = false;   // Y = y E_{-2,-1} with lambda_{-2} = lambda_{-1} (needs kR = 2)
};

inline cplx random_lambda(std::mt19937_64& rng, double lo = 0.25, double hi = 0.8)
{
    std::uniform_real_distribution<double> mod(lo, hi), ph(0.0, 2 * M_PI);
    return std::polar(mod(rng), ph(rng));
}

inline ClassAData random_classa(const RandomClassAOptions& o, std::mt19937_64& rng)
{
    ClassAData d;
    d.n = o.n;
    d.n0 = o.n0;
    d.kR = o.kR;
    d.kL = o.kL;
    const int K = d.K();
    std::vector<cplx> right{1.0}, left{1.0};
    for (int a = 1; a <= o.kR; ++a) right.push_back(random_lambda(rng));
    for (int b = 1; b <= o.kL; ++b) left.push_back(random_lambda(rng));
    if (o.ladder && o.kR == 2) right[2] = right[1] * right[1];
    if (o.jordan && o.kR == 2) right[2] = right[1];
    auto weyl_sort = [](std::vector<cplx>& side) {
        std::stable_sort(side.begin() + 1, side.end(), [](cplx a, cplx b) { return weyl_before(a, b); });
    };
    weyl_sort(right);
    weyl_sort(left);
    d.lambda.assign(static_cast<size_t>(K), 1.0);
    for (int a = 1; a <= o.kR; ++a) d.lambda[static_cast<size_t>(d.pos(-a))] = right[static_cast<size_t>(a)];
    for (int b = 1; b <= o.kL; ++b) d.lambda[static_cast<size_t>(d.pos(b))] = left[static_cast<size_t>(b)];
    for (int a = 1; a <= o.kR; ++a) d.D.push_back(unit(K, d.pos(-a), d.pos(0)));
    for (int b = 1; b <= o.kL; ++b) d.G.push_back(unit(K, d.pos(0), d.pos(b)));
    if (o.ladder && o.kR == 2) d.D[0] += unit(K, d.pos(-2), d.pos(-1));
    d.Y = Mat::Zero(K, K);
    if (o.jordan && o.kR == 2) d.Y(d.pos(-2), d.pos(-1)) = random_normal_c(rng);
    d.omega = random_primitive(o.n, o.n0, rng);
    d.xR.assign(static_cast<size_t>(o.n), {});
    d.xL.assign(static_cast<size_t>(o.n), {});
    for (int mu = 0; mu < o.n; ++mu) {
        for (int a = 1; a <= o.kR; ++a) d.xR[static_cast<size_t>(mu)].push_back(random_matrix(o.n0, o.n0, rng));
        for (int b = 1; b <= o.kL; ++b) d.xL[static_cast<size_t>(mu)].push_back(random_matrix(o.n0, o.n0, rng));
    }
    return assemble_classa(d);
}

// random invertible similarity that is block upper triangular in the position order
inline Mat random_block_triangular(int n0, int K, std::mt19937_64& rng)
{
    Mat s = Mat::Zero(n0 * K, n0 * K);
    for (int p = 0; p < K; ++p)
        for (int q = p; q < K; ++q) {
            Mat blk = random_matrix(n0, n0, rng);
            if (p == q) blk += 2.0 * identity(n0);
            else blk *= 0.5;
            for (int al = 0; al < n0; ++al)
                for (int be = 0; be < n0; ++be) s(al * K + p, be * K + q) = blk(al, be);
        }
    return s;
}

} // namespace mpsedge::samples
