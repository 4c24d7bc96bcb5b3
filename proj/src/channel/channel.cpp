#include "irs/channel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <ostream>

namespace irs {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

using cd = std::complex<double>;

VectorXcd cn_vector(std::mt19937_64& rng, int n, double var = 1.0)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        const double re = nd(rng);
        v(i) = cd(re, nd(rng));
    }
    return v;
}

MatrixXcd cn_matrix(std::mt19937_64& rng, int r, int c, double var = 1.0)
{
    MatrixXcd m(r, c);
    for (int j = 0; j < c; ++j) m.col(j) = cn_vector(rng, r, var);
    return m;
}

double angle_of(const Point& from, const Point& to) { return std::atan2(to.y - from.y, to.x - from.x); }

MatrixXcd sqrt_correlation(int n, double r)
{
    if (r == 0.0 || n <= 1) return MatrixXcd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(exp_correlation(n, r));
    return es.operatorSqrt().cast<cd>();
}

struct Link {
    double gain;
    double kfactor;
};

// Transmit array response `a` (n elements), single-antenna receiver.
VectorXcd vector_channel(const Link& l, const VectorXcd& a, const MatrixXcd& Rs, std::mt19937_64& rng)
{
    const double los = std::sqrt(l.kfactor / (l.kfactor + 1.0));
    const double nlos = std::sqrt(1.0 / (l.kfactor + 1.0));
    const VectorXcd w = cn_vector(rng, static_cast<int>(a.size()));
    return std::sqrt(l.gain) * (los * a + nlos * (Rs * w));
}

MatrixXcd matrix_channel(const Link& l, const VectorXcd& ar, const VectorXcd& at, const MatrixXcd& Rr,
                         const MatrixXcd& Rt, std::mt19937_64& rng)
{
    const double los = std::sqrt(l.kfactor / (l.kfactor + 1.0));
    const double nlos = std::sqrt(1.0 / (l.kfactor + 1.0));
    const MatrixXcd W = cn_matrix(rng, static_cast<int>(ar.size()), static_cast<int>(at.size()));
    return std::sqrt(l.gain) * (los * ar * at.adjoint() + nlos * (Rr * W * Rt));
}

} // namespace

VectorXcd ula_response(int n, double angle)
{
    VectorXcd a(n);
    for (int m = 0; m < n; ++m) a(m) = std::polar(1.0, std::numbers::pi * m * std::cos(angle));
    return a;
}

VectorXcd ura_response(int n, double angle)
{
    const int nh = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    VectorXcd a(n);
    for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, std::numbers::pi * (i % nh) * std::cos(angle));
    return a;
}

MatrixXd exp_correlation(int n, double r)
{
    MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = std::pow(r, std::abs(i - j));
    return R;
}

ChannelSet synthesize(const ScenarioConfig& cfg, const Positions& pos, std::mt19937_64& rng)
{
    const int M = cfg.M, L = cfg.L, N = cfg.N;
    const MatrixXcd Rm = sqrt_correlation(M, cfg.corr);
    const MatrixXcd Rl = sqrt_correlation(L, cfg.corr);
    const MatrixXcd Rn = sqrt_correlation(N, cfg.corr);
    const PathLoss& pl = cfg.pathloss;
    auto vlink = [&](const Point& a, const Point& b, double alpha) {
        return Link{pl.gain(distance(a, b), alpha), cfg.kappa};
    };

    ChannelSet s;
    // Fixed draw order keeps realizations reproducible across versions.
    for (const Point& sr : pos.sr) {
        const Link l = vlink(pos.st, sr, pl.alpha_rx);
        s.gain_hd.push_back(l.gain);
        s.h_d.push_back(vector_channel(l, ula_response(M, angle_of(pos.st, sr)), Rm, rng));
    }
    for (const Point& pr : pos.pr) {
        const Link l = vlink(pos.st, pr, pl.alpha_rx);
        s.gain_vd.push_back(l.gain);
        s.v_d.push_back(vector_channel(l, ula_response(M, angle_of(pos.st, pr)), Rm, rng));
    }
    for (const Point& pr : pos.pr)
        s.g_d.push_back(vector_channel(vlink(pos.pt, pr, pl.alpha_rx),
                                       ula_response(L, angle_of(pos.pt, pr)), Rl, rng));
    for (const Point& sr : pos.sr)
        s.u_d.push_back(vector_channel(vlink(pos.pt, sr, pl.alpha_rx),
                                       ula_response(L, angle_of(pos.pt, sr)), Rl, rng));
    for (const Point& sr : pos.sr) {
        const Link l = vlink(pos.irs, sr, pl.alpha_irs);
        s.gain_hr.push_back(l.gain);
        s.h_r.push_back(vector_channel(l, ura_response(N, angle_of(pos.irs, sr)), Rn, rng));
    }
    for (const Point& pr : pos.pr) {
        const Link l = vlink(pos.irs, pr, pl.alpha_irs);
        s.gain_gr.push_back(l.gain);
        s.g_r.push_back(vector_channel(l, ura_response(N, angle_of(pos.irs, pr)), Rn, rng));
    }
    {
        const Link l{pl.gain(distance(pos.st, pos.irs), pl.alpha_irs), cfg.varpi};
        s.gain_H = l.gain;
        s.H = matrix_channel(l, ura_response(N, angle_of(pos.irs, pos.st)),
                             ula_response(M, angle_of(pos.st, pos.irs)), Rn, Rm, rng);
    }
    {
        const Link l{pl.gain(distance(pos.pt, pos.irs), pl.alpha_irs), cfg.varpi};
        s.gain_G = l.gain;
        s.G = matrix_channel(l, ura_response(N, angle_of(pos.irs, pos.pt)),
                             ula_response(L, angle_of(pos.pt, pos.irs)), Rn, Rl, rng);
    }
    return cascade(std::move(s));
}

ChannelSet cascade(ChannelSet s)
{
    auto dg = [](const VectorXcd& r) { return r.conjugate().asDiagonal(); };
    s.Hk.clear();
    s.Vu.clear();
    s.Gu.clear();
    s.Uk.clear();
    for (const auto& hr : s.h_r) {
        s.Hk.push_back(dg(hr) * s.H);
        s.Uk.push_back(dg(hr) * s.G);
    }
    for (const auto& gr : s.g_r) {
        s.Vu.push_back(dg(gr) * s.H);
        s.Gu.push_back(dg(gr) * s.G);
    }
    return s;
}

bool is_unit_modulus(const VectorXcd& v, double tol)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(std::abs(v(i)) - 1.0) > tol) return false;
    return true;
}

EffectiveChannels effective(const ChannelSet& s, const VectorXcd& ups)
{
    if (ups.size() != s.N()) throw std::invalid_argument("effective: reflect vector has wrong length");
    if (!is_unit_modulus(ups)) throw NonUnitModulus("effective: reflect vector is not unit modulus");
    EffectiveChannels e;
    for (int k = 0; k < s.K(); ++k) {
        e.h.push_back(s.h_d[k] + s.Hk[k].adjoint() * ups);
        e.u.push_back(s.u_d[k] + s.Uk[k].adjoint() * ups);
    }
    for (int u = 0; u < s.U(); ++u) {
        e.v.push_back(s.v_d[u] + s.Vu[u].adjoint() * ups);
        e.g.push_back(s.g_d[u] + s.Gu[u].adjoint() * ups);
    }
    return e;
}

EffectiveChannels direct_only(const ChannelSet& s)
{
    return {s.h_d, s.v_d, s.g_d, s.u_d};
}

ErrorVariances error_variances(const ChannelSet& s, const CsiErrors& m)
{
    ErrorVariances v;
    for (int k = 0; k < s.K(); ++k) {
        v.hd.push_back(m.eps2_hd * (m.relative ? s.gain_hd[k] : 1.0));
        v.Hk.push_back(m.eps2_Hk * (m.relative ? s.gain_H * s.gain_hr[k] : 1.0));
    }
    for (int u = 0; u < s.U(); ++u) {
        v.vd.push_back(m.eps2_vd * (m.relative ? s.gain_vd[u] : 1.0));
        v.Vu.push_back(m.eps2_Vu * (m.relative ? s.gain_H * s.gain_gr[u] : 1.0));
        v.Gu.push_back(m.eps2_Gu * (m.relative ? s.gain_G * s.gain_gr[u] : 1.0));
    }
    return v;
}

namespace {

ChannelSet draw_errors(const ChannelSet& s, const ErrorVariances& v, std::mt19937_64& rng)
{
    ChannelSet d;
    const int M = s.M(), L = s.L(), N = s.N();
    d.H = MatrixXcd::Zero(N, M);
    d.G = MatrixXcd::Zero(N, L);
    for (int k = 0; k < s.K(); ++k) {
        d.h_d.push_back(v.hd[k] > 0.0 ? cn_vector(rng, M, v.hd[k]) : VectorXcd::Zero(M));
        d.Hk.push_back(v.Hk[k] > 0.0 ? cn_matrix(rng, N, M, v.Hk[k]) : MatrixXcd::Zero(N, M));
    }
    for (int u = 0; u < s.U(); ++u) {
        d.v_d.push_back(v.vd[u] > 0.0 ? cn_vector(rng, M, v.vd[u]) : VectorXcd::Zero(M));
        d.Vu.push_back(v.Vu[u] > 0.0 ? cn_matrix(rng, N, M, v.Vu[u]) : MatrixXcd::Zero(N, M));
        d.Gu.push_back(v.Gu[u] > 0.0 ? cn_matrix(rng, N, L, v.Gu[u]) : MatrixXcd::Zero(N, L));
    }
    return d;
}

void add_errors(ChannelSet& s, const ChannelSet& d, double sign)
{
    for (int k = 0; k < s.K(); ++k) {
        s.h_d[k] += sign * d.h_d[k];
        s.Hk[k] += sign * d.Hk[k];
    }
    for (int u = 0; u < s.U(); ++u) {
        s.v_d[u] += sign * d.v_d[u];
        s.Vu[u] += sign * d.Vu[u];
        s.Gu[u] += sign * d.Gu[u];
    }
}

} // namespace

CsiDraw inject_errors(const ChannelSet& truth, const CsiErrors& model, std::mt19937_64& rng)
{
    CsiDraw out;
    out.error = draw_errors(truth, error_variances(truth, model), rng);
    out.estimate = truth;
    add_errors(out.estimate, out.error, -1.0);
    return out;
}

ChannelSet sample_truth(const ChannelSet& estimate, const ErrorVariances& var, std::mt19937_64& rng)
{
    ChannelSet t = estimate;
    add_errors(t, draw_errors(estimate, var, rng), 1.0);
    return t;
}

void dump(const ChannelSet& s, std::uint64_t seed, std::ostream& out)
{
    out.precision(17);
    out << "# channel M=" << s.M() << " L=" << s.L() << " N=" << s.N() << " K=" << s.K()
        << " U=" << s.U() << " seed=" << seed << '\n';
    auto mat = [&](const std::string& name, const MatrixXcd& m) {
        out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                out << m(i, j).real() << ' ' << m(i, j).imag() << '\n';
    };
    auto fam = [&](const std::string& name, const auto& v) {
        for (std::size_t i = 0; i < v.size(); ++i) mat(name + "[" + std::to_string(i) + "]", v[i]);
    };
    fam("h_d", s.h_d);
    fam("v_d", s.v_d);
    fam("g_d", s.g_d);
    fam("u_d", s.u_d);
    fam("h_r", s.h_r);
    fam("g_r", s.g_r);
    mat("H", s.H);
    mat("G", s.G);
}

} // namespace irs
