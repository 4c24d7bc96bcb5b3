#include "cones.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace irs::conic {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

int Cones::dim() const
{
    int d = nonneg;
    for (int q : soc) d += q;
    for (int n : hpsd) d += n * n;
    return d;
}

int Cones::degree() const
{
    int d = nonneg + static_cast<int>(soc.size());
    for (int n : hpsd) d += n;
    return d;
}

Eigen::VectorXd vec_hermitian(const Eigen::MatrixXcd& X)
{
    const Eigen::Index n = X.rows();
    Eigen::VectorXd v(n * n);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        v(k++) = X(j, j).real();
        for (Eigen::Index i = j + 1; i < n; ++i) {
            v(k++) = kSqrt2 * X(i, j).real();
            v(k++) = kSqrt2 * X(i, j).imag();
        }
    }
    return v;
}

Eigen::MatrixXcd mat_hermitian(const Eigen::Ref<const Eigen::VectorXd>& v, int n)
{
    Eigen::MatrixXcd X(n, n);
    Eigen::Index k = 0;
    for (int j = 0; j < n; ++j) {
        X(j, j) = v(k++);
        for (int i = j + 1; i < n; ++i) {
            const double re = v(k++) / kSqrt2;
            const double im = v(k++) / kSqrt2;
            X(i, j) = {re, im};
            X(j, i) = {re, -im};
        }
    }
    return X;
}

namespace detail {

namespace {

double soc_det(const Eigen::Ref<const Eigen::VectorXd>& v)
{
    const double t = v.tail(v.size() - 1).norm();
    return (v(0) - t) * (v(0) + t);
}

double psd_min_eig(const Eigen::MatrixXcd& X)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// Visits each cone block with its offset into the stacked vector.
template <class Orth, class Soc, class Psd>
void for_each_block(const Cones& cones, Orth&& orth, Soc&& soc, Psd&& psd)
{
    Eigen::Index off = 0;
    if (cones.nonneg > 0) orth(off, cones.nonneg);
    off += cones.nonneg;
    for (std::size_t i = 0; i < cones.soc.size(); ++i) {
        soc(i, off, cones.soc[i]);
        off += cones.soc[i];
    }
    for (std::size_t i = 0; i < cones.hpsd.size(); ++i) {
        const int n = cones.hpsd[i];
        psd(i, off, n);
        off += static_cast<Eigen::Index>(n) * n;
    }
}

// Hw v for the hyperbolic unit vector w (w'Jw = 1).
void soc_hyperbolic(const Eigen::VectorXd& w, Eigen::Ref<Eigen::VectorXd> v, bool inverse)
{
    const Eigen::Index m = v.size() - 1;
    const double w0 = w(0);
    const auto w1 = w.tail(m);
    const double v0 = v(0);
    const double w1v1 = w1.dot(v.tail(m));
    if (!inverse) {
        v(0) = w0 * v0 + w1v1;
        v.tail(m) += (v0 + w1v1 / (1.0 + w0)) * w1;
    } else {
        v(0) = w0 * v0 - w1v1;
        v.tail(m) += (-v0 + w1v1 / (1.0 + w0)) * w1;
    }
}

} // namespace

Eigen::VectorXd identity(const Cones& cones)
{
    Eigen::VectorXd e = Eigen::VectorXd::Zero(cones.dim());
    for_each_block(
        cones, [&](Eigen::Index off, int n) { e.segment(off, n).setOnes(); },
        [&](std::size_t, Eigen::Index off, int) { e(off) = 1.0; },
        [&](std::size_t, Eigen::Index off, int n) {
            e.segment(off, static_cast<Eigen::Index>(n) * n) =
                vec_hermitian(Eigen::MatrixXcd::Identity(n, n));
        });
    return e;
}

double max_violation(const Cones& cones, const Eigen::VectorXd& v)
{
    double t = -kInf;
    for_each_block(
        cones, [&](Eigen::Index off, int n) { t = std::max(t, -v.segment(off, n).minCoeff()); },
        [&](std::size_t, Eigen::Index off, int q) {
            t = std::max(t, v.segment(off + 1, q - 1).norm() - v(off));
        },
        [&](std::size_t, Eigen::Index off, int n) {
            t = std::max(t, -psd_min_eig(mat_hermitian(v.segment(off, n * n), n)));
        });
    return t;
}

bool compute_scaling(const Cones& cones, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                     Scaling& out)
{
    bool ok = true;
    out.soc.assign(cones.soc.size(), {});
    out.psd.assign(cones.hpsd.size(), {});
    out.d.resize(cones.nonneg);
    out.lambda.resize(s.size());

    for_each_block(
        cones,
        [&](Eigen::Index off, int n) {
            const auto ss = s.segment(off, n);
            const auto zz = z.segment(off, n);
            if (ss.minCoeff() <= 0.0 || zz.minCoeff() <= 0.0) {
                ok = false;
                return;
            }
            out.d = (ss.array() / zz.array()).sqrt().matrix();
            out.lambda.segment(off, n) = (ss.array() * zz.array()).sqrt().matrix();
        },
        [&](std::size_t i, Eigen::Index off, int q) {
            const Eigen::VectorXd ss = s.segment(off, q);
            const Eigen::VectorXd zz = z.segment(off, q);
            const double sd = soc_det(ss);
            const double zd = soc_det(zz);
            if (!(sd > 0.0) || !(zd > 0.0) || ss(0) <= 0.0 || zz(0) <= 0.0) {
                ok = false;
                return;
            }
            const double sn = std::sqrt(sd);
            const double zn = std::sqrt(zd);
            const Eigen::VectorXd sb = ss / sn;
            const Eigen::VectorXd zb = zz / zn;
            const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
            SocScaling& sc = out.soc[i];
            sc.beta = std::sqrt(sn / zn);
            sc.w.resize(q);
            sc.w(0) = (sb(0) + zb(0)) / (2.0 * gamma);
            sc.w.tail(q - 1) = (sb.tail(q - 1) - zb.tail(q - 1)) / (2.0 * gamma);
            Eigen::VectorXd lam = zz;
            soc_hyperbolic(sc.w, lam, false);
            out.lambda.segment(off, q) = sc.beta * lam;
        },
        [&](std::size_t i, Eigen::Index off, int n) {
            const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
            const Eigen::MatrixXcd S = mat_hermitian(s.segment(off, nn), n);
            const Eigen::MatrixXcd Z = mat_hermitian(z.segment(off, nn), n);
            Eigen::LLT<Eigen::MatrixXcd> ls(S);
            Eigen::LLT<Eigen::MatrixXcd> lz(Z);
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
                ok = false;
                return;
            }
            const Eigen::MatrixXcd Ls = ls.matrixL();
            const Eigen::MatrixXcd Lz = lz.matrixL();
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Lz.adjoint() * Ls,
                                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Eigen::VectorXd l = svd.singularValues();
            if (!(l.minCoeff() > 0.0)) {
                ok = false;
                return;
            }
            PsdScaling& sc = out.psd[i];
            sc.l = l;
            const Eigen::VectorXd isq = l.array().rsqrt().matrix();
            const Eigen::VectorXd sq = l.array().sqrt().matrix();
            sc.R = Ls * svd.matrixV() * isq.asDiagonal();
            const Eigen::MatrixXcd LsInv =
                Ls.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(n, n));
            sc.Rinv = sq.asDiagonal() * svd.matrixV().adjoint() * LsInv;
            out.lambda.segment(off, nn) =
                vec_hermitian(Eigen::MatrixXcd(l.cast<std::complex<double>>().asDiagonal()));
        });
    return ok;
}

namespace {

enum class Op { W, Wt, Winv, Winvt };

void apply(const Cones& cones, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v, Op op)
{
    for_each_block(
        cones,
        [&](Eigen::Index off, int n) {
            if (op == Op::W || op == Op::Wt)
                v.segment(off, n).array() *= sc.d.array();
            else
                v.segment(off, n).array() /= sc.d.array();
        },
        [&](std::size_t i, Eigen::Index off, int q) {
            const SocScaling& s = sc.soc[i];
            auto seg = v.segment(off, q);
            if (op == Op::W || op == Op::Wt) {
                soc_hyperbolic(s.w, seg, false);
                seg *= s.beta;
            } else {
                soc_hyperbolic(s.w, seg, true);
                seg /= s.beta;
            }
        },
        [&](std::size_t i, Eigen::Index off, int n) {
            const PsdScaling& s = sc.psd[i];
            const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
            const Eigen::MatrixXcd X = mat_hermitian(v.segment(off, nn), n);
            Eigen::MatrixXcd Y;
            switch (op) {
            case Op::W: Y = s.R.adjoint() * X * s.R; break;
            case Op::Wt: Y = s.R * X * s.R.adjoint(); break;
            case Op::Winv: Y = s.Rinv.adjoint() * X * s.Rinv; break;
            case Op::Winvt: Y = s.Rinv * X * s.Rinv.adjoint(); break;
            }
            v.segment(off, nn) = vec_hermitian(Y);
        });
}

} // namespace

void apply_W(const Cones& c, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v) { apply(c, sc, v, Op::W); }
void apply_Wt(const Cones& c, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v) { apply(c, sc, v, Op::Wt); }
void apply_Winv(const Cones& c, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v) { apply(c, sc, v, Op::Winv); }
void apply_Winvt(const Cones& c, const Scaling& sc, Eigen::Ref<Eigen::VectorXd> v) { apply(c, sc, v, Op::Winvt); }

Eigen::VectorXd jordan_product(const Cones& cones, const Eigen::VectorXd& u, const Eigen::VectorXd& v)
{
    Eigen::VectorXd r(u.size());
    for_each_block(
        cones,
        [&](Eigen::Index off, int n) {
            r.segment(off, n) = u.segment(off, n).cwiseProduct(v.segment(off, n));
        },
        [&](std::size_t, Eigen::Index off, int q) {
            r(off) = u.segment(off, q).dot(v.segment(off, q));
            r.segment(off + 1, q - 1) =
                u(off) * v.segment(off + 1, q - 1) + v(off) * u.segment(off + 1, q - 1);
        },
        [&](std::size_t, Eigen::Index off, int n) {
            const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
            const Eigen::MatrixXcd U = mat_hermitian(u.segment(off, nn), n);
            const Eigen::MatrixXcd V = mat_hermitian(v.segment(off, nn), n);
            r.segment(off, nn) = vec_hermitian(0.5 * (U * V + V * U));
        });
    return r;
}

Eigen::VectorXd inverse_product(const Cones& cones, const Scaling& sc, const Eigen::VectorXd& r)
{
    const Eigen::VectorXd& lam = sc.lambda;
    Eigen::VectorXd x(r.size());
    for_each_block(
        cones,
        [&](Eigen::Index off, int n) {
            x.segment(off, n) = r.segment(off, n).cwiseQuotient(lam.segment(off, n));
        },
        [&](std::size_t, Eigen::Index off, int q) {
            const auto l = lam.segment(off, q);
            const auto rr = r.segment(off, q);
            const double det = soc_det(l);
            const double x0 = (l(0) * rr(0) - l.tail(q - 1).dot(rr.tail(q - 1))) / det;
            x(off) = x0;
            x.segment(off + 1, q - 1) = (rr.tail(q - 1) - x0 * l.tail(q - 1)) / l(0);
        },
        [&](std::size_t i, Eigen::Index off, int n) {
            const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
            const Eigen::VectorXd& l = sc.psd[i].l;
            Eigen::MatrixXcd R = mat_hermitian(r.segment(off, nn), n);
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a) R(a, b) *= 2.0 / (l(a) + l(b));
            x.segment(off, nn) = vec_hermitian(R);
        });
    return x;
}

double max_step(const Cones& cones, const Scaling& sc, const Eigen::VectorXd& d)
{
    const Eigen::VectorXd& lam = sc.lambda;
    double alpha = kInf;
    for_each_block(
        cones,
        [&](Eigen::Index off, int n) {
            for (Eigen::Index i = off; i < off + n; ++i)
                if (d(i) < 0.0) alpha = std::min(alpha, -lam(i) / d(i));
        },
        [&](std::size_t, Eigen::Index off, int q) {
            const auto l = lam.segment(off, q);
            const auto dd = d.segment(off, q);
            const double a = dd(0) * dd(0) - dd.tail(q - 1).squaredNorm();
            const double b = 2.0 * (l(0) * dd(0) - l.tail(q - 1).dot(dd.tail(q - 1)));
            const double c = soc_det(l);
            double root = kInf;
            if (std::abs(a) <= 1e-300) {
                if (b < 0.0) root = -c / b;
            } else {
                const double disc = b * b - 4.0 * a * c;
                if (disc >= 0.0) {
                    const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
                    const double r1 = qq / a;
                    const double r2 = (qq != 0.0) ? c / qq : kInf;
                    for (double r : {r1, r2})
                        if (r > 0.0) root = std::min(root, r);
                }
            }
            alpha = std::min(alpha, root);
        },
        [&](std::size_t i, Eigen::Index off, int n) {
            const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
            const Eigen::VectorXd& l = sc.psd[i].l;
            Eigen::MatrixXcd D = mat_hermitian(d.segment(off, nn), n);
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a) D(a, b) /= std::sqrt(l(a) * l(b));
            const double m = psd_min_eig(D);
            if (m < 0.0) alpha = std::min(alpha, -1.0 / m);
        });
    return alpha;
}

} // namespace detail
} // namespace irs::conic
