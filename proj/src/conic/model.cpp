#include "irs/model.hpp"

#include <cmath>
#include <stdexcept>

namespace irs::conic {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;

void axpy(LinExpr& dst, double a, const LinExpr& src)
{
    if (a == 0.0) return;
    for (const auto& [i, v] : src.terms) dst.terms.emplace_back(i, a * v);
    dst.constant += a * src.constant;
}
} // namespace

LinExpr LinExpr::var(int idx, double coef)
{
    LinExpr e;
    e.terms.emplace_back(idx, coef);
    return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o)
{
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o)
{
    axpy(*this, -1.0, o);
    return *this;
}

LinExpr& LinExpr::operator*=(double a)
{
    for (auto& t : terms) t.second *= a;
    constant *= a;
    return *this;
}

double LinExpr::eval(const Eigen::VectorXd& x) const
{
    double v = constant;
    for (const auto& [i, c] : terms) v += c * x(i);
    return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }

CExpr operator+(CExpr a, const CExpr& b) { return a += b; }
CExpr operator-(CExpr a, const CExpr& b) { return a -= b; }
CExpr operator*(std::complex<double> c, const CExpr& e)
{
    CExpr r;
    axpy(r.re, c.real(), e.re);
    axpy(r.re, -c.imag(), e.im);
    axpy(r.im, c.imag(), e.re);
    axpy(r.im, c.real(), e.im);
    return r;
}

CExpr CVecVar::at(int i) const
{
    return {LinExpr::var(base + 2 * i), LinExpr::var(base + 2 * i + 1)};
}

CExpr CVecVar::inner(const Eigen::VectorXcd& a) const
{
    CExpr r;
    for (int i = 0; i < n; ++i) r += std::conj(a(i)) * at(i);
    return r;
}

Eigen::VectorXcd CVecVar::value(const Eigen::VectorXd& x) const
{
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = {x(base + 2 * i), x(base + 2 * i + 1)};
    return v;
}

int HermVar::diag(int j) const
{
    int p = base;
    for (int c = 0; c < j; ++c) p += 1 + 2 * (n - 1 - c);
    return p;
}

int HermVar::re(int i, int j) const { return diag(j) + 1 + 2 * (i - j - 1); }
int HermVar::im(int i, int j) const { return re(i, j) + 1; }

LinExpr HermVar::trace_with(const Eigen::MatrixXcd& C) const
{
    LinExpr e;
    for (int j = 0; j < n; ++j) {
        e.terms.emplace_back(diag(j), C(j, j).real());
        for (int i = j + 1; i < n; ++i) {
            e.terms.emplace_back(re(i, j), C(j, i).real() + C(i, j).real());
            e.terms.emplace_back(im(i, j), C(i, j).imag() - C(j, i).imag());
        }
    }
    return e;
}

LinExpr HermVar::trace() const
{
    LinExpr e;
    for (int j = 0; j < n; ++j) e.terms.emplace_back(diag(j), 1.0);
    return e;
}

Eigen::MatrixXcd HermVar::value(const Eigen::VectorXd& x) const
{
    Eigen::MatrixXcd X(n, n);
    for (int j = 0; j < n; ++j) {
        X(j, j) = x(diag(j));
        for (int i = j + 1; i < n; ++i) {
            X(i, j) = {x(re(i, j)), x(im(i, j))};
            X(j, i) = std::conj(X(i, j));
        }
    }
    return X;
}

HermAffine::HermAffine(int n) : n_(n), re_(static_cast<std::size_t>(n) * n), im_(re_.size()) {}

HermAffine HermAffine::from_var(const HermVar& v)
{
    HermAffine h(v.n);
    for (int j = 0; j < v.n; ++j) {
        h.re(j, j) = LinExpr::var(v.diag(j));
        for (int i = j + 1; i < v.n; ++i) {
            h.re(i, j) = LinExpr::var(v.re(i, j));
            h.im(i, j) = LinExpr::var(v.im(i, j));
        }
    }
    return h;
}

HermAffine HermAffine::constant(const Eigen::MatrixXcd& C)
{
    const int n = static_cast<int>(C.rows());
    HermAffine h(n);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
            h.re(i, j).constant = C(i, j).real();
            if (i > j) h.im(i, j).constant = C(i, j).imag();
        }
    return h;
}

HermAffine& HermAffine::operator+=(const HermAffine& o)
{
    if (o.n_ != n_) throw std::invalid_argument("HermAffine: order mismatch");
    for (std::size_t k = 0; k < re_.size(); ++k) {
        re_[k] += o.re_[k];
        im_[k] += o.im_[k];
    }
    return *this;
}

HermAffine& HermAffine::operator-=(const HermAffine& o)
{
    if (o.n_ != n_) throw std::invalid_argument("HermAffine: order mismatch");
    for (std::size_t k = 0; k < re_.size(); ++k) {
        re_[k] -= o.re_[k];
        im_[k] -= o.im_[k];
    }
    return *this;
}

HermAffine& HermAffine::operator*=(double a)
{
    for (std::size_t k = 0; k < re_.size(); ++k) {
        re_[k] *= a;
        im_[k] *= a;
    }
    return *this;
}

HermAffine& HermAffine::add_identity(const LinExpr& a)
{
    for (int j = 0; j < n_; ++j) re(j, j) += a;
    return *this;
}

HermAffine HermAffine::congruence(const Eigen::MatrixXcd& C) const
{
    if (C.rows() != n_) throw std::invalid_argument("HermAffine::congruence: size mismatch");
    const int r = static_cast<int>(C.cols());
    HermAffine out(r);
    auto add = [&](const Eigen::MatrixXcd& M, const LinExpr& coef) {
        if (coef.terms.empty() && coef.constant == 0.0) return;
        for (int b = 0; b < r; ++b)
            for (int a = b; a < r; ++a) {
                axpy(out.re(a, b), M(a, b).real(), coef);
                if (a > b) axpy(out.im(a, b), M(a, b).imag(), coef);
            }
    };
    const std::complex<double> I(0.0, 1.0);
    for (int j = 0; j < n_; ++j) {
        const Eigen::RowVectorXcd cj = C.row(j);
        add(cj.adjoint() * cj, re(j, j));
        for (int i = j + 1; i < n_; ++i) {
            const Eigen::RowVectorXcd ci = C.row(i);
            const Eigen::MatrixXcd P = ci.adjoint() * cj; // C^H e_i e_j^T C
            add(P + P.adjoint(), re(i, j));
            add(I * (P - P.adjoint()), im(i, j));
        }
    }
    return out;
}

LinExpr HermAffine::trace_with(const Eigen::MatrixXcd& C) const
{
    LinExpr e;
    for (int j = 0; j < n_; ++j) {
        axpy(e, C(j, j).real(), re(j, j));
        for (int i = j + 1; i < n_; ++i) {
            axpy(e, C(j, i).real() + C(i, j).real(), re(i, j));
            axpy(e, C(i, j).imag() - C(j, i).imag(), im(i, j));
        }
    }
    return e;
}

LinExpr HermAffine::trace() const
{
    LinExpr e;
    for (int j = 0; j < n_; ++j) e += re(j, j);
    return e;
}

std::vector<LinExpr> HermAffine::vectorized() const
{
    std::vector<LinExpr> v;
    v.reserve(static_cast<std::size_t>(n_) * n_);
    for (int j = 0; j < n_; ++j) {
        v.push_back(re(j, j));
        for (int i = j + 1; i < n_; ++i) {
            v.push_back(kSqrt2 * re(i, j));
            v.push_back(kSqrt2 * im(i, j));
        }
    }
    return v;
}

HermAffine HermAffine::block(const HermAffine& X, const std::vector<std::vector<CExpr>>& B,
                             const HermAffine& D)
{
    const int n = X.order();
    const int r = D.order();
    HermAffine out(n + r);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
            out.re(i, j) = X.re(i, j);
            out.im(i, j) = X.im(i, j);
        }
    for (int j = 0; j < r; ++j)
        for (int i = j; i < r; ++i) {
            out.re(n + i, n + j) = D.re(i, j);
            out.im(n + i, n + j) = D.im(i, j);
        }
    // lower-left block is B^H
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < n; ++b) {
            out.re(n + a, b) = B[b][a].re;
            out.im(n + a, b) = -B[b][a].im;
        }
    return out;
}

int Model::add_var() { return nvars_++; }

std::vector<int> Model::add_vars(int n)
{
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = nvars_++;
    return v;
}

HermVar Model::add_hermitian(int n)
{
    HermVar h{n, nvars_};
    nvars_ += n * n;
    return h;
}

CVecVar Model::add_cvec(int n)
{
    CVecVar v{n, nvars_};
    nvars_ += 2 * n;
    return v;
}

void Model::add_ge(const LinExpr& e) { ge_.push_back(e); }
void Model::add_eq(const LinExpr& e) { eq_.push_back(e); }

void Model::add_soc(const LinExpr& t, const std::vector<LinExpr>& v)
{
    std::vector<LinExpr> rows;
    rows.reserve(v.size() + 1);
    rows.push_back(t);
    rows.insert(rows.end(), v.begin(), v.end());
    soc_.push_back(std::move(rows));
}

void Model::add_rotated_soc(const LinExpr& a, const LinExpr& b, const std::vector<LinExpr>& v)
{
    std::vector<LinExpr> rows;
    rows.reserve(v.size() + 1);
    for (const auto& e : v) rows.push_back(2.0 * e);
    rows.push_back(a - b);
    add_soc(a + b, rows);
}

void Model::add_psd(const HermAffine& X) { psd_.emplace_back(X.order(), X.vectorized()); }

Problem Model::build() const
{
    Problem p;
    const int n = nvars_;
    p.c = Eigen::VectorXd::Zero(n);
    for (const auto& [i, v] : obj_.terms) p.c(i) += v;

    std::vector<const LinExpr*> rows;
    for (const auto& e : ge_) rows.push_back(&e);
    p.cones.nonneg = static_cast<int>(ge_.size());
    for (const auto& s : soc_) {
        p.cones.soc.push_back(static_cast<int>(s.size()));
        for (const auto& e : s) rows.push_back(&e);
    }
    for (const auto& [order, v] : psd_) {
        p.cones.hpsd.push_back(order);
        for (const auto& e : v) rows.push_back(&e);
    }
    const int m = static_cast<int>(rows.size());
    p.G = Eigen::MatrixXd::Zero(m, n);
    p.h = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < m; ++r) {
        for (const auto& [i, v] : rows[r]->terms) p.G(r, i) -= v;
        p.h(r) = rows[r]->constant;
    }
    const int q = static_cast<int>(eq_.size());
    p.A = Eigen::MatrixXd::Zero(q, n);
    p.b = Eigen::VectorXd::Zero(q);
    for (int r = 0; r < q; ++r) {
        for (const auto& [i, v] : eq_[r].terms) p.A(r, i) += v;
        p.b(r) = -eq_[r].constant;
    }
    return p;
}

ModelResult Model::solve(const Settings& st) const
{
    ModelResult r;
    r.raw = conic::solve(build(), st);
    r.status = r.raw.status;
    r.x = r.raw.x;
    r.objective = r.raw.primal_objective + obj_.constant;
    return r;
}

} // namespace irs::conic
