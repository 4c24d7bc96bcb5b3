#pragma once

// Small modelling layer on top of conic::solve. Variables are real scalars;
// Hermitian matrix variables are parametrized by their diagonal and the real and
// imaginary parts of the strictly lower triangle. Constraints are collected as
// affine expressions and assembled into a dense Problem on build().

#include "irs/conic.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace irs::conic {

struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double c) : constant(c) {} // NOLINT implicit on purpose
    static LinExpr var(int idx, double coef = 1.0);

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr& operator*=(double a);
    double eval(const Eigen::VectorXd& x) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);

// Complex scalar affine in the real variables.
struct CExpr {
    LinExpr re, im;
    CExpr& operator+=(const CExpr& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    CExpr& operator-=(const CExpr& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }
};
CExpr operator+(CExpr a, const CExpr& b);
CExpr operator-(CExpr a, const CExpr& b);
CExpr operator*(std::complex<double> c, const CExpr& e);

// Complex vector variable stored as consecutive (re, im) pairs.
struct CVecVar {
    int n = 0;
    int base = 0;
    CExpr at(int i) const;
    // sum_i conj(a_i) v_i, i.e. a^H v
    CExpr inner(const Eigen::VectorXcd& a) const;
    Eigen::VectorXcd value(const Eigen::VectorXd& x) const;
};

struct HermVar {
    int n = 0;
    int base = 0;
    int diag(int j) const;
    int re(int i, int j) const; // i > j
    int im(int i, int j) const; // i > j
    // Re tr(C X) as an affine expression
    LinExpr trace_with(const Eigen::MatrixXcd& C) const;
    LinExpr trace() const;
    Eigen::MatrixXcd value(const Eigen::VectorXd& x) const;
};

// Hermitian matrix affine in the variables: entry (i,j), i >= j, stored as re/im.
class HermAffine {
public:
    explicit HermAffine(int n = 0);
    static HermAffine from_var(const HermVar& v);
    static HermAffine constant(const Eigen::MatrixXcd& C);

    int order() const { return n_; }
    LinExpr& re(int i, int j) { return re_[idx(i, j)]; }
    LinExpr& im(int i, int j) { return im_[idx(i, j)]; }
    const LinExpr& re(int i, int j) const { return re_[idx(i, j)]; }
    const LinExpr& im(int i, int j) const { return im_[idx(i, j)]; }

    HermAffine& operator+=(const HermAffine& o);
    HermAffine& operator-=(const HermAffine& o);
    HermAffine& operator*=(double a);
    // adds a * I
    HermAffine& add_identity(const LinExpr& a);
    // C^H X C for constant C (n x r)
    HermAffine congruence(const Eigen::MatrixXcd& C) const;
    // Re tr(C X)
    LinExpr trace_with(const Eigen::MatrixXcd& C) const;
    LinExpr trace() const;
    // Entries stacked as in vec_hermitian (diag, sqrt2 re, sqrt2 im).
    std::vector<LinExpr> vectorized() const;

    // [X  B; B^H  D] from blocks; B is given row-major as complex expressions.
    static HermAffine block(const HermAffine& X, const std::vector<std::vector<CExpr>>& B,
                            const HermAffine& D);

private:
    int idx(int i, int j) const { return i * n_ + j; } // requires i >= j
    int n_;
    std::vector<LinExpr> re_, im_;
};

struct ModelResult {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    Solution raw;
    bool optimal() const { return status == Status::Optimal; }
};

class Model {
public:
    int add_var();
    std::vector<int> add_vars(int n);
    HermVar add_hermitian(int n);
    CVecVar add_cvec(int n);
    int num_vars() const { return nvars_; }

    void minimize(const LinExpr& obj) { obj_ = obj; }
    void add_ge(const LinExpr& e); // e >= 0
    void add_le(const LinExpr& lhs, const LinExpr& rhs) { add_ge(rhs - lhs); }
    void add_eq(const LinExpr& e); // e == 0
    // ||v|| <= t
    void add_soc(const LinExpr& t, const std::vector<LinExpr>& v);
    // ||v||^2 <= a b with a, b >= 0
    void add_rotated_soc(const LinExpr& a, const LinExpr& b, const std::vector<LinExpr>& v);
    void add_psd(const HermAffine& X);

    Problem build() const;
    ModelResult solve(const Settings& st = {}) const;

private:
    int nvars_ = 0;
    LinExpr obj_;
    std::vector<LinExpr> ge_, eq_;
    std::vector<std::vector<LinExpr>> soc_;
    std::vector<std::pair<int, std::vector<LinExpr>>> psd_;
};

} // namespace irs::conic
