#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "errors.hpp"

namespace cocygap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Defaults shared by the whole library.
inline constexpr double kGapTol = 1e-8;
inline constexpr double kAngleTol = 1e-9;
inline constexpr double kConditionLimit = 1e15;

class MatrixGL {
public:
    MatrixGL() = default;

    explicit MatrixGL(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw DimensionMismatch("MatrixGL: matrix must be square and non-empty");
        if (!m_.allFinite()) throw SingularMatrix("MatrixGL: non-finite entry");
        Eigen::JacobiSVD<Matrix> svd(m_);
        const Vector& s = svd.singularValues();
        double smax = s(0), smin = s(s.size() - 1);
        if (!(smin > 0.0) || smax / smin > kConditionLimit)
            throw SingularMatrix("MatrixGL: matrix is singular or too ill-conditioned");
    }

    const Matrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Matrix m_;
};

struct ScaledMatrix {
    Matrix unit;
    double log_scale = 0.0;

    static ScaledMatrix identity(int d) { return {Matrix::Identity(d, d), 0.0}; }

    static ScaledMatrix from(const Matrix& m) {
        ScaledMatrix s{m, 0.0};
        s.renormalize();
        return s;
    }
    static ScaledMatrix from(const MatrixGL& g) { return from(g.matrix()); }

    int dim() const { return static_cast<int>(unit.rows()); }

    void renormalize() {
        Eigen::JacobiSVD<Matrix> svd(unit);
        double s = svd.singularValues()(0);
        if (!(s > 0.0) || !std::isfinite(s)) throw SingularMatrix("ScaledMatrix: zero or non-finite product");
        unit /= s;
        log_scale += std::log(s);
    }

    // exp(log_scale) * unit; may overflow for long products.
    Matrix dense() const { return std::exp(log_scale) * unit; }

    friend ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b) {
        if (a.dim() != b.dim()) throw DimensionMismatch("ScaledMatrix product: dimension mismatch");
        ScaledMatrix r{a.unit * b.unit, a.log_scale + b.log_scale};
        r.renormalize();
        return r;
    }
};

struct CartanVector {
    std::vector<double> mu;
};

struct JordanVector {
    std::vector<double> lambda;
};

struct Subspace {
    Matrix basis;  // d x k, orthonormal columns

    int dim_ambient() const { return static_cast<int>(basis.rows()); }
    int dim_sub() const { return static_cast<int>(basis.cols()); }
};

inline double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector difference: size mismatch");
    std::vector<double> r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

namespace detail {

inline std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

inline Vector singular_values(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

inline std::vector<double> log_singular_values(const Matrix& m, double offset) {
    Vector s = singular_values(m);
    double smin = s(s.size() - 1);
    if (!(smin > 0.0) || s(0) / smin > kConditionLimit)
        throw SingularMatrix("cartan_projection: singular-value ratio exceeds conditioning limit");
    std::vector<double> mu(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) mu[k] = std::log(s(k)) + offset;
    return mu;
}

inline std::vector<double> log_eigen_moduli(const Matrix& m, double offset) {
    std::vector<double> lam;
    if (m.rows() == 1) {
        lam.push_back(std::log(std::abs(m(0, 0))) + offset);
        return lam;
    }
    Eigen::EigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw EigenSolverFailure("jordan_projection: eigen solver did not converge");
    const auto& ev = es.eigenvalues();
    lam.reserve(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        double a = std::abs(ev(k));
        if (!(a > 0.0)) throw SingularMatrix("jordan_projection: zero eigenvalue");
        lam.push_back(std::log(a) + offset);
    }
    return sorted_desc(std::move(lam));
}

inline double spectral_radius(const Matrix& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    if (m.rows() == 2) {
        // closed form avoids solver overhead in hot loops
        double t = 0.5 * (m(0, 0) + m(1, 1));
        double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        double disc = t * t - det;
        if (disc >= 0.0) {
            double r = std::sqrt(disc);
            return std::abs(t) + r;
        }
        return std::sqrt(std::abs(det));
    }
    Eigen::EigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw EigenSolverFailure("spectral radius: eigen solver did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double largest_singular_value(const Matrix& m) {
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    if (m.rows() == 2 && m.cols() == 2) {
        double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
        return 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
    }
    return singular_values(m)(0);
}

}  // namespace detail

inline CartanVector cartan_projection(const Matrix& g) {
    if (g.rows() != g.cols()) throw DimensionMismatch("cartan_projection: matrix must be square");
    return {detail::log_singular_values(g, 0.0)};
}
inline CartanVector cartan_projection(const MatrixGL& g) { return cartan_projection(g.matrix()); }
inline CartanVector cartan_projection(const ScaledMatrix& g) {
    return {detail::log_singular_values(g.unit, g.log_scale)};
}

inline JordanVector jordan_projection(const Matrix& g) {
    if (g.rows() != g.cols()) throw DimensionMismatch("jordan_projection: matrix must be square");
    return {detail::log_eigen_moduli(g, 0.0)};
}
inline JordanVector jordan_projection(const MatrixGL& g) { return jordan_projection(g.matrix()); }
inline JordanVector jordan_projection(const ScaledMatrix& g) {
    return {detail::log_eigen_moduli(g.unit, g.log_scale)};
}

inline double gap_tolerance(const std::vector<double>& mu) { return kGapTol * (norm(mu) + 1.0); }

inline Subspace xi_subspace(const Matrix& g, int j) {
    int d = static_cast<int>(g.rows());
    if (j < 1 || j > d - 1) throw DimensionMismatch("xi_subspace: need 1 <= j <= d-1");
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU);
    const Vector& s = svd.singularValues();
    std::vector<double> mu(d);
    for (int k = 0; k < d; ++k) mu[k] = std::log(s(k));
    double gap = mu[j - 1] - mu[j];
    if (!(gap > gap_tolerance(mu)))
        throw GapTooSmall(gap, "xi_subspace: singular value gap too small, subspace ill-defined");
    return {svd.matrixU().leftCols(j)};
}
inline Subspace xi_subspace(const MatrixGL& g, int j) { return xi_subspace(g.matrix(), j); }
inline Subspace xi_subspace(const ScaledMatrix& g, int j) { return xi_subspace(g.unit, j); }

inline Subspace span_of(const Matrix& vectors) {
    Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
    Eigen::Index k = svd.rank();
    return {svd.matrixU().leftCols(k)};
}

inline double principal_angle(const Subspace& u, const Subspace& v) {
    if (u.dim_ambient() != v.dim_ambient()) throw DimensionMismatch("principal_angle: ambient dimensions differ");
    const Subspace& a = u.dim_sub() <= v.dim_sub() ? u : v;
    const Subspace& b = u.dim_sub() <= v.dim_sub() ? v : u;
    Matrix proj = b.basis.transpose() * a.basis;
    Vector cs = detail::singular_values(proj);
    Matrix resid = a.basis - b.basis * proj;
    Vector sn = detail::singular_values(resid);
    double c = std::min(1.0, cs(0));
    double s = std::min(1.0, sn(sn.size() - 1));
    return std::atan2(s, c);
}

// ---- exterior powers ----

// All k-subsets of {0..d-1} in lexicographic order.
inline std::vector<std::vector<int>> combinations(int d, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > d) return out;
    std::vector<int> c(k);
    std::iota(c.begin(), c.end(), 0);
    while (true) {
        out.push_back(c);
        int p = k - 1;
        while (p >= 0 && c[p] == d - k + p) --p;
        if (p < 0) break;
        ++c[p];
        for (int q = p + 1; q < k; ++q) c[q] = c[q - 1] + 1;
    }
    return out;
}

inline Matrix exterior_power(const Matrix& g, int i) {
    int d = static_cast<int>(g.rows());
    if (i < 1 || i > d) throw DimensionMismatch("exterior_power: need 1 <= i <= d");
    auto idx = combinations(d, i);
    Matrix out(idx.size(), idx.size());
    Matrix sub(i, i);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) {
            for (int a = 0; a < i; ++a)
                for (int b = 0; b < i; ++b) sub(a, b) = g(idx[r][a], idx[c][b]);
            out(r, c) = sub.determinant();
        }
    return out;
}
inline MatrixGL exterior_power(const MatrixGL& g, int i) { return MatrixGL(exterior_power(g.matrix(), i)); }

// Recovers the k-plane whose Pluecker coordinates (lexicographic wedge basis) are w.
inline Subspace subspace_from_wedge(const Vector& w, int d, int k) {
    if (k == 1) return {w.normalized()};
    auto top = combinations(d, k);
    auto low = combinations(d, k - 1);
    auto index_of = [&](const std::vector<int>& s) {
        return static_cast<Eigen::Index>(std::lower_bound(top.begin(), top.end(), s) - top.begin());
    };
    Matrix vecs = Matrix::Zero(d, static_cast<Eigen::Index>(low.size()));
    for (std::size_t col = 0; col < low.size(); ++col) {
        const auto& s = low[col];
        for (int r = 0; r < d; ++r) {
            if (std::find(s.begin(), s.end(), r) != s.end()) continue;
            std::vector<int> t = s;
            auto it = std::lower_bound(t.begin(), t.end(), r);
            int pos = static_cast<int>(it - t.begin());
            t.insert(it, r);
            double sign = (pos % 2 == 0) ? 1.0 : -1.0;
            vecs(r, static_cast<Eigen::Index>(col)) = sign * w(index_of(t));
        }
    }
    Eigen::JacobiSVD<Matrix> svd(vecs, Eigen::ComputeThinU);
    return {svd.matrixU().leftCols(k)};
}

// Tracks Λ^k P for k = 1..d-1 and log|det P| for a growing product P, so that
// every partial sum μ_1+…+μ_k stays accurate even when the singular values
// of P spread far beyond double precision.
class CompoundProduct {
public:
    CompoundProduct() = default;

    static CompoundProduct identity(int d) {
        CompoundProduct c;
        c.d_ = d;
        for (int k = 1; k < d; ++k) {
            auto n = static_cast<Eigen::Index>(combinations(d, k).size());
            c.blocks_.push_back(Matrix::Identity(n, n));
            c.log_scale_.push_back(0.0);
        }
        return c;
    }

    static CompoundProduct of(const Matrix& g) {
        if (g.rows() != g.cols()) throw DimensionMismatch("CompoundProduct: matrix must be square");
        CompoundProduct c;
        c.d_ = static_cast<int>(g.rows());
        for (int k = 1; k < c.d_; ++k) {
            c.blocks_.push_back(k == 1 ? g : exterior_power(g, k));
            c.log_scale_.push_back(0.0);
        }
        double det = g.determinant();
        if (!(std::abs(det) > 0.0)) throw SingularMatrix("CompoundProduct: singular matrix");
        c.log_abs_det_ = std::log(std::abs(det));
        c.normalize();
        return c;
    }

    int dim() const { return d_; }

    // this <- g * this
    void left_multiply(const CompoundProduct& g) {
        check(g);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            blocks_[k] = g.blocks_[k] * blocks_[k];
            log_scale_[k] += g.log_scale_[k];
        }
        log_abs_det_ += g.log_abs_det_;
        normalize();
    }

    // this <- this * g
    void right_multiply(const CompoundProduct& g) {
        check(g);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            blocks_[k] = blocks_[k] * g.blocks_[k];
            log_scale_[k] += g.log_scale_[k];
        }
        log_abs_det_ += g.log_abs_det_;
        normalize();
    }

    CompoundProduct squared() const {
        CompoundProduct c = *this;
        c.right_multiply(*this);
        return c;
    }

    // s_k = log σ_1(Λ^k P) = μ_1+…+μ_k, with s_0 = 0 and s_d = log|det P|.
    std::vector<double> partial_sums() const {
        std::vector<double> s(d_ + 1, 0.0);
        for (int k = 1; k < d_; ++k)
            s[k] = std::log(detail::largest_singular_value(blocks_[k - 1])) + log_scale_[k - 1];
        s[d_] = log_abs_det_;
        return s;
    }

    // r_k = log ρ(Λ^k P) = λ_1+…+λ_k.
    std::vector<double> eigen_partial_sums() const {
        std::vector<double> r(d_ + 1, 0.0);
        for (int k = 1; k < d_; ++k) {
            double rho = detail::spectral_radius(blocks_[k - 1]);
            if (!(rho > 0.0)) throw SingularMatrix("CompoundProduct: zero spectral radius");
            r[k] = std::log(rho) + log_scale_[k - 1];
        }
        r[d_] = log_abs_det_;
        return r;
    }

    CartanVector cartan() const { return {differences(partial_sums())}; }
    JordanVector jordan() const { return {differences(eigen_partial_sums())}; }

    // μ_i − μ_{i+1}
    double gap(int i) const {
        check_index(i);
        double lo = i == 1 ? 0.0 : std::log(detail::largest_singular_value(blocks_[i - 2])) + log_scale_[i - 2];
        double mid = std::log(detail::largest_singular_value(blocks_[i - 1])) + log_scale_[i - 1];
        double hi = i + 1 == d_ ? log_abs_det_
                                : std::log(detail::largest_singular_value(blocks_[i])) + log_scale_[i];
        return std::max(0.0, 2.0 * mid - lo - hi);
    }

    double eigen_gap(int i) const {
        check_index(i);
        auto r = eigen_partial_sums();
        return std::max(0.0, 2.0 * r[i] - r[i - 1] - r[i + 1]);
    }

    Subspace xi(int j) const {
        check_index(j);
        double g = gap(j);
        auto mu = cartan().mu;
        if (!(g > gap_tolerance(mu)))
            throw GapTooSmall(g, "xi_subspace: singular value gap too small, subspace ill-defined");
        Eigen::JacobiSVD<Matrix> svd(blocks_[j - 1], Eigen::ComputeFullU);
        return subspace_from_wedge(svd.matrixU().col(0), d_, j);
    }

    ScaledMatrix first() const {
        if (d_ == 1) return {Matrix::Constant(1, 1, 1.0), log_abs_det_};
        ScaledMatrix s{blocks_[0], log_scale_[0]};
        s.renormalize();
        return s;
    }

    // Raw access used for hashing states.
    const std::vector<Matrix>& blocks() const { return blocks_; }
    const std::vector<double>& log_scales() const { return log_scale_; }
    double log_abs_det() const { return log_abs_det_; }

private:
    int d_ = 0;
    std::vector<Matrix> blocks_;
    std::vector<double> log_scale_;
    double log_abs_det_ = 0.0;

    void normalize() {
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            double m = blocks_[k].cwiseAbs().maxCoeff();
            if (!(m > 0.0) || !std::isfinite(m)) throw SingularMatrix("CompoundProduct: degenerate product");
            blocks_[k] /= m;
            log_scale_[k] += std::log(m);
        }
    }

    void check(const CompoundProduct& g) const {
        if (g.d_ != d_) throw DimensionMismatch("CompoundProduct: dimension mismatch");
    }

    void check_index(int i) const {
        if (i < 1 || i > d_ - 1) throw DimensionMismatch("gap index must satisfy 1 <= i <= d-1");
    }

    static std::vector<double> differences(const std::vector<double>& s) {
        std::vector<double> v(s.size() - 1);
        for (std::size_t k = 0; k + 1 < s.size(); ++k) v[k] = s[k + 1] - s[k];
        return detail::sorted_desc(std::move(v));
    }
};

}  // namespace cocygap
