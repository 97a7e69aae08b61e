#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

// Helpers shared by the unit tests. Oracles here are deliberately written
// without the library so they can check it.
namespace testsupport {

using Matrix = Eigen::MatrixXd;

inline Matrix random_matrix(std::mt19937_64& rng, int d, double spread = 1.0) {
    std::normal_distribution<double> n(0.0, spread);
    Matrix m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = n(rng);
    return m;
}

inline Matrix random_orthogonal(std::mt19937_64& rng, int d) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, d));
    return qr.householderQ() * Matrix::Identity(d, d);
}

// Well-conditioned invertible matrix: orthogonal * diag(exp(u)) * orthogonal.
inline Matrix random_gl(std::mt19937_64& rng, int d, double log_spread = 1.0) {
    std::uniform_real_distribution<double> u(-log_spread, log_spread);
    Eigen::VectorXd s(d);
    for (int k = 0; k < d; ++k) s(k) = std::exp(u(rng));
    return random_orthogonal(rng, d) * s.asDiagonal() * random_orthogonal(rng, d);
}

inline Matrix rotation(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

inline Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Matrix diag(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double e : v) x(k++) = e;
    return x.asDiagonal();
}

// Log singular values of a 2x2 matrix via the eigenvalues of g g^T.
inline std::vector<double> cartan2_closed_form(const Matrix& g) {
    Matrix s = g * g.transpose();
    double t = s(0, 0) + s(1, 1);
    double det = s.determinant();
    double disc = std::sqrt(t * t / 4 - det);
    return {0.5 * std::log(t / 2 + disc), 0.5 * std::log(t / 2 - disc)};
}

// Log eigenvalue moduli of a 2x2 matrix from trace and determinant.
inline std::vector<double> jordan2_closed_form(const Matrix& g) {
    double t = g(0, 0) + g(1, 1);
    double det = g.determinant();
    double disc = t * t / 4 - det;
    if (disc < 0) {
        double m = 0.5 * std::log(std::abs(det));
        return {m, m};
    }
    double a = std::abs(t / 2 + std::sqrt(disc)), b = std::abs(t / 2 - std::sqrt(disc));
    if (a < b) std::swap(a, b);
    return {std::log(a), std::log(b)};
}

inline double vec_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double vec_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

}  // namespace testsupport
