// Test-only oracles, independent of the library's filtering code paths.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace test_oracles {

/// Random symmetric positive definite matrix with O(1) scale.
inline Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng, double diag_boost = 0.1) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = u(rng);
        }
    }
    Eigen::MatrixXd p = a * a.transpose();
    p.diagonal().array() += diag_boost;
    return p;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = u(rng);
    }
    return v;
}

/// A monomial c * prod_j x[idx_j] with 0 <= |idx| <= 3.
struct Monomial {
    double coeff = 1.0;
    std::vector<int> idx;
};

using Polynomial = std::vector<Monomial>;

/// Closed-form E[prod x_idx] under N(m, P) for monomial degree <= 3
/// (Isserlis' theorem with a mean shift).
inline double monomial_gaussian_mean(const std::vector<int>& idx, const Eigen::VectorXd& m,
                                     const Eigen::MatrixXd& p) {
    switch (idx.size()) {
        case 0:
            return 1.0;
        case 1:
            return m[idx[0]];
        case 2:
            return m[idx[0]] * m[idx[1]] + p(idx[0], idx[1]);
        case 3: {
            const int i = idx[0], j = idx[1], k = idx[2];
            return m[i] * m[j] * m[k] + m[i] * p(j, k) + m[j] * p(i, k) + m[k] * p(i, j);
        }
        default:
            throw std::logic_error("monomial_gaussian_mean: degree > 3 unsupported");
    }
}

inline double polynomial_gaussian_mean(const Polynomial& poly, const Eigen::VectorXd& m,
                                       const Eigen::MatrixXd& p) {
    double total = 0.0;
    for (const auto& mono : poly) {
        total += mono.coeff * monomial_gaussian_mean(mono.idx, m, p);
    }
    return total;
}

inline double evaluate_polynomial(const Polynomial& poly, const Eigen::VectorXd& x) {
    double total = 0.0;
    for (const auto& mono : poly) {
        double term = mono.coeff;
        for (int i : mono.idx) {
            term *= x[i];
        }
        total += term;
    }
    return total;
}

inline Polynomial random_polynomial(Eigen::Index dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_terms(1, 8);
    std::uniform_int_distribution<int> degree(0, 3);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(dim) - 1);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Polynomial poly;
    const int terms = n_terms(rng);
    for (int t = 0; t < terms; ++t) {
        Monomial mono;
        mono.coeff = coeff(rng);
        const int deg = degree(rng);
        for (int d = 0; d < deg; ++d) {
            mono.idx.push_back(pick(rng));
        }
        poly.push_back(mono);
    }
    return poly;
}

/// One closed-form linear Kalman step (predict + update), the textbook
/// formulas specialized to x_k = A x + G eps, y = H x + r. Written directly
/// against the linear equations so it shares nothing with the library path.
struct LinearKalmanOracle {
    Eigen::MatrixXd a, g, q, h, r;

    void predict(Eigen::VectorXd& m, Eigen::MatrixXd& p) const {
        m = a * m;
        p = a * p * a.transpose() + g * q * g.transpose();
        p = 0.5 * (p + p.transpose());
    }

    void update(Eigen::VectorXd& m, Eigen::MatrixXd& p, const Eigen::VectorXd& y) const {
        const Eigen::MatrixXd s = h * p * h.transpose() + r;
        const Eigen::MatrixXd k = p * h.transpose() * s.inverse();
        m = m + k * (y - h * m);
        p = p - k * s * k.transpose();
        p = 0.5 * (p + p.transpose());
    }
};

}  // namespace test_oracles
