#pragma once
// Independent reference computations for the test suites. Deliberately
// naive: exhaustive enumeration and textbook closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

/// Minimum total cost over every way of matching min(rows, cols) pairs.
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
    Eigen::MatrixXd c = cost.rows() <= cost.cols() ? cost : Eigen::MatrixXd(cost.transpose());
    const int r = static_cast<int>(c.rows());
    const int m = static_cast<int>(c.cols());
    if (r == 0) return 0.0;
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    // Every permutation of all columns; the first r entries pick the columns.
    do {
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += c(i, cols[i]);
        best = std::min(best, s);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
}

struct PartialMatch {
    int pairs = 0;
    double cost = 0.0;
};

/// Over all partial matchings that use only entries <= gate: the largest
/// number of pairs, and among those the smallest cost.
inline PartialMatch brute_force_gated(const Eigen::MatrixXd& cost, double gate) {
    const int r = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    PartialMatch best{-1, 0.0};
    std::vector<char> used(m, 0);
    std::function<void(int, int, double)> rec = [&](int i, int pairs, double s) {
        if (i == r) {
            if (pairs > best.pairs || (pairs == best.pairs && s < best.cost)) best = {pairs, s};
            return;
        }
        rec(i + 1, pairs, s);
        for (int j = 0; j < m; ++j) {
            if (used[j] || !(cost(i, j) <= gate)) continue;
            used[j] = 1;
            rec(i + 1, pairs + 1, s + cost(i, j));
            used[j] = 0;
        }
    };
    rec(0, 0, 0.0);
    return best;
}

/// GOSPA (alpha = 2) by enumerating every partial matching between the sets.
inline double brute_force_gospa(const std::vector<Eigen::Vector3d>& x, const std::vector<Eigen::Vector3d>& y,
                                double c, double p) {
    const int nx = static_cast<int>(x.size());
    const int ny = static_cast<int>(y.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(ny, 0);
    std::function<void(int, int, double)> rec = [&](int i, int pairs, double s) {
        if (i == nx) {
            const double unassigned = std::pow(c, p) / 2.0 * (nx + ny - 2 * pairs);
            best = std::min(best, s + unassigned);
            return;
        }
        rec(i + 1, pairs, s);
        for (int j = 0; j < ny; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            rec(i + 1, pairs + 1, s + std::pow(std::min((x[i] - y[j]).norm(), c), p));
            used[j] = 0;
        }
    };
    rec(0, 0, 0.0);
    return std::pow(best, 1.0 / p);
}

struct KalmanPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Textbook linear Kalman correction, covariance in (I - K H) P form.
inline KalmanPosterior kalman_update(const Eigen::VectorXd& x, const Eigen::MatrixXd& P, const Eigen::MatrixXd& H,
                                     const Eigen::MatrixXd& R, const Eigen::VectorXd& z) {
    const Eigen::MatrixXd S = H * P * H.transpose() + R;
    const Eigen::MatrixXd K = P * H.transpose() * S.inverse();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(x.size(), x.size());
    return {x + K * (z - H * x), (I - K * H) * P};
}

/// Upper-tail p-value of Pearson's chi-square statistic against equal
/// expected counts.
inline double chi_square_uniform_p(const std::vector<long>& counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (long c : counts) stat += (c - expected) * (c - expected) / expected;
    boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Random symmetric positive-definite matrix with eigenvalues in [lo, hi].
template <class Gen>
Eigen::MatrixXd random_spd(int n, double lo, double hi, Gen& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), ev(lo, hi);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = u(gen);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = ev(gen);
    Eigen::MatrixXd m = q * d.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
}

}  // namespace oracle
