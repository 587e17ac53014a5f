#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "aesa/errors.hpp"
#include "aesa/geometry.hpp"
#include "aesa/munkres.hpp"
#include "aesa/sim.hpp"

namespace aesa {

using StateVec = Eigen::Matrix<double, 6, 1>;
using StateCov = Eigen::Matrix<double, 6, 6>;
using MeasVec = Eigen::Vector3d;
using MeasCov = Eigen::Matrix3d;

/// Kinematic track: mean ordered (x, vx, y, vy, z, vz).
struct TrackEstimate {
    StateVec mean = StateVec::Zero();
    StateCov cov = StateCov::Identity();
    int track_id = 0;
    std::int64_t born = 0;
    std::optional<std::int64_t> last_detected;

    double cov_norm() const { return cov.norm(); }  // Frobenius
    CartesianPosition position() const { return {mean(0), mean(2), mean(4)}; }
    Eigen::Vector3d velocity() const { return {mean(1), mean(3), mean(5)}; }
};

/// Nearly-constant-velocity model, one (position, velocity) block per axis.
struct MotionModel {
    double dt = 0.05;
    double q_tilde = 1.0;

    StateCov F() const {
        StateCov f = StateCov::Identity();
        for (int a = 0; a < 3; ++a) f(2 * a, 2 * a + 1) = dt;
        return f;
    }

    StateCov Q() const {
        StateCov q = StateCov::Zero();
        const double dt2 = dt * dt;
        const double dt3 = dt2 * dt;
        for (int a = 0; a < 3; ++a) {
            q(2 * a, 2 * a) = q_tilde * dt3 / 3.0;
            q(2 * a, 2 * a + 1) = q_tilde * dt2 / 2.0;
            q(2 * a + 1, 2 * a) = q_tilde * dt2 / 2.0;
            q(2 * a + 1, 2 * a + 1) = q_tilde * dt;
        }
        return q;
    }
};

/// Scaled unscented transform spread parameters.
struct UkfParams {
    double alpha = 0.5;
    double beta = 2.0;
    double kappa = 0.0;
};

struct TrackerConfig {
    /// Frobenius-norm deletion bound. A track born at 90 km coasts a full
    /// 19 x 19 raster revisit (361 steps) to about 5.7e6.
    double c_threshold = 1e7;
    /// sqrt of the 3-DOF chi-square quantile at 1 - 1e-6.
    double gate = 5.537585187259359;
    UkfParams ukf;
    double init_vel_var = 100.0 * 100.0;
};

namespace detail {

template <int N>
Eigen::Matrix<double, N, N> symmetrize(const Eigen::Matrix<double, N, N>& m) {
    return 0.5 * (m + m.transpose());
}

/// Lower Cholesky factor, retried once with 1e-9 diagonal jitter.
template <int N>
Eigen::Matrix<double, N, N> cholesky_lower(const Eigen::Matrix<double, N, N>& m, const char* where) {
    Eigen::LLT<Eigen::Matrix<double, N, N>> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    llt.compute(m + 1e-9 * Eigen::Matrix<double, N, N>::Identity());
    if (llt.info() == Eigen::Success) return llt.matrixL();
    throw NumericalError(std::string(where) + ": covariance is not positive definite");
}

template <int N>
struct SigmaPoints {
    Eigen::Matrix<double, N, 2 * N + 1> points;
    Eigen::Matrix<double, 2 * N + 1, 1> wm;
    Eigen::Matrix<double, 2 * N + 1, 1> wc;
};

template <int N>
SigmaPoints<N> sigma_points(const Eigen::Matrix<double, N, 1>& mean, const Eigen::Matrix<double, N, N>& cov,
                            const UkfParams& p, const char* where) {
    const double n = N;
    const double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
    if (!(n + lambda > 0.0)) throw NumericalError(std::string(where) + ": n + lambda must be positive");
    const Eigen::Matrix<double, N, N> L = cholesky_lower<N>((n + lambda) * cov, where);
    SigmaPoints<N> sp;
    sp.points.col(0) = mean;
    for (int i = 0; i < N; ++i) {
        sp.points.col(1 + i) = mean + L.col(i);
        sp.points.col(1 + N + i) = mean - L.col(i);
    }
    sp.wm.setConstant(1.0 / (2.0 * (n + lambda)));
    sp.wc = sp.wm;
    sp.wm(0) = lambda / (n + lambda);
    sp.wc(0) = sp.wm(0) + (1.0 - p.alpha * p.alpha + p.beta);
    return sp;
}

}  // namespace detail

/// Azimuth-wrapped measurement difference a - b.
inline MeasVec spherical_residual(const MeasVec& a, const MeasVec& b) {
    MeasVec d = a - b;
    d(0) = wrap_angle(d(0));
    return d;
}

/// Spherical measurement of a 6-D state.
inline MeasVec measure_state(const StateVec& x) {
    return cart_to_spherical({x(0), x(2), x(4)}).vec();
}

/// Unscented prediction of the measurement: mean, innovation covariance
/// (including R) and state-measurement cross covariance.
struct MeasurementPrediction {
    MeasVec z = MeasVec::Zero();
    MeasCov S = MeasCov::Identity();
    Eigen::Matrix<double, 6, 3> cross = Eigen::Matrix<double, 6, 3>::Zero();
};

template <class Measure, class Residual>
MeasurementPrediction predict_measurement(const StateVec& mean, const StateCov& cov, const MeasCov& R,
                                          const UkfParams& params, Measure&& h, Residual&& residual) {
    const auto sp = detail::sigma_points<6>(mean, cov, params, "ukf_update");
    Eigen::Matrix<double, 3, 13> z;
    for (int i = 0; i < 13; ++i) z.col(i) = h(StateVec(sp.points.col(i)));

    // Average residuals about the centre point so angles never straddle the wrap.
    const MeasVec ref = z.col(0);
    MeasVec offset = MeasVec::Zero();
    for (int i = 0; i < 13; ++i) offset += sp.wm(i) * residual(MeasVec(z.col(i)), ref);

    MeasurementPrediction out;
    out.z = ref + offset;
    out.S = R;
    out.cross.setZero();
    for (int i = 0; i < 13; ++i) {
        const MeasVec dz = residual(MeasVec(z.col(i)), out.z);
        const StateVec dx = sp.points.col(i) - mean;
        out.S += sp.wc(i) * dz * dz.transpose();
        out.cross += sp.wc(i) * dx * dz.transpose();
    }
    out.S = detail::symmetrize<3>(out.S);
    return out;
}

inline MeasurementPrediction predict_measurement(const TrackEstimate& track, const MeasCov& R,
                                                 const UkfParams& params) {
    return predict_measurement(track.mean, track.cov, R, params, measure_state, spherical_residual);
}

struct UpdateResult {
    TrackEstimate track;
    MeasVec innovation = MeasVec::Zero();
    MeasCov S = MeasCov::Identity();
};

/// Kalman correction given a measurement prediction.
template <class Residual>
UpdateResult correct(const TrackEstimate& prior, const MeasurementPrediction& pred, const MeasVec& z,
                     Residual&& residual) {
    Eigen::FullPivLU<MeasCov> lu(pred.S);
    if (!lu.isInvertible()) throw NumericalError("ukf_update: innovation covariance is singular");
    const Eigen::Matrix<double, 6, 3> K = pred.cross * lu.inverse();
    UpdateResult out{prior, residual(z, pred.z), pred.S};
    out.track.mean = prior.mean + K * out.innovation;
    out.track.cov = detail::symmetrize<6>(StateCov(prior.cov - K * pred.S * K.transpose()));
    return out;
}

/// Generic unscented update for an arbitrary measurement function.
template <class Measure, class Residual>
UpdateResult unscented_update(const TrackEstimate& prior, const MeasVec& z, const MeasCov& R,
                              const UkfParams& params, Measure&& h, Residual&& residual) {
    const auto pred = predict_measurement(prior.mean, prior.cov, R, params, h, residual);
    return correct(prior, pred, z, residual);
}

inline UpdateResult ukf_update(const TrackEstimate& prior, const Detection& det, const MeasCov& R,
                               const UkfParams& params) {
    auto out = unscented_update(prior, det.meas.vec(), R, params, measure_state, spherical_residual);
    out.track.last_detected = det.t;
    return out;
}

/// Linear prediction; exact for the constant-velocity model.
inline TrackEstimate ukf_predict(const TrackEstimate& track, const MotionModel& model) {
    detail::cholesky_lower<6>(track.cov, "ukf_predict");
    const StateCov F = model.F();
    TrackEstimate out = track;
    out.mean = F * track.mean;
    out.cov = detail::symmetrize<6>(StateCov(F * track.cov * F.transpose() + model.Q()));
    return out;
}

inline double mahalanobis(const MeasVec& innovation, const MeasCov& S) {
    Eigen::LLT<MeasCov> llt(S);
    if (llt.info() != Eigen::Success) throw NumericalError("mahalanobis: innovation covariance is singular");
    return std::sqrt(innovation.dot(llt.solve(innovation)));
}

inline double mahalanobis(const MeasurementPrediction& pred, const Detection& det) {
    return mahalanobis(spherical_residual(det.meas.vec(), pred.z), pred.S);
}

inline double mahalanobis(const TrackEstimate& track, const Detection& det, const MeasCov& R,
                          const UkfParams& params) {
    return mahalanobis(predict_measurement(track, R, params), det);
}

/// Track/detection association over a gated Mahalanobis cost matrix
/// (rows are tracks, columns detections).
inline GatedAssignment assign(const Eigen::MatrixXd& cost, double gate) { return assign_gated(cost, gate); }

/// New track from a single detection: position from the inverse
/// measurement function, position covariance from the unscented transform
/// of R, zero velocity with variance `init_vel_var` per axis.
inline TrackEstimate initiate_track(const Detection& det, const MeasCov& R, const TrackerConfig& cfg, int id) {
    const auto sp = detail::sigma_points<3>(det.meas.vec(), R, cfg.ukf, "initiate_track");
    Eigen::Matrix<double, 3, 7> pts;
    for (int i = 0; i < 7; ++i) pts.col(i) = spherical_to_cart(SphericalCoord::from(sp.points.col(i))).vec();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int i = 0; i < 7; ++i) mean += sp.wm(i) * pts.col(i);
    Eigen::Matrix3d pos_cov = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 7; ++i) {
        const Eigen::Vector3d d = pts.col(i) - mean;
        pos_cov += sp.wc(i) * d * d.transpose();
    }
    pos_cov = detail::symmetrize<3>(pos_cov);

    TrackEstimate track;
    track.track_id = id;
    track.born = det.t;
    track.last_detected = det.t;
    const CartesianPosition p = spherical_to_cart(det.meas);
    track.mean << p.x, 0.0, p.y, 0.0, p.z, 0.0;
    track.cov.setZero();
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) track.cov(2 * a, 2 * b) = pos_cov(a, b);
        track.cov(2 * a + 1, 2 * a + 1) = cfg.init_vel_var;
    }
    return track;
}

/// Deletes existing tracks whose covariance norm exceeds the threshold,
/// then appends one new track per unassigned detection. Tracks born here
/// are not subject to deletion until the next step.
inline std::vector<int> manage_tracks(std::vector<TrackEstimate>& tracks,
                                      const std::vector<Detection>& unassigned, const MeasCov& R,
                                      const TrackerConfig& cfg, int& next_id) {
    std::vector<int> deleted;
    std::erase_if(tracks, [&](const TrackEstimate& t) {
        if (t.cov_norm() > cfg.c_threshold) {
            deleted.push_back(t.track_id);
            return true;
        }
        return false;
    });
    for (const auto& det : unassigned) tracks.push_back(initiate_track(det, R, cfg, next_id++));
    return deleted;
}

/// Bookkeeping of one tracker step.
struct TrackerStepReport {
    std::vector<std::pair<int, int>> updates;  ///< (track_id, detection index)
    std::vector<int> born_ids;
    std::vector<int> deleted_ids;
};

/// One tracker step over a caller-owned track list:
/// predict -> gated Mahalanobis costs -> assignment -> update -> manage.
inline TrackerStepReport mtt_step(std::vector<TrackEstimate>& tracks, const std::vector<Detection>& detections,
                                  const MotionModel& model, const MeasCov& R, const TrackerConfig& cfg,
                                  int& next_id) {
    TrackerStepReport report;
    for (auto& t : tracks) t = ukf_predict(t, model);

    std::vector<MeasurementPrediction> preds;
    preds.reserve(tracks.size());
    for (const auto& t : tracks) preds.push_back(predict_measurement(t, R, cfg.ukf));

    Eigen::MatrixXd cost(static_cast<Eigen::Index>(tracks.size()), static_cast<Eigen::Index>(detections.size()));
    for (std::size_t i = 0; i < tracks.size(); ++i)
        for (std::size_t j = 0; j < detections.size(); ++j)
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mahalanobis(preds[i], detections[j]);

    const GatedAssignment match = assign(cost, cfg.gate);
    for (const auto& [ti, di] : match.pairs) {
        auto& track = tracks[static_cast<std::size_t>(ti)];
        const auto& det = detections[static_cast<std::size_t>(di)];
        track = correct(track, preds[static_cast<std::size_t>(ti)], det.meas.vec(), spherical_residual).track;
        track.last_detected = det.t;
        report.updates.emplace_back(track.track_id, di);
    }

    std::vector<Detection> unassigned;
    for (int j : match.unassigned_cols) unassigned.push_back(detections[static_cast<std::size_t>(j)]);
    const int first_new = next_id;
    report.deleted_ids = manage_tracks(tracks, unassigned, R, cfg, next_id);
    for (int id = first_new; id < next_id; ++id) report.born_ids.push_back(id);
    return report;
}

/// Multi-target tracker state owned by one episode.
class Tracker {
public:
    Tracker() = default;
    Tracker(MotionModel model, MeasCov R, TrackerConfig cfg) : model_(model), R_(R), cfg_(cfg) {}

    const std::vector<TrackEstimate>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }
    const MotionModel& model() const { return model_; }
    const MeasCov& R() const { return R_; }

    void reset() {
        tracks_.clear();
        next_id_ = 0;
    }

    TrackerStepReport step(const std::vector<Detection>& detections) {
        return mtt_step(tracks_, detections, model_, R_, cfg_, next_id_);
    }

private:
    MotionModel model_;
    MeasCov R_ = SensorModel{}.R();
    TrackerConfig cfg_;
    std::vector<TrackEstimate> tracks_;
    int next_id_ = 0;
};

}  // namespace aesa
