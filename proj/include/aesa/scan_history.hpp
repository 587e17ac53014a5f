#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "aesa/errors.hpp"
#include "aesa/geometry.hpp"

namespace aesa {

/// Spread of a fresh scan such that the beam holds 95% of the Gaussian mass
/// (two-tailed z = 1.96 on each side).
inline double sigma0_from_beamwidth(double beam_width) {
    if (!(beam_width > 0.0)) throw DomainError("sigma0_from_beamwidth: beam width must be positive");
    return beam_width / 3.92;
}

/// Per-step diffusion rate such that the peak density after `decay_steps`
/// steps is `zeta` times the fresh peak: (1 + gamma)^(-2 T) = zeta.
inline double gamma_from_decay(double zeta, double decay_steps) {
    if (!(zeta > 0.0) || zeta > 1.0) throw DomainError("gamma_from_decay: zeta must lie in (0, 1]");
    if (!(decay_steps >= 1.0)) throw DomainError("gamma_from_decay: decay horizon must be >= 1 step");
    return std::pow(zeta, -1.0 / (2.0 * decay_steps)) - 1.0;
}

/// Isotropic, uncorrelated bivariate Gaussian density over (psi, theta).
inline double bivariate_scan_pdf(const Bearing& x, const Bearing& mu, double sigma) {
    const double a = (x.psi - mu.psi) / sigma;
    const double b = (x.theta - mu.theta) / sigma;
    return std::exp(-0.5 * (a * a + b * b)) / (2.0 * std::numbers::pi * sigma * sigma);
}

/// Largest scan value reachable when one scan is added per step for
/// steps 0..T at the same bearing.
inline double p_max(int steps, double sigma0, double gamma) {
    if (steps < 0) throw DomainError("p_max: T must be >= 0");
    const double fresh = 1.0 / (2.0 * std::numbers::pi * sigma0 * sigma0);
    double sum = 0.0;
    for (int t = 0; t <= steps; ++t) sum += fresh / std::pow(1.0 + gamma, 2.0 * t);
    return sum;
}

struct ScanRecord {
    Bearing mu;
    std::int64_t t = 0;

    friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

/// Square raster of scaled scan values; cell (i, j) is psi_i, theta_j,
/// stored row-major.
struct ScanRaster {
    std::size_t n = 0;
    std::vector<double> cells;

    double at(std::size_t i, std::size_t j) const { return cells[i * n + j]; }
};

/// Evenly spaced grid coordinate k of n over [-half_extent, half_extent].
inline double raster_coordinate(std::size_t k, std::size_t n, double half_extent) {
    return -half_extent + 2.0 * half_extent * static_cast<double>(k) / static_cast<double>(n - 1);
}

/// FIFO of past beam scans and the diffusing scan-value field they induce.
class ScanHistory {
public:
    struct Params {
        std::size_t capacity = 64;
        double sigma0 = sigma0_from_beamwidth(9.0 * std::numbers::pi / 180.0);
        double gamma = gamma_from_decay(0.01, 600.0);
        int p_max_steps = 4;
    };

    ScanHistory() : ScanHistory(Params{}) {}

    explicit ScanHistory(const Params& params) : params_(params) {
        if (params_.capacity == 0) throw DomainError("ScanHistory: capacity must be positive");
        if (!(params_.sigma0 > 0.0)) throw DomainError("ScanHistory: sigma0 must be positive");
        if (!(params_.gamma >= 0.0)) throw DomainError("ScanHistory: gamma must be >= 0");
        p_max_ref_ = p_max(params_.p_max_steps, params_.sigma0, params_.gamma);
    }

    const Params& params() const { return params_; }
    double p_max_ref() const { return p_max_ref_; }
    const std::deque<ScanRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    void clear() { records_.clear(); }

    void push(const Bearing& mu, std::int64_t t) {
        if (t < 0) throw ContractViolation("ScanHistory::push: negative timestep");
        if (!records_.empty() && t < records_.back().t)
            throw ContractViolation("ScanHistory::push: timestep " + std::to_string(t) +
                                    " precedes stored timestep " + std::to_string(records_.back().t));
        records_.push_back({mu, t});
        if (records_.size() > params_.capacity) records_.pop_front();
    }

    /// Spread of a scan taken at `t_scan` when viewed at step `now`.
    double sigma_at(std::int64_t t_scan, std::int64_t now) const {
        return params_.sigma0 * std::pow(1.0 + params_.gamma, static_cast<double>(now - t_scan));
    }

    double scan_value(const Bearing& x, std::int64_t now) const {
        double sum = 0.0;
        for (const auto& rec : records_) {
            if (rec.t > now) throw ContractViolation("scan_value: query precedes a stored scan");
            sum += bivariate_scan_pdf(x, rec.mu, sigma_at(rec.t, now));
        }
        return sum;
    }

    double scaled_scan_value(const Bearing& x, std::int64_t now) const {
        return scan_value(x, now) / p_max_ref_;
    }

    /// Evaluates the scaled scan value on an n x n grid spanning
    /// [-half_extent, half_extent] on both axes, end points included.
    ///
    /// The Gaussian is separable, so each record costs 2n exponentials
    /// instead of n^2.
    ScanRaster rasterize(std::int64_t now, std::size_t n = 48,
                         double half_extent = std::numbers::pi / 3.0) const {
        if (n < 2) throw DomainError("rasterize: grid size must be >= 2");
        ScanRaster out{n, std::vector<double>(n * n, 0.0)};
        std::vector<double> axis(n);
        for (std::size_t k = 0; k < n; ++k) axis[k] = raster_coordinate(k, n, half_extent);

        std::vector<double> g_psi(n), g_theta(n);
        for (const auto& rec : records_) {
            if (rec.t > now) throw ContractViolation("rasterize: query precedes a stored scan");
            const double sigma = sigma_at(rec.t, now);
            const double peak = 1.0 / (2.0 * std::numbers::pi * sigma * sigma) / p_max_ref_;
            for (std::size_t k = 0; k < n; ++k) {
                const double a = (axis[k] - rec.mu.psi) / sigma;
                const double b = (axis[k] - rec.mu.theta) / sigma;
                g_psi[k] = std::exp(-0.5 * a * a);
                g_theta[k] = std::exp(-0.5 * b * b);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const double row = peak * g_psi[i];
                double* dst = out.cells.data() + i * n;
                for (std::size_t j = 0; j < n; ++j) dst[j] += row * g_theta[j];
            }
        }
        return out;
    }

private:
    Params params_;
    double p_max_ref_ = 0.0;
    std::deque<ScanRecord> records_;
};

}  // namespace aesa
