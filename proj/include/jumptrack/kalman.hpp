#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "jumptrack/model.hpp"

namespace jumptrack {
namespace kalman {

namespace detail {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;
template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

template <int Dim>
Mat<Dim> symmetrize(const Mat<Dim>& m) {
    return 0.5 * (m + m.transpose());
}

/// log N(y; mean, cov) via Cholesky; throws numeric_error if cov is not PD.
template <int Dim>
double log_normal_pdf(const Vec<Dim>& y, const Vec<Dim>& mean, const Mat<Dim>& cov) {
    Eigen::LLT<Mat<Dim>> llt(cov);
    if (llt.info() != Eigen::Success) throw numeric_error("innovation covariance not positive definite");
    const Vec<Dim> diff = y - mean;
    const Vec<Dim> alpha = llt.matrixL().solve(diff);
    double log_det = 0.0;
    for (int i = 0; i < Dim; ++i) log_det += std::log(llt.matrixL()(i, i));
    return -0.5 * alpha.squaredNorm() - log_det - 0.5 * Dim * std::log(2.0 * std::numbers::pi);
}

/// One conjugate Gaussian update with identity observation model.
/// Returns the log marginal likelihood of y.
template <int Dim>
double update_block(Vec<Dim>& mean, Mat<Dim>& cov, const Vec<Dim>& y, const Mat<Dim>& meas_cov) {
    const Mat<Dim> innovation_cov = cov + meas_cov;
    const double log_marginal = log_normal_pdf<Dim>(y, mean, innovation_cov);
    Eigen::LLT<Mat<Dim>> llt(innovation_cov);
    const Mat<Dim> gain = llt.solve(cov).transpose();  // cov * innovation_cov^{-1}
    mean += gain * (y - mean);
    cov = symmetrize<Dim>(cov - gain * cov);
    return log_marginal;
}

}  // namespace detail

/// Brownian prediction over n_steps model steps: spatial covariance grows by
/// n_steps * sigma_q^2 * I; the mean and the feature block are unchanged
/// (features carry no process noise).
inline GaussianEstimate predict(GaussianEstimate est, int n_steps, double sigma_q) {
    est.cov_s += static_cast<double>(n_steps) * sigma_q * sigma_q * Eigen::Matrix2d::Identity();
    return est;
}

struct UpdateResult {
    GaussianEstimate posterior;
    double log_marginal_spatial = 0.0;
    double log_marginal_feature = 0.0;
    double log_marginal() const { return log_marginal_spatial + log_marginal_feature; }
};

/// Joint (block-factorized) Kalman update: spatial block against sigma_r^2 I,
/// feature block against R^f. The log marginal is the predictive density of
/// the measurement, log N(y_s; mu_s, cov_s + sigma_r^2 I) + log N(y_f; mu_f, cov_f + R^f).
inline UpdateResult update(const GaussianEstimate& est, const Measurement& y, double sigma_r,
                           const Eigen::Matrix3d& feature_meas_cov) {
    UpdateResult r;
    r.posterior = est;
    const Eigen::Matrix2d meas_cov_s = sigma_r * sigma_r * Eigen::Matrix2d::Identity();
    r.log_marginal_spatial =
        detail::update_block<2>(r.posterior.mean_s, r.posterior.cov_s, y.pos, meas_cov_s);
    r.log_marginal_feature =
        detail::update_block<3>(r.posterior.mean_f, r.posterior.cov_f, y.feat, feature_meas_cov);
    return r;
}

/// Feature-only predictive log density, log N(y_f; mu_f, cov_f + R^f); the
/// spatial factor for a jump association is uniform over the location and is
/// handled by the caller.
inline double feature_log_marginal(const GaussianEstimate& est, const Eigen::Vector3d& y_feat,
                                   const Eigen::Matrix3d& feature_meas_cov) {
    return detail::log_normal_pdf<3>(y_feat, est.mean_f,
                                     Eigen::Matrix3d(est.cov_f + feature_meas_cov));
}

/// Spatial filtered estimates at a target's associated steps. Steps are model
/// step indices; gaps between consecutive entries inflate the process noise.
struct FilteredTrack {
    std::vector<int> steps;
    std::vector<Eigen::Vector2d> means;
    std::vector<Eigen::Matrix2d> covs;

    std::size_t size() const { return steps.size(); }
};

/// RTS output: smoothed moments plus the lag-one cross covariances
/// cov(x_{t_n}, x_{t_{n+1}} | all data) needed by the M-step.
struct SmoothedTrack {
    std::vector<int> steps;
    std::vector<Eigen::Vector2d> means;
    std::vector<Eigen::Matrix2d> covs;
    std::vector<Eigen::Matrix2d> lag_one;  // size() - 1 entries
};

/// Rauch-Tung-Striebel backward pass with identity transitions and process
/// covariance gap * sigma_q^2 * I between consecutive associated steps.
inline SmoothedTrack rts_smooth(const FilteredTrack& track, double sigma_q) {
    if (track.size() == 0) throw data_error("rts_smooth: empty track");
    const std::size_t n = track.size();
    SmoothedTrack s;
    s.steps = track.steps;
    s.means.resize(n);
    s.covs.resize(n);
    s.lag_one.resize(n > 0 ? n - 1 : 0);
    s.means[n - 1] = track.means[n - 1];
    s.covs[n - 1] = track.covs[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        const double gap = static_cast<double>(track.steps[i + 1] - track.steps[i]);
        const Eigen::Matrix2d pred_cov =
            track.covs[i] + gap * sigma_q * sigma_q * Eigen::Matrix2d::Identity();
        Eigen::LLT<Eigen::Matrix2d> llt(pred_cov);
        if (llt.info() != Eigen::Success) throw numeric_error("rts_smooth: singular predicted covariance");
        const Eigen::Matrix2d gain = llt.solve(track.covs[i]).transpose();  // covs[i] * pred_cov^{-1}
        s.means[i] = track.means[i] + gain * (s.means[i + 1] - track.means[i]);
        s.covs[i] = detail::symmetrize<2>(
            Eigen::Matrix2d(track.covs[i] + gain * (s.covs[i + 1] - pred_cov) * gain.transpose()));
        s.lag_one[i] = gain * s.covs[i + 1];  // cov(x_{t_i}, x_{t_{i+1}} | Y)
    }
    return s;
}

/// Smoothed feature mean: with zero feature process noise this is the
/// arithmetic mean of all associated feature measurements.
inline Eigen::Vector3d feature_smoothed_mean(const std::vector<Eigen::Vector3d>& feats) {
    if (feats.empty()) throw data_error("feature_smoothed_mean: empty measurement list");
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const auto& f : feats) sum += f;
    return sum / static_cast<double>(feats.size());
}

}  // namespace kalman
}  // namespace jumptrack
