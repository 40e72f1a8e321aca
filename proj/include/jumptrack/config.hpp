#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumptrack/model.hpp"
#include "jumptrack/random.hpp"

namespace jumptrack {

/// All model constants, one field per model symbol:
///
///   p_jump            global per-step jump probability
///   p_meas            detection probability of a co-located target
///   p_birth           prior birth probability per candidate measurement
///   p_death           per-step death probability
///   sigma_q           spatial process noise std dev per step  (sigma_q)
///   sigma_r           spatial measurement noise std dev       (sigma_r)
///   feature_meas_cov  3x3 feature measurement covariance      (R^f)
///   clutter_area      spatial clutter support                 (A_k)
///   feature_support   feature clutter support                 (S^f)
///   lambda_init       Poisson mean of the initialization birth boost (lambda)
///   kappa             identity clustering threshold           (kappa)
///
/// p_life = 1 - p_death is always derived, never stored.
struct Parameters {
    double p_jump = 0.03;
    double p_meas = 0.98;
    double p_birth = 0.01;
    double p_death = 0.005;
    double sigma_q = 0.15;
    double sigma_r = 0.35;
    Eigen::Matrix3d feature_meas_cov = Eigen::Matrix3d::Identity() * (0.15 * 0.15);
    double clutter_area = 20.0;
    double feature_support = 1.0;
    double lambda_init = 1.0;
    double kappa = 0.5;
    int n_particles = 300;
    int n_gibbs = 50;
    int n_burnin = 25;

    double p_life() const { return 1.0 - p_death; }
};

/// Synthetic scenario description. `feature_box` volume should equal
/// Parameters::feature_support when the two are used together; the
/// simulator draws clutter features uniformly from this box.
struct ScenarioConfig {
    int n_locations = 3;
    int n_objects_initial = 5;
    int horizon = 30;
    std::string visit_policy = "round-robin";  // or "uniform-random" or "explicit"
    std::vector<int> visit_schedule;           // used when visit_policy == "explicit"
    double clutter_rate = 0.0;
    std::array<std::array<double, 2>, 3> feature_box = {{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}};
    double location_extent = 4.47213595499958;  // sqrt(20), matches the default clutter_area
    bool enable_births = false;
    bool enable_deaths = false;
    std::uint64_t seed = 0;

    double feature_box_volume() const {
        double v = 1.0;
        for (const auto& d : feature_box) v *= d[1] - d[0];
        return v;
    }
};

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw data_error("validation error: " + message);
}

inline void check_probability(double v, const char* name) {
    require(v >= 0.0 && v <= 1.0, std::string(name) + " out of [0,1]");
}

}  // namespace detail

inline void validate(const Parameters& p) {
    using detail::require;
    detail::check_probability(p.p_jump, "p_jump");
    detail::check_probability(p.p_meas, "p_meas");
    detail::check_probability(p.p_birth, "p_birth");
    detail::check_probability(p.p_death, "p_death");
    detail::check_probability(p.kappa, "kappa");
    require(p.p_birth < p.p_jump, "p_birth must be < p_jump");
    require(p.p_death < p.p_jump, "p_death must be < p_jump");
    require(p.sigma_q > 0.0, "sigma_q must be > 0");
    require(p.sigma_r > 0.0, "sigma_r must be > 0");
    require(p.clutter_area > 0.0, "clutter_area must be > 0");
    require(p.feature_support > 0.0, "feature_support must be > 0");
    require(p.lambda_init >= 0.0, "lambda_init must be >= 0");
    require(p.n_particles >= 1, "n_particles must be >= 1");
    require(p.n_gibbs >= 1, "n_gibbs must be >= 1");
    require(p.n_burnin >= 0, "n_burnin must be >= 0");

    const Eigen::Matrix3d& r = p.feature_meas_cov;
    const double scale = std::max(1e-30, r.cwiseAbs().maxCoeff());
    require((r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale, "R^f not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(r);
    require(es.eigenvalues().minCoeff() > 0.0, "R^f not positive definite");
}

inline void validate(const ScenarioConfig& s) {
    using detail::require;
    require(s.n_locations >= 1, "n_locations must be >= 1");
    require(s.n_objects_initial >= 0, "n_objects_initial must be >= 0");
    require(s.horizon >= 1, "horizon must be >= 1");
    require(s.clutter_rate >= 0.0, "clutter_rate must be >= 0");
    require(s.location_extent > 0.0, "location_extent must be > 0");
    for (const auto& d : s.feature_box)
        require(d[1] > d[0], "feature_box interval must have positive length");
    if (s.visit_policy == "explicit") {
        require(static_cast<int>(s.visit_schedule.size()) == s.horizon,
                "explicit visit_schedule length must equal horizon");
        for (int l : s.visit_schedule)
            require(l >= 0 && l < s.n_locations, "visit_schedule entry out of [0, n_locations)");
    } else {
        require(s.visit_policy == "round-robin" || s.visit_policy == "uniform-random",
                "visit_policy must be explicit, round-robin, or uniform-random");
    }
}

/// Expands the visit policy into a concrete location per step.
inline std::vector<int> resolve_schedule(const ScenarioConfig& s) {
    std::vector<int> schedule(static_cast<std::size_t>(s.horizon));
    if (s.visit_policy == "explicit") {
        schedule = s.visit_schedule;
    } else if (s.visit_policy == "round-robin") {
        for (int k = 0; k < s.horizon; ++k) schedule[static_cast<std::size_t>(k)] = k % s.n_locations;
    } else {
        auto rng = make_stream(s.seed, 0x5c4edu);
        std::uniform_int_distribution<int> pick(0, s.n_locations - 1);
        for (auto& l : schedule) l = pick(rng);
    }
    return schedule;
}

// ---- JSON (de)serialization; canonical field order for byte-stable round trips ----

namespace detail {

inline nlohmann::json matrix3_json(const Eigen::Matrix3d& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

inline Eigen::Matrix3d json_matrix3(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw data_error("feature_meas_cov: expected 3 rows");
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != 3) throw data_error("feature_meas_cov: expected 3 columns");
        for (int c = 0; c < 3; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

template <typename T>
void assign_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                                const std::string& what) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool found = false;
        for (const auto& k : known)
            if (k == key) { found = true; break; }
        if (!found) throw data_error(what + ": unknown field \"" + key + "\"");
    }
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const Parameters& p) {
    nlohmann::ordered_json j;
    j["p_jump"] = p.p_jump;
    j["p_meas"] = p.p_meas;
    j["p_birth"] = p.p_birth;
    j["p_death"] = p.p_death;
    j["sigma_q"] = p.sigma_q;
    j["sigma_r"] = p.sigma_r;
    j["feature_meas_cov"] = detail::matrix3_json(p.feature_meas_cov);
    j["clutter_area"] = p.clutter_area;
    j["feature_support"] = p.feature_support;
    j["lambda_init"] = p.lambda_init;
    j["kappa"] = p.kappa;
    j["n_particles"] = p.n_particles;
    j["n_gibbs"] = p.n_gibbs;
    j["n_burnin"] = p.n_burnin;
    return j;
}

inline Parameters parameters_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"p_jump", "p_meas", "p_birth", "p_death", "sigma_q", "sigma_r",
                                 "feature_meas_cov", "clutter_area", "feature_support", "lambda_init",
                                 "kappa", "n_particles", "n_gibbs", "n_burnin"},
                                "parameters");
    Parameters p;
    detail::assign_if_present(j, "p_jump", p.p_jump);
    detail::assign_if_present(j, "p_meas", p.p_meas);
    detail::assign_if_present(j, "p_birth", p.p_birth);
    detail::assign_if_present(j, "p_death", p.p_death);
    detail::assign_if_present(j, "sigma_q", p.sigma_q);
    detail::assign_if_present(j, "sigma_r", p.sigma_r);
    if (j.contains("feature_meas_cov")) p.feature_meas_cov = detail::json_matrix3(j["feature_meas_cov"]);
    detail::assign_if_present(j, "clutter_area", p.clutter_area);
    detail::assign_if_present(j, "feature_support", p.feature_support);
    detail::assign_if_present(j, "lambda_init", p.lambda_init);
    detail::assign_if_present(j, "kappa", p.kappa);
    detail::assign_if_present(j, "n_particles", p.n_particles);
    detail::assign_if_present(j, "n_gibbs", p.n_gibbs);
    detail::assign_if_present(j, "n_burnin", p.n_burnin);
    validate(p);
    return p;
}

inline nlohmann::ordered_json to_json(const ScenarioConfig& s) {
    nlohmann::ordered_json j;
    j["n_locations"] = s.n_locations;
    j["n_objects_initial"] = s.n_objects_initial;
    j["horizon"] = s.horizon;
    j["visit_policy"] = s.visit_policy;
    if (s.visit_policy == "explicit") j["visit_schedule"] = s.visit_schedule;
    j["clutter_rate"] = s.clutter_rate;
    j["feature_box"] = {{s.feature_box[0][0], s.feature_box[0][1]},
                        {s.feature_box[1][0], s.feature_box[1][1]},
                        {s.feature_box[2][0], s.feature_box[2][1]}};
    j["location_extent"] = s.location_extent;
    j["enable_births"] = s.enable_births;
    j["enable_deaths"] = s.enable_deaths;
    j["seed"] = s.seed;
    return j;
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"n_locations", "n_objects_initial", "horizon", "visit_policy",
                                 "visit_schedule", "clutter_rate", "feature_box", "location_extent",
                                 "enable_births", "enable_deaths", "seed"},
                                "scenario");
    ScenarioConfig s;
    detail::assign_if_present(j, "n_locations", s.n_locations);
    detail::assign_if_present(j, "n_objects_initial", s.n_objects_initial);
    detail::assign_if_present(j, "horizon", s.horizon);
    detail::assign_if_present(j, "visit_policy", s.visit_policy);
    detail::assign_if_present(j, "visit_schedule", s.visit_schedule);
    if (!s.visit_schedule.empty() && !j.contains("visit_policy")) s.visit_policy = "explicit";
    detail::assign_if_present(j, "clutter_rate", s.clutter_rate);
    if (j.contains("feature_box")) {
        const auto& fb = j["feature_box"];
        if (!fb.is_array() || fb.size() != 3) throw data_error("feature_box: expected 3 intervals");
        for (int d = 0; d < 3; ++d) {
            const auto& iv = fb[static_cast<std::size_t>(d)];
            if (!iv.is_array() || iv.size() != 2) throw data_error("feature_box: expected [lo, hi]");
            s.feature_box[static_cast<std::size_t>(d)] = {iv[0].get<double>(), iv[1].get<double>()};
        }
    }
    detail::assign_if_present(j, "location_extent", s.location_extent);
    detail::assign_if_present(j, "enable_births", s.enable_births);
    detail::assign_if_present(j, "enable_deaths", s.enable_deaths);
    detail::assign_if_present(j, "seed", s.seed);
    validate(s);
    return s;
}

namespace detail {

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path + ": parse error: " + e.what());
    }
}

}  // namespace detail

inline Parameters load_parameters(const std::string& path) {
    return parameters_from_json(detail::parse_file(path));
}

inline void save_parameters(const Parameters& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path);
    out << to_json(p).dump(2) << "\n";
}

inline ScenarioConfig load_scenario(const std::string& path) {
    return scenario_from_json(detail::parse_file(path));
}

inline void save_scenario(const ScenarioConfig& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path);
    out << to_json(s).dump(2) << "\n";
}

}  // namespace jumptrack
