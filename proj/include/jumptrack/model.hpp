#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace jumptrack {

/// Raised on malformed or inconsistent input data (exit code 2 in the CLI).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on numerical failure such as a singular innovation covariance
/// (exit code 3 in the CLI).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kFormatTag = "jumptrack/v1";

/// Sentinel location id for "jumped somewhere we have not observed".
inline constexpr int kUnknownLocation = -1;

/// Sentinel association value for "produced no measurement".
inline constexpr int kNoAssociation = -1;

/// One detection: 2D position plus a 3D appearance feature.
struct Measurement {
    Eigen::Vector2d pos;
    Eigen::Vector3d feat;
};

/// All measurements gathered during one visit to one location.
struct ObservationFrame {
    int k = 0;
    int location = 0;
    std::vector<Measurement> measurements;
};

enum class Existence : std::uint8_t { unborn, alive, dead };

/// Discrete per-target state sampled at one step: existence, location,
/// whether the step was a jump, and the measurement association (or none).
struct DiscreteState {
    Existence e = Existence::unborn;
    int location = kUnknownLocation;
    bool jumped = false;
    int association = kNoAssociation;
};

/// Rao-Blackwellized continuous state: independent spatial and feature
/// Gaussians (the paper's factorized Kalman estimates).
struct GaussianEstimate {
    Eigen::Vector2d mean_s = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov_s = Eigen::Matrix2d::Identity();
    Eigen::Vector3d mean_f = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov_f = Eigen::Matrix3d::Identity();
};

/// Per-step discrete flags kept for parameter learning.
struct StepFlag {
    bool jumped = false;
    std::int32_t association = kNoAssociation;
};

/// Filtered spatial estimate frozen at an associated step, plus the
/// measurement feature; inputs to the smoother and the M-step.
struct AssociatedStep {
    int k = 0;
    int measurement = kNoAssociation;
    Eigen::Vector2d mean_s;
    Eigen::Matrix2d cov_s;
    Eigen::Vector3d feat;
};

/// One target inside one particle: current discrete/continuous state plus
/// the recorded trajectory needed by the EM machinery.
struct TargetTrack {
    Existence existence = Existence::unborn;
    int location = kUnknownLocation;
    GaussianEstimate estimate;
    int birth_step = -1;
    int death_step = -1;                   // first step with e = dead, -1 while alive
    std::vector<StepFlag> flags;           // one entry per alive step, starting at birth_step
    std::vector<AssociatedStep> associated;
};

/// One joint hypothesis over all targets. Weights are maintained in log
/// domain; normalized linear weights are produced on demand.
struct Particle {
    double log_weight = 0.0;
    std::map<int, TargetTrack> targets;
};

struct ReportedTarget {
    int id = 0;
    double weight = 0.0;
    int location = kUnknownLocation;
    Eigen::Vector2d pos;
    Eigen::Vector3d feat;
};

/// Posterior summary for one step: estimated target count, per-target
/// summaries, and the measurement -> identity map from clustering.
struct StepReport {
    int k = 0;
    int location = 0;
    int n_targets = 0;
    std::vector<ReportedTarget> targets;
    std::vector<int> assignments;  // per measurement: target identity
};

struct GroundTruthObject {
    int id = 0;
    bool alive = true;
    int location = 0;
    Eigen::Vector2d pos;
    Eigen::Vector3d feat;
};

struct GroundTruthFrame {
    int k = 0;
    std::vector<GroundTruthObject> objects;
};

/// Per-step provenance: measurement index -> true object id, or -1 for clutter.
struct ProvenanceFrame {
    int k = 0;
    std::vector<int> source;
};

// ---- JSON Lines I/O ----
//
// All logs are JSON Lines with a leading header line {"format":"jumptrack/v1"}.
// Readers accept headerless files for convenience; writers always emit the header.

namespace detail {

inline nlohmann::json vec2_json(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
inline nlohmann::json vec3_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

inline Eigen::Vector2d json_vec2(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw data_error(std::string(what) + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Eigen::Vector3d json_vec3(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw data_error(std::string(what) + ": expected 3 components");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline bool is_header_line(const nlohmann::json& j) {
    return j.is_object() && j.contains("format");
}

inline void check_header(const nlohmann::json& j, const std::string& path) {
    const auto fmt = j.at("format").get<std::string>();
    if (fmt != kFormatTag)
        throw data_error(path + ": unsupported format \"" + fmt + "\" (expected " + kFormatTag + ")");
}

/// Parses a JSONL file, skipping an optional header line; calls fn(json, line_number).
template <typename Fn>
void read_jsonl(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw data_error(path + ": parse error at line " + std::to_string(line_no) + ": " + e.what());
        }
        if (first && is_header_line(j)) {
            check_header(j, path);
            first = false;
            continue;
        }
        first = false;
        try {
            fn(j, line_no);
        } catch (const nlohmann::json::exception& e) {
            throw data_error(path + ": invalid record at line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path);
    out << nlohmann::json{{"format", kFormatTag}}.dump() << "\n";
    return out;
}

}  // namespace detail

inline std::vector<ObservationFrame> read_detection_log(const std::string& path) {
    std::vector<ObservationFrame> frames;
    detail::read_jsonl(path, [&](const nlohmann::json& j, int line_no) {
        ObservationFrame f;
        f.k = j.at("k").get<int>();
        f.location = j.at("location").get<int>();
        for (const auto& m : j.at("measurements")) {
            Measurement meas;
            meas.pos = detail::json_vec2(m.at("pos"), "pos");
            meas.feat = detail::json_vec3(m.at("feat"), "feat");
            f.measurements.push_back(meas);
        }
        if (!frames.empty() && f.k <= frames.back().k)
            throw data_error(path + ": non-monotone step index at line " + std::to_string(line_no) +
                             " (k=" + std::to_string(f.k) + " after k=" + std::to_string(frames.back().k) + ")");
        frames.push_back(std::move(f));
    });
    return frames;
}

inline void write_detection_log(const std::vector<ObservationFrame>& frames, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& f : frames) {
        nlohmann::json ms = nlohmann::json::array();
        for (const auto& m : f.measurements)
            ms.push_back({{"pos", detail::vec2_json(m.pos)}, {"feat", detail::vec3_json(m.feat)}});
        out << nlohmann::json{{"k", f.k}, {"location", f.location}, {"measurements", ms}}.dump() << "\n";
    }
}

inline std::vector<GroundTruthFrame> read_truth_log(const std::string& path) {
    std::vector<GroundTruthFrame> frames;
    detail::read_jsonl(path, [&](const nlohmann::json& j, int) {
        GroundTruthFrame f;
        f.k = j.at("k").get<int>();
        for (const auto& o : j.at("objects")) {
            GroundTruthObject obj;
            obj.id = o.at("id").get<int>();
            obj.alive = o.at("alive").get<bool>();
            obj.location = o.at("location").get<int>();
            obj.pos = detail::json_vec2(o.at("pos"), "pos");
            obj.feat = detail::json_vec3(o.at("feat"), "feat");
            f.objects.push_back(obj);
        }
        frames.push_back(std::move(f));
    });
    return frames;
}

inline void write_truth_log(const std::vector<GroundTruthFrame>& frames, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& f : frames) {
        nlohmann::json objs = nlohmann::json::array();
        for (const auto& o : f.objects)
            objs.push_back({{"id", o.id},
                            {"alive", o.alive},
                            {"location", o.location},
                            {"pos", detail::vec2_json(o.pos)},
                            {"feat", detail::vec3_json(o.feat)}});
        out << nlohmann::json{{"k", f.k}, {"objects", objs}}.dump() << "\n";
    }
}

inline std::vector<ProvenanceFrame> read_provenance(const std::string& path) {
    std::vector<ProvenanceFrame> frames;
    detail::read_jsonl(path, [&](const nlohmann::json& j, int) {
        ProvenanceFrame f;
        f.k = j.at("k").get<int>();
        f.source = j.at("source").get<std::vector<int>>();
        frames.push_back(std::move(f));
    });
    return frames;
}

inline void write_provenance(const std::vector<ProvenanceFrame>& frames, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& f : frames)
        out << nlohmann::json{{"k", f.k}, {"source", f.source}}.dump() << "\n";
}

inline std::vector<StepReport> read_track_report(const std::string& path) {
    std::vector<StepReport> reports;
    detail::read_jsonl(path, [&](const nlohmann::json& j, int) {
        StepReport r;
        r.k = j.at("k").get<int>();
        r.location = j.at("location").get<int>();
        r.n_targets = j.at("n_targets").get<int>();
        for (const auto& t : j.at("targets")) {
            ReportedTarget rt;
            rt.id = t.at("id").get<int>();
            rt.weight = t.at("weight").get<double>();
            rt.location = t.at("location").get<int>();
            rt.pos = detail::json_vec2(t.at("pos"), "pos");
            rt.feat = detail::json_vec3(t.at("feat"), "feat");
            r.targets.push_back(rt);
        }
        r.assignments = j.at("assignments").get<std::vector<int>>();
        reports.push_back(std::move(r));
    });
    return reports;
}

inline void write_track_report(const std::vector<StepReport>& reports, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& r : reports) {
        nlohmann::json ts = nlohmann::json::array();
        for (const auto& t : r.targets)
            ts.push_back({{"id", t.id},
                          {"weight", t.weight},
                          {"location", t.location},
                          {"pos", detail::vec2_json(t.pos)},
                          {"feat", detail::vec3_json(t.feat)}});
        out << nlohmann::json{{"k", r.k},
                              {"location", r.location},
                              {"n_targets", r.n_targets},
                              {"targets", ts},
                              {"assignments", r.assignments}}
                   .dump()
            << "\n";
    }
}

}  // namespace jumptrack
