#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "jumptrack/config.hpp"
#include "jumptrack/model.hpp"

namespace jumptrack {

/// Everything the single-target transition prior depends on besides the
/// target's own previous state. `m_free` is the number of measurements not
/// yet claimed by other targets; it replaces the nominal measurement count
/// in the prior table.
struct PriorContext {
    int observed_location = 0;
    int n_locations = 1;
    int m_free = 0;
    int visit_count = 0;
    const Parameters* params = nullptr;
};

/// Birth probability with the initialization boost: p_birth plus the Poisson
/// tail P(V >= visit_count + 1) for V ~ Poisson(lambda_init), clamped to 1.
/// Monotonically non-increasing in visit_count with limit p_birth.
inline double effective_birth_prob(int visit_count, const Parameters& params) {
    double cdf = 0.0;  // P(V <= visit_count)
    double term = std::exp(-params.lambda_init);
    for (int t = 0; t <= visit_count; ++t) {
        cdf += term;
        term *= params.lambda_init / static_cast<double>(t + 1);
    }
    const double tail = std::max(0.0, 1.0 - cdf);
    return std::min(1.0, params.p_birth + tail);
}

namespace detail {

/// The five existence/location/action/association archetypes of the prior
/// table, per previous-state row. `m_free == 0` folds the detection
/// probability mass onto the silent outcomes (p_meas -> 0) so each row stays
/// normalized.
struct PriorRow {
    double stay_meas = 0.0;     // alive, no jump, same location, c = m   (per measurement)
    double stay_silent = 0.0;   // alive, no jump, same location, c = eps
    double jump_meas = 0.0;     // alive, jump, observed location, c = m  (per measurement)
    double jump_silent = 0.0;   // alive, jump, observed location, c = eps
    double jump_unknown = 0.0;  // alive, jump, unknown location,  c = eps
    double dead = 0.0;
};

inline PriorRow prior_row(Existence prev_e, int prev_l, const PriorContext& ctx) {
    const Parameters& p = *ctx.params;
    const double n_l = static_cast<double>(ctx.n_locations);
    const double p_meas = ctx.m_free > 0 ? p.p_meas : 0.0;
    PriorRow row;
    switch (prev_e) {
        case Existence::alive: {
            const double life = p.p_life();
            row.dead = p.p_death;
            if (prev_l == kUnknownLocation) {
                // Already jumped somewhere unobserved; no further jump factor.
                row.jump_meas = life * p_meas / (static_cast<double>(std::max(ctx.m_free, 1)) * n_l);
                row.jump_silent = life * (1.0 - p_meas) / n_l;
                row.jump_unknown = life * (n_l - 1.0) / n_l;
            } else {
                row.jump_meas =
                    life * p.p_jump * p_meas / (static_cast<double>(std::max(ctx.m_free, 1)) * n_l);
                row.jump_silent = life * p.p_jump * (1.0 - p_meas) / n_l;
                row.jump_unknown = life * p.p_jump * (n_l - 1.0) / n_l;
                if (prev_l == ctx.observed_location) {
                    row.stay_meas =
                        life * (1.0 - p.p_jump) * p_meas / static_cast<double>(std::max(ctx.m_free, 1));
                    row.stay_silent = life * (1.0 - p.p_jump) * (1.0 - p_meas);
                } else {
                    row.stay_silent = life * (1.0 - p.p_jump);
                }
            }
            break;
        }
        case Existence::unborn: {
            const double birth = ctx.m_free > 0 ? effective_birth_prob(ctx.visit_count, p) : 0.0;
            row.stay_meas = birth / static_cast<double>(std::max(ctx.m_free, 1));
            row.dead = 1.0 - birth;
            break;
        }
        case Existence::dead:
            row.dead = 1.0;
            break;
    }
    return row;
}

}  // namespace detail

/// Single-target transition prior p(e, u, l, c | e_prev, l_prev) with the
/// nominal measurement count replaced by ctx.m_free and, for unborn targets,
/// p_birth replaced by the visit-boosted birth probability. Combinations not
/// in the table return 0.
inline double transition_prior(Existence prev_e, int prev_l, const DiscreteState& next,
                               const PriorContext& ctx) {
    const detail::PriorRow row = detail::prior_row(prev_e, prev_l, ctx);
    const bool has_meas = next.association != kNoAssociation;
    if (has_meas && (next.association < 0 || next.association >= ctx.m_free)) return 0.0;

    if (next.e == Existence::dead) return (has_meas || next.jumped) ? 0.0 : row.dead;
    if (next.e == Existence::unborn) return 0.0;

    if (prev_e == Existence::unborn) {
        // Births are tied to a measurement and appear at the observed location.
        if (has_meas && !next.jumped && next.location == ctx.observed_location) return row.stay_meas;
        return 0.0;
    }
    if (prev_e == Existence::dead) return 0.0;

    if (!next.jumped) {
        if (next.location != prev_l || prev_l == kUnknownLocation) return 0.0;
        return has_meas ? row.stay_meas : row.stay_silent;
    }
    if (next.location == kUnknownLocation) return has_meas ? 0.0 : row.jump_unknown;
    if (next.location == ctx.observed_location) return has_meas ? row.jump_meas : row.jump_silent;
    return 0.0;
}

/// Lists every nonzero-probability successor of `prev`. Probabilities sum to
/// 1 within 1e-12 for any valid context (including m_free = 0).
inline std::vector<std::pair<DiscreteState, double>> enumerate_transitions(Existence prev_e, int prev_l,
                                                                           const PriorContext& ctx) {
    const detail::PriorRow row = detail::prior_row(prev_e, prev_l, ctx);
    std::vector<std::pair<DiscreteState, double>> out;
    auto add = [&out](Existence e, int l, bool jumped, int c, double prob) {
        if (prob > 0.0) out.push_back({DiscreteState{e, l, jumped, c}, prob});
    };
    if (prev_e == Existence::dead) {
        add(Existence::dead, prev_l, false, kNoAssociation, 1.0);
        return out;
    }
    if (prev_e == Existence::unborn) {
        for (int m = 0; m < ctx.m_free; ++m)
            add(Existence::alive, ctx.observed_location, false, m, row.stay_meas);
        add(Existence::dead, kUnknownLocation, false, kNoAssociation, row.dead);
        return out;
    }
    for (int m = 0; m < ctx.m_free; ++m) add(Existence::alive, prev_l, false, m, row.stay_meas);
    add(Existence::alive, prev_l, false, kNoAssociation, row.stay_silent);
    for (int m = 0; m < ctx.m_free; ++m)
        add(Existence::alive, ctx.observed_location, true, m, row.jump_meas);
    add(Existence::alive, ctx.observed_location, true, kNoAssociation, row.jump_silent);
    add(Existence::alive, kUnknownLocation, true, kNoAssociation, row.jump_unknown);
    add(Existence::dead, prev_l, false, kNoAssociation, row.dead);
    return out;
}

}  // namespace jumptrack
