#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "shearmix/flow.hpp"

namespace shearmix {

struct TangentState {
    TorusPoint x;
    Eigen::Vector2d u{1.0, 0.0};
    double log_norm = 0.0;
};

/// u <- DPhi u.  With renormalize, u is rescaled to unit length and the
/// log of its pre-normalization length is added to log_norm.
TangentState tangent_step(const TangentState& s, double tau1, double tau2, const Model& model, bool renormalize);

struct ProjectiveState {
    TorusPoint x;
    Eigen::Vector2d u{1.0, 0.0};
};

/// Same point and same line through the origin (u ~ -u).
bool same_projective(const ProjectiveState& a, const ProjectiveState& b, double tol);

ProjectiveState projective_step(const ProjectiveState& s, double tau1, double tau2, const Model& model);

struct TwoPointState {
    TorusPoint x;
    TorusPoint y;
};

TwoPointState two_point_step(const TwoPointState& s, double tau1, double tau2, const Model& model);

enum class InvariantFamily { diagonal, shift_shift, shift_reflect, reflect_shift, reflect_reflect };

/// The affine torus map x -> x(k) = (sq q + aq, sp p + ap) whose graph is a
/// component of the invariant set.
struct InvariantComponent {
    InvariantFamily family = InvariantFamily::diagonal;
    int sign_q = 1;
    double offset_q = 0.0;
    int sign_p = 1;
    double offset_p = 0.0;

    TorusPoint apply(TorusPoint x) const {
        return {wrap_angle(sign_q * x.q + offset_q), wrap_angle(sign_p * x.p + offset_p)};
    }
    std::string describe() const;
};

struct InvariantSet {
    std::vector<InvariantComponent> components;  // diagonal first
};

/// Union of the diagonal and the shift/reflection families built from the
/// periods, antiperiods, even axes and odd centres of f1, f2.  Each
/// candidate is kept only if the map commutes with both shears.
InvariantSet build_invariant_set(const Model& model);

/// True when sq f1(p) = f1(sp p + ap) and sp f2(q) = f2(sq q + aq) at 64 probes.
bool commutes_with_shears(const InvariantComponent& c, const Model& model);

/// min_k d(x(k), y).
double dist_to_invariant(const TwoPointState& s, const InvariantSet& delta);

struct RecurrenceProbe {
    std::size_t pairs = 0;
    std::size_t unexplained = 0;  // pairs started off Delta that later came within `threshold` of each other
    double min_distance = 0.0;
};

/// Run random pairs started at distance >= 0.1 from Delta and count the
/// ones whose points collapse together anyway.
RecurrenceProbe probe_recurrence(const Model& model, const InvariantSet& delta, std::size_t n_pairs,
                                 std::size_t steps, double T, std::uint64_t seed, double threshold = 1e-6);

}  // namespace shearmix
