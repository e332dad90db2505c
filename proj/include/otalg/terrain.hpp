#ifndef OTALG_TERRAIN_HPP
#define OTALG_TERRAIN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "otalg/errors.hpp"
#include "otalg/vec3.hpp"

namespace otalg {

enum class Axis : int { X = 0, Y = 1 };

/// One step of the terrain staircase: top height above the landing plane and
/// horizontal distance of its inner edge from the landing site.
struct TerrainStep {
    double height = 0.0; // [m]
    double width = 0.0;  // [m]
};

/// Step-polygon approximation of the terrain around the landing site.
///
/// Each horizontal axis carries its own staircase (heights and widths strictly
/// increasing away from the origin; step 0 is implicitly the landing site at
/// h = w = 0). The terrain is flat-topped beyond the outermost step. The
/// plateau angle shapes only the outermost barrier segment, not the ground.
struct TerrainProfile {
    std::vector<TerrainStep> steps_x;
    std::vector<TerrainStep> steps_y;
    double plateau_angle = 0.0; // [rad], slope of the (n+1)-th barrier, in (0, pi/2)

    const std::vector<TerrainStep>& steps(Axis a) const {
        return a == Axis::X ? steps_x : steps_y;
    }

    void validate() const {
        for (const auto* sp : {&steps_x, &steps_y}) {
            if (sp->empty())
                throw ValidationError("terrain: at least one step per axis required");
            double h_prev = 0.0, w_prev = 0.0;
            for (const TerrainStep& s : *sp) {
                if (!(s.height > h_prev))
                    throw ValidationError("terrain: step heights must be positive and strictly increasing");
                if (!(s.width > w_prev))
                    throw ValidationError("terrain: step widths must be positive and strictly increasing");
                h_prev = s.height;
                w_prev = s.width;
            }
        }
        if (!(plateau_angle > 0.0) || !(plateau_angle < M_PI / 2.0))
            throw ValidationError("terrain: plateau angle must lie in (0, pi/2)");
    }
};

/// One piecewise segment of the horizontal barrier polynomial
/// rho = +/- (beta * (r_z + gamma)^(1/lambda) + alpha), valid on [h_lo, h_hi].
struct BarrierSegment {
    double alpha = 0.0; // [m]
    double beta = 0.0;
    double gamma = 0.0; // [m]
    int lambda = 2;     // even >= 2 for inner segments, 1 for the plateau segment
    double h_lo = 0.0;  // altitude band covered by this segment
    double h_hi = 0.0;  // +inf for the plateau segment
};

/// Precomputed barrier polynomials for both horizontal axes plus the vertical
/// safety margin. Immutable after construction; safe to share across threads.
struct BarrierSet {
    std::array<std::vector<BarrierSegment>, 2> segments; // [axis], size n+1 each
    double delta = 0.0;                                  // [m], vertical safety margin

    const std::vector<BarrierSegment>& axis_segments(Axis a) const {
        return segments[static_cast<int>(a)];
    }
};

/// Active barrier values and signed distances at one lander position.
struct BarrierEvaluation {
    Vec3 rho;                    // active barrier per axis [m]
    Vec3 d;                      // signed distance r_i - rho_i per axis [m]
    std::array<int, 2> segment;  // horizontal segment index used (1-based)
};

namespace detail {

inline void validate_lambdas(const std::vector<int>& lambdas, std::size_t n_steps) {
    if (lambdas.size() != n_steps)
        throw ValidationError("barriers: need one lambda per terrain step");
    for (int l : lambdas) {
        if (l < 2 || l % 2 != 0)
            throw ValidationError("barriers: lambda must be even and >= 2");
    }
}

} // namespace detail

/// Builds the piecewise barrier polynomials for a terrain profile.
///
/// Inner segments j = 1..n: alpha = w_{j-1}, beta = (w_j - w_{j-1}) /
/// (h_j - h_{j-1})^{1/lambda_j}, gamma = -h_{j-1}. The outermost segment is
/// linear with slope set by the plateau angle. `delta` may not exceed the
/// smallest step rise, otherwise the floor of one step would sit above the
/// top of the next.
inline BarrierSet build_barriers(const TerrainProfile& profile,
                                 const std::vector<int>& lambdas_x,
                                 const std::vector<int>& lambdas_y,
                                 double delta) {
    profile.validate();
    detail::validate_lambdas(lambdas_x, profile.steps_x.size());
    detail::validate_lambdas(lambdas_y, profile.steps_y.size());

    double min_rise = std::numeric_limits<double>::infinity();
    for (const auto* sp : {&profile.steps_x, &profile.steps_y}) {
        double h_prev = 0.0;
        for (const TerrainStep& s : *sp) {
            min_rise = std::min(min_rise, s.height - h_prev);
            h_prev = s.height;
        }
    }
    if (!(delta > 0.0) || !(delta < min_rise))
        throw ValidationError("barriers: delta must be positive and smaller than every step rise");

    BarrierSet out;
    out.delta = delta;
    for (Axis axis : {Axis::X, Axis::Y}) {
        const auto& steps = profile.steps(axis);
        const auto& lambdas = axis == Axis::X ? lambdas_x : lambdas_y;
        auto& segs = out.segments[static_cast<int>(axis)];
        segs.reserve(steps.size() + 1);
        double h_prev = 0.0, w_prev = 0.0;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            BarrierSegment s;
            s.alpha = w_prev;
            s.beta = (steps[j].width - w_prev) /
                     std::pow(steps[j].height - h_prev, 1.0 / lambdas[j]);
            s.gamma = -h_prev;
            s.lambda = lambdas[j];
            s.h_lo = h_prev;
            s.h_hi = steps[j].height;
            segs.push_back(s);
            h_prev = steps[j].height;
            w_prev = steps[j].width;
        }
        BarrierSegment plateau;
        plateau.alpha = w_prev;
        plateau.beta = std::tan(M_PI / 2.0 - profile.plateau_angle);
        plateau.gamma = -h_prev;
        plateau.lambda = 1;
        plateau.h_lo = h_prev;
        plateau.h_hi = std::numeric_limits<double>::infinity();
        segs.push_back(plateau);
    }
    return out;
}

/// Evaluates the horizontal barrier for one axis at altitude r_z.
///
/// Selects the segment whose altitude band contains r_z (the plateau segment
/// above the outermost step) and returns the barrier offset with the sign of
/// `side`, together with the 1-based segment index.
inline std::pair<double, int> horizontal_barrier(const BarrierSet& barriers, Axis axis,
                                                 double r_z, double side) {
    if (r_z < 0.0)
        throw DomainError("horizontal_barrier: r_z must be non-negative");
    const auto& segs = barriers.axis_segments(axis);
    const double sign = side < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < segs.size(); ++j) {
        const BarrierSegment& s = segs[j];
        if (r_z <= s.h_hi) {
            const double base = r_z + s.gamma; // r_z - h_{j-1}, >= 0 inside the band
            const double rho = s.lambda == 1
                                   ? s.beta * base + s.alpha
                                   : s.beta * std::pow(base, 1.0 / s.lambda) + s.alpha;
            return {sign * rho, static_cast<int>(j) + 1};
        }
    }
    // unreachable: the plateau segment has h_hi = +inf
    throw DomainError("horizontal_barrier: no segment covers r_z");
}

/// Terrain elevation directly below (x, y): the ground-truth step staircase,
/// not the barrier. Flat at the outermost height beyond the last step; the
/// two axes contribute independently and the taller one wins.
inline double terrain_height(const TerrainProfile& profile, double x, double y) {
    double h = 0.0;
    for (Axis axis : {Axis::X, Axis::Y}) {
        const double lateral = std::fabs(axis == Axis::X ? x : y);
        for (const TerrainStep& s : profile.steps(axis)) {
            if (lateral >= s.width)
                h = std::max(h, s.height);
        }
    }
    return h;
}

/// True iff the point is strictly below the terrain surface.
inline bool check_collision(const TerrainProfile& profile, const Vec3& r) {
    return r.z < terrain_height(profile, r.x, r.y);
}

/// Vertical barrier (floor) below the lander.
///
/// The floor tracks the terrain step directly below the lander's lateral
/// position (infinity norm of (r_x, r_y)), raised by delta, and is capped at
/// the top of the altitude band containing r_z. Without the lateral
/// condition a lander over the canyon would bounce off the floors of steps
/// it is not even above; the selection here keeps the floor attached to the
/// ground actually underneath. Candidate floors are computed per axis and
/// the larger one is returned, which is the conservative choice when the x
/// and y staircases differ.
inline double vertical_barrier(const BarrierSet& barriers, const TerrainProfile& profile,
                               const Vec3& r) {
    if (r.z < 0.0)
        throw DomainError("vertical_barrier: r_z must be non-negative");
    const double lateral = horizontal_inf_norm(r);
    double floor = 0.0;
    for (Axis axis : {Axis::X, Axis::Y}) {
        const auto& steps = profile.steps(axis);
        const std::size_t n = steps.size();
        // altitude band: number of step tops at or below r_z (n when above all)
        std::size_t band = 0;
        while (band < n && r.z > steps[band].height)
            ++band;
        // outermost step whose width the lateral position has passed
        std::size_t under = 0;
        while (under < n && lateral >= steps[under].width)
            ++under;
        const std::size_t idx = std::min(under, std::min(band + 1, n));
        const double base = idx == 0 ? 0.0 : steps[idx - 1].height;
        floor = std::max(floor, base + barriers.delta);
    }
    return floor;
}

/// Evaluates all three barriers at the lander position. Horizontal barriers
/// are taken on the lander's own side (positive side at r_i = 0), so inside
/// the envelope sign(d_i) = -sign(r_i).
inline BarrierEvaluation evaluate_barriers(const BarrierSet& barriers,
                                           const TerrainProfile& profile, const Vec3& r) {
    BarrierEvaluation ev;
    for (Axis axis : {Axis::X, Axis::Y}) {
        const int i = static_cast<int>(axis);
        const double ri = axis == Axis::X ? r.x : r.y;
        const double side = ri < 0.0 ? -1.0 : 1.0;
        auto [rho, seg] = horizontal_barrier(barriers, axis, r.z, side);
        ev.rho[i] = rho;
        ev.d[i] = ri - rho;
        ev.segment[i] = seg;
    }
    ev.rho.z = vertical_barrier(barriers, profile, r);
    ev.d.z = r.z - ev.rho.z;
    return ev;
}

} // namespace otalg

#endif
