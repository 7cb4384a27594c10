#pragma once

#include <optional>
#include <vector>

#include "ppadkit/endofline.hpp"

namespace ppadkit::brouwer {

using Point = std::vector<double>;

// Hypercube side is split into six cells; all tube geometry lives in the
// central two cells per coordinate plus the slice cell in the last one.
inline constexpr double kSide = 1.0 / 6.0; // h
inline constexpr double kDefaultDelta = 1.0 / 44.0;

struct BrouwerInstance {
    eol::EndOfLineInstance eol_inst;
    int n = 0;
    double delta = kDefaultDelta;
    int dim = 0; // 2n+2

    explicit BrouwerInstance(eol::EndOfLineInstance inst, double displacement_delta = kDefaultDelta);

    // Tube info per hypercube vertex, indexed by the (2n+1)-bit vertex value.
    const eol::HInfo& vertex_info(std::uint64_t vertex) const { return info_[vertex]; }

  private:
    std::vector<eol::HInfo> info_;
};

struct PolarCoord {
    double r = 0.0;
    std::vector<double> p; // empty marks the undefined direction at r = 0
};

// Local max-norm polar coordinates around z: r = ||x-z||_inf, p = (x-z)/r.
PolarCoord maxnorm_polar(const Point& z, const Point& x);

// Max-norm angle y/(x+y); domain error when both are zero.
double theta_max(double x, double y);

struct SubcubeInfo {
    enum class Region { Picture, Frame, BelowSlice, AboveSlice, TopFacet };
    Region region = Region::Frame;
    // bits[i] = 1 iff pt[i] >= 1/2 (coordinate lies in the upper cell);
    // within the picture the first 2n+1 bits are the embedded-path vertex.
    BitVec bits;
    eol::HInfo::Status tube = eol::HInfo::Status::OffPath;
    int enter = 0; // signed 1-based axes, as in eol::HInfo
    int exit = 0;
};

SubcubeInfo locate(const BrouwerInstance& inst, const Point& pt);

// Displacement on the facet centered at `center` crossed by the path along
// signed axis `travel_axis` (1-based). pt must lie on the facet plane.
std::vector<double> facet_displacement(const BrouwerInstance& inst, const Point& center,
                                       int travel_axis, const Point& pt_on_facet);

// The full displacement g. `out` must have inst.dim entries.
void displacement(const BrouwerInstance& inst, const double* pt, double* out);
std::vector<double> displacement(const BrouwerInstance& inst, const Point& pt);

// f = pt + g, with a soundness check that no coordinate needs clamping.
Point brouwer_f(const BrouwerInstance& inst, const Point& pt);

// Maps an approximate fixed point back to an EOL candidate. Returns the
// u-part of the vertex when pt's subcube is a non-home path start/end;
// absent for home or non-terminal subcubes.
std::optional<BitVec> decode_fixed_point(const BrouwerInstance& inst, const Point& pt, double tol);

// Desk-scale refinement: iterates f from `start` until the displacement
// drops to tol (the flow is a conveyor onto the planted fixed points).
// Returns the best point visited within the step budget.
Point iterate_to_fixed_point(const BrouwerInstance& inst, const Point& start, double tol,
                             int max_steps = 200000);

} // namespace ppadkit::brouwer
