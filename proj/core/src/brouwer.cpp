#include "ppadkit/brouwer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace ppadkit::brouwer {

namespace {

constexpr double kHalf = 0.5;
constexpr double kLo = 2.0 / 6.0;  // picture lower wall
constexpr double kHi = 4.0 / 6.0;  // picture upper wall
constexpr double kR1 = kSide / 8.0;
constexpr double kR2 = kSide / 4.0;
constexpr double kR3 = kSide / 2.0;
constexpr int kMaxDim = 32;

double cell_center(bool upper) { return upper ? 7.0 / 12.0 : 5.0 / 12.0; }

// Ring weights of the radial profile: a partition of unity peaking at the
// anchor radii {0, h/8, h/4, h/2} and saturating beyond h/2.
struct Rings {
    double w0, w1, w2, w3;
};

Rings ring_weights(double r) {
    auto seg = [](double x) { return std::clamp(x, 0.0, 1.0); };
    double s0 = seg(r / kR1);
    double s1 = seg((r - kR1) / (kR2 - kR1));
    double s2 = seg((r - kR2) / (kR3 - kR2));
    return {1.0 - s0, s0 - s1, s1 - s2, s2};
}

// Facet field: w0 along the travel axis, w1 of suction toward the center,
// w2 against the travel axis, w3 upward.
void facet_field(int dim, double delta, const double* center, int travel_axis, const double* pt,
                 double* out) {
    double p[kMaxDim];
    double r = 0.0;
    for (int i = 0; i < dim; ++i) {
        p[i] = pt[i] - center[i];
        r = std::max(r, std::abs(p[i]));
    }
    if (r > 0.0)
        for (int i = 0; i < dim; ++i) p[i] /= r;
    Rings w = ring_weights(r);
    for (int i = 0; i < dim; ++i) out[i] = -w.w1 * delta * p[i];
    out[dim - 1] += w.w3 * delta;
    int ax = std::abs(travel_axis) - 1;
    out[ax] += (travel_axis > 0 ? 1.0 : -1.0) * (w.w0 - w.w2) * delta;
}

// Off-tube / frame / below-slice default: straight up the special axis.
void default_field(int dim, double delta, double* out) {
    std::fill(out, out + dim, 0.0);
    out[dim - 1] = delta;
}

} // namespace

BrouwerInstance::BrouwerInstance(eol::EndOfLineInstance inst, double displacement_delta)
    : eol_inst(std::move(inst)), n(eol_inst.n), delta(displacement_delta), dim(2 * n + 2) {
    if (!(delta > 0.0 && delta <= 0.125))
        throw std::invalid_argument("delta must lie in (0, 1/8]");
    if (dim > kMaxDim) throw std::invalid_argument("dimension too large");
    const std::uint64_t count = std::uint64_t{1} << (2 * n + 1);
    info_.reserve(count);
    for (std::uint64_t v = 0; v < count; ++v)
        info_.push_back(eol::h_info(eol_inst, bits_from_uint(v, 2 * n + 1)));
}

PolarCoord maxnorm_polar(const Point& z, const Point& x) {
    if (z.size() != x.size()) throw std::invalid_argument("dimension mismatch");
    PolarCoord pc;
    for (std::size_t i = 0; i < x.size(); ++i) pc.r = std::max(pc.r, std::abs(x[i] - z[i]));
    if (pc.r > 0.0) {
        pc.p.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) pc.p[i] = (x[i] - z[i]) / pc.r;
    }
    return pc;
}

double theta_max(double x, double y) {
    if (x < 0.0 || y < 0.0) throw std::invalid_argument("theta_max needs nonnegative inputs");
    if (x + y == 0.0) throw std::domain_error("theta_max undefined at (0, 0)");
    return y / (x + y);
}

SubcubeInfo locate(const BrouwerInstance& inst, const Point& pt) {
    if (static_cast<int>(pt.size()) != inst.dim) throw std::invalid_argument("dimension mismatch");
    SubcubeInfo info;
    info.bits.resize(inst.dim);
    for (int i = 0; i < inst.dim; ++i) info.bits[i] = pt[i] >= kHalf ? 1 : 0;

    const double last = pt[inst.dim - 1];
    if (last >= 1.0) {
        info.region = SubcubeInfo::Region::TopFacet;
        return info;
    }
    if (last >= kHalf) {
        info.region = SubcubeInfo::Region::AboveSlice;
        return info;
    }
    if (last < kLo) {
        info.region = SubcubeInfo::Region::BelowSlice;
        return info;
    }
    for (int i = 0; i < inst.dim - 1; ++i)
        if (pt[i] < kLo || pt[i] >= kHi) {
            info.region = SubcubeInfo::Region::Frame;
            return info;
        }
    info.region = SubcubeInfo::Region::Picture;
    std::uint64_t vertex = 0;
    for (int i = 0; i < inst.dim - 1; ++i)
        if (info.bits[i]) vertex |= std::uint64_t{1} << i;
    const auto& hi = inst.vertex_info(vertex);
    info.tube = hi.status;
    info.enter = hi.enter;
    info.exit = hi.exit;
    return info;
}

std::vector<double> facet_displacement(const BrouwerInstance& inst, const Point& center,
                                       int travel_axis, const Point& pt_on_facet) {
    if (static_cast<int>(center.size()) != inst.dim ||
        static_cast<int>(pt_on_facet.size()) != inst.dim)
        throw std::invalid_argument("dimension mismatch");
    if (travel_axis == 0 || std::abs(travel_axis) > inst.dim)
        throw std::invalid_argument("travel axis out of range");
    int ax = std::abs(travel_axis) - 1;
    if (std::abs(pt_on_facet[ax] - center[ax]) > 1e-12)
        throw std::invalid_argument("point does not lie on the facet plane");
    std::vector<double> out(inst.dim);
    facet_field(inst.dim, inst.delta, center.data(), travel_axis, pt_on_facet.data(), out.data());
    return out;
}

namespace {

// The field inside any tube subcube (elbow, home, start or end). Each tube
// wall contributes a radial profile taken at the max-norm arc projection
// around the walls' common edge; missing walls degenerate to a profile
// anchored at the subcube center. The suction and upward parts mix with
// the wall-distance angle, while the travel component turns between the
// two travel axes along the max-norm unit sphere, which preserves its
// magnitude through the bend.
void tube_field(const BrouwerInstance& inst, const double* pt, const BitVec& bits, int enter,
                int exit, double* out) {
    const int dim = inst.dim;
    const double delta = inst.delta;
    int ia = enter != 0 ? std::abs(enter) - 1 : -1;
    int ib = exit != 0 ? std::abs(exit) - 1 : -1;
    double u = ia >= 0 ? std::abs(pt[ia] - kHalf) : 0.0;
    double v = ib >= 0 ? std::abs(pt[ib] - kHalf) : 0.0;
    double rho = std::max(u, v);

    // side weights: angular between two walls, Cartesian handover to the
    // center profile when a wall is missing
    double w_in = ib >= 0 ? v : std::max(kR3 - u, 0.0);
    double w_out = ia >= 0 ? u : std::max(kR3 - v, 0.0);
    double wsum = w_in + w_out;
    double th_in = wsum > 0.0 ? w_in / wsum : 0.5;
    double th_out = 1.0 - th_in;

    auto side = [&](int own_axis, int partner_axis, Rings& w, double* p) {
        double z[kMaxDim], proj[kMaxDim];
        for (int i = 0; i < dim; ++i) z[i] = cell_center(bits[i]);
        std::memcpy(proj, pt, sizeof(double) * dim);
        if (own_axis >= 0) {
            z[own_axis] = kHalf;
            proj[own_axis] = kHalf;
        }
        if (partner_axis >= 0)
            proj[partner_axis] = kHalf + (bits[partner_axis] ? 1.0 : -1.0) * rho;
        double r = 0.0;
        for (int i = 0; i < dim; ++i) {
            p[i] = proj[i] - z[i];
            r = std::max(r, std::abs(p[i]));
        }
        if (r > 0.0)
            for (int i = 0; i < dim; ++i) p[i] /= r;
        w = ring_weights(r);
    };

    Rings win, wout;
    double pin[kMaxDim], pout[kMaxDim];
    side(ia, ib, win, pin);
    side(ib, ia, wout, pout);

    for (int i = 0; i < dim; ++i)
        out[i] = -delta * (th_in * win.w1 * pin[i] + th_out * wout.w1 * pout[i]);
    out[dim - 1] += delta * (th_in * win.w3 + th_out * wout.w3);

    double fwd = delta * (th_in * (win.w0 - win.w2) + th_out * (wout.w0 - wout.w2));
    if (ia >= 0)
        out[ia] += (enter > 0 ? 1.0 : -1.0) * fwd * std::min(2.0 * th_in, 1.0);
    if (ib >= 0)
        out[ib] += (exit > 0 ? 1.0 : -1.0) * fwd * std::min(2.0 * th_out, 1.0);
}

// Above the slice: Cartesian mix between the slice-top field (anchored at
// the home column) and the hypercube-top field.
void above_slice_field(const BrouwerInstance& inst, const double* pt, double* out) {
    const int dim = inst.dim;
    const double home = cell_center(false);
    double p[kMaxDim];
    double r = 0.0;
    for (int i = 0; i < dim - 1; ++i) {
        p[i] = pt[i] - home;
        r = std::max(r, std::abs(p[i]));
    }
    p[dim - 1] = 0.0;
    if (r > 0.0)
        for (int i = 0; i < dim - 1; ++i) p[i] /= r;

    double ga[kMaxDim], gb[kMaxDim];
    // slice top: -delta*xi at the home column, suction ring, then upward
    std::fill(ga, ga + dim, 0.0);
    if (r <= kR1) {
        double w = r / kR1;
        ga[dim - 1] -= (1.0 - w) * inst.delta;
        for (int i = 0; i < dim; ++i) ga[i] -= w * inst.delta * p[i];
    } else if (r <= kR2) {
        double w = (r - kR1) / (kR2 - kR1);
        for (int i = 0; i < dim; ++i) ga[i] -= (1.0 - w) * inst.delta * p[i];
        ga[dim - 1] += w * inst.delta;
    } else {
        ga[dim - 1] = inst.delta;
    }
    // hypercube top: downward at the column, suction everywhere beyond h/8
    std::fill(gb, gb + dim, 0.0);
    if (r <= kR1) {
        double w = r / kR1;
        gb[dim - 1] -= (1.0 - w) * inst.delta;
        for (int i = 0; i < dim; ++i) gb[i] -= w * inst.delta * p[i];
    } else {
        for (int i = 0; i < dim; ++i) gb[i] = -inst.delta * p[i];
    }

    double t = (pt[dim - 1] - kHalf) / (1.0 - kHalf);
    for (int i = 0; i < dim; ++i) out[i] = (1.0 - t) * ga[i] + t * gb[i];
}

} // namespace

void displacement(const BrouwerInstance& inst, const double* pt, double* out) {
    const int dim = inst.dim;
    const double last = pt[dim - 1];
    if (last >= kHalf) {
        above_slice_field(inst, pt, out);
        return;
    }
    if (last < kLo) {
        default_field(dim, inst.delta, out);
        return;
    }
    std::uint64_t vertex = 0;
    for (int i = 0; i < dim - 1; ++i) {
        if (pt[i] < kLo || pt[i] >= kHi) {
            default_field(dim, inst.delta, out);
            return;
        }
        if (pt[i] >= kHalf) vertex |= std::uint64_t{1} << i;
    }
    const auto& hi = inst.vertex_info(vertex);
    using St = eol::HInfo::Status;
    if (hi.status == St::OffPath) {
        default_field(dim, inst.delta, out);
        return;
    }
    BitVec bits(dim, 0);
    for (int i = 0; i < dim - 1; ++i) bits[i] = (vertex >> i) & 1u;
    switch (hi.status) {
        case St::Mid:
        case St::Home:
            tube_field(inst, pt, bits, hi.enter, hi.exit, out);
            break;
        case St::End:
            tube_field(inst, pt, bits, hi.enter, 0, out);
            break;
        case St::Start:
            tube_field(inst, pt, bits, 0, hi.exit, out);
            break;
        default:
            default_field(dim, inst.delta, out);
    }
}

std::vector<double> displacement(const BrouwerInstance& inst, const Point& pt) {
    if (static_cast<int>(pt.size()) != inst.dim) throw std::invalid_argument("dimension mismatch");
    for (double c : pt)
        if (c < 0.0 || c > 1.0) throw std::invalid_argument("point outside the unit cube");
    std::vector<double> out(inst.dim);
    displacement(inst, pt.data(), out.data());
    return out;
}

Point brouwer_f(const BrouwerInstance& inst, const Point& pt) {
    std::vector<double> g = displacement(inst, pt);
    Point f(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) {
        f[i] = pt[i] + g[i];
        if (f[i] < -1e-12 || f[i] > 1.0 + 1e-12)
            throw std::runtime_error("brouwer_f would clamp; construction unsound");
        f[i] = std::clamp(f[i], 0.0, 1.0);
    }
    return f;
}

Point iterate_to_fixed_point(const BrouwerInstance& inst, const Point& start, double tol,
                             int max_steps) {
    Point p = start;
    Point best = start;
    std::vector<double> g(inst.dim);
    double best_norm = std::numeric_limits<double>::infinity();
    for (int step = 0; step < max_steps; ++step) {
        displacement(inst, p.data(), g.data());
        double norm = 0.0;
        for (double v : g) norm = std::max(norm, std::abs(v));
        if (norm < best_norm) {
            best_norm = norm;
            best = p;
            if (norm <= tol) break;
        }
        for (int i = 0; i < inst.dim; ++i) p[i] = std::clamp(p[i] + g[i], 0.0, 1.0);
    }
    return best;
}

std::optional<BitVec> decode_fixed_point(const BrouwerInstance& inst, const Point& pt,
                                         double tol) {
    if (tol > inst.delta / 2.0)
        throw std::invalid_argument("decode tolerance above delta/2 is unreliable");
    std::vector<double> g = displacement(inst, pt);
    double norm = 0.0;
    for (double c : g) norm = std::max(norm, std::abs(c));
    if (norm > tol) throw std::invalid_argument("point is not a tol-approximate fixed point");
    SubcubeInfo info = locate(inst, pt);
    if (info.region != SubcubeInfo::Region::Picture) return std::nullopt;
    using St = eol::HInfo::Status;
    if (info.tube != St::Start && info.tube != St::End) return std::nullopt;
    BitVec u(inst.n);
    for (int i = 0; i < inst.n; ++i) u[i] = info.bits[i];
    return u;
}

} // namespace ppadkit::brouwer
