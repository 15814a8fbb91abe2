#include "minliq/grid.hpp"

#include <algorithm>
#include <cmath>

#include "minliq/errors.hpp"

namespace minliq {

std::vector<double> uniform_axis(double a, double b, int n_intervals) {
    if (n_intervals < 1) throw DomainError("axis needs at least one interval");
    std::vector<double> axis(n_intervals + 1);
    const double h = (b - a) / n_intervals;
    for (int i = 0; i <= n_intervals; ++i) axis[i] = a + i * h;
    axis.back() = b;
    return axis;
}

std::vector<double> graded_time_axis(double t0, double T, int nt, double grading) {
    if (nt < 1) throw DomainError("time axis needs at least one step");
    if (!(T > t0)) throw DomainError("time axis needs T > t0");
    if (grading <= 0.0) return uniform_axis(t0, T, nt);
    std::vector<double> axis(nt + 1);
    const double span = T - t0;
    const double denom = std::expm1(grading);
    for (int j = 0; j <= nt; ++j) {
        const double tau = span * std::expm1(grading * (nt - j) / static_cast<double>(nt)) / denom;
        axis[j] = T - tau;
    }
    axis.front() = t0;
    axis.back() = T;
    return axis;
}

std::vector<double> join_axes(const std::vector<double>& head, const std::vector<double>& tail) {
    if (head.empty()) return tail;
    if (tail.empty()) return head;
    if (std::abs(head.back() - tail.front()) > 1e-12)
        throw DomainError("axes do not share a junction point");
    std::vector<double> out(head);
    out.insert(out.end(), tail.begin() + 1, tail.end());
    return out;
}

std::vector<double> anchored_axis(double x_min, double x_max, double dx_target,
                                  const std::vector<double>& anchors) {
    if (!(x_max > x_min) || !(dx_target > 0.0)) throw DomainError("bad spatial axis request");
    const double origin = anchors.empty() ? x_min : anchors.front();
    double dx = dx_target;
    for (std::size_t a = 1; a < anchors.size(); ++a) {
        const double gap = std::abs(anchors[a] - origin);
        if (gap == 0.0) continue;
        const double m = std::max(1.0, std::round(gap / dx_target));
        dx = gap / m;
        break;
    }
    const auto lo = static_cast<long>(std::floor((x_min - origin) / dx + 1e-9));
    const auto hi = static_cast<long>(std::ceil((x_max - origin) / dx - 1e-9));
    std::vector<double> axis;
    axis.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) axis.push_back(origin + static_cast<double>(i) * dx);
    return axis;
}

std::size_t nearest_index(const std::vector<double>& axis, double x) {
    const double dx = axis[1] - axis[0];
    const double r = std::round((x - axis.front()) / dx);
    return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(axis.size() - 1)));
}

AxisCell locate(const std::vector<double>& axis, double t) {
    if (axis.size() < 2) return {0, 0.0};
    if (t <= axis.front()) return {0, 0.0};
    if (t >= axis.back()) return {axis.size() - 2, 1.0};
    const auto it = std::upper_bound(axis.begin(), axis.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - axis.begin()) - 1;
    return {j, (t - axis[j]) / (axis[j + 1] - axis[j])};
}

double Grid1D::interpolate(double tq, double xq) const {
    const AxisCell tc = locate(t, tq);
    const double dx = x[1] - x[0];
    const double r = std::clamp((xq - x.front()) / dx, 0.0, static_cast<double>(nx() - 1));
    std::size_t i = static_cast<std::size_t>(r);
    if (i >= nx() - 1) i = nx() - 2;
    const double wx = r - static_cast<double>(i);
    const double lo = (1.0 - wx) * (*this)(tc.j, i) + wx * (*this)(tc.j, i + 1);
    if (tc.w == 0.0) return lo;
    const double hi = (1.0 - wx) * (*this)(tc.j + 1, i) + wx * (*this)(tc.j + 1, i + 1);
    return (1.0 - tc.w) * lo + tc.w * hi;
}

double Grid2D::interpolate(double tq, double nuq, double sq) const {
    const AxisCell tc = locate(t, tq);
    const AxisCell nc = locate(nu, nuq);
    const AxisCell sc = locate(s, sq);
    auto plane_value = [&](std::size_t j) {
        const double a = (1 - sc.w) * (*this)(j, nc.j, sc.j) + sc.w * (*this)(j, nc.j, sc.j + 1);
        const double b =
            (1 - sc.w) * (*this)(j, nc.j + 1, sc.j) + sc.w * (*this)(j, nc.j + 1, sc.j + 1);
        return (1 - nc.w) * a + nc.w * b;
    };
    const double lo = plane_value(tc.j);
    if (tc.w == 0.0) return lo;
    return (1 - tc.w) * lo + tc.w * plane_value(tc.j + 1);
}

}  // namespace minliq
