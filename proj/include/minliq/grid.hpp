#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace minliq {

inline constexpr double kUntruncated = std::numeric_limits<double>::infinity();

// n_intervals + 1 equally spaced points on [a, b].
std::vector<double> uniform_axis(double a, double b, int n_intervals);

// nt + 1 time levels on [t0, T], refined geometrically toward T:
//   T - t_j = (T - t0) (exp(g (nt - j)/nt) - 1) / (exp(g) - 1).
// Step sizes are proportional to (T - t) plus a constant offset; g = 0 gives a
// uniform axis.
std::vector<double> graded_time_axis(double t0, double T, int nt, double grading);

// Concatenates two axes sharing the junction point.
std::vector<double> join_axes(const std::vector<double>& head, const std::vector<double>& tail);

// Uniform spatial axis covering [x_min, x_max] with spacing close to
// dx_target. Every anchor is placed on a node: the first anchor exactly, the
// others by adjusting dx so that their offsets are integer multiples of it.
std::vector<double> anchored_axis(double x_min, double x_max, double dx_target,
                                  const std::vector<double>& anchors);

// Index of the node closest to x on a uniform axis.
std::size_t nearest_index(const std::vector<double>& axis, double x);

// Value function on a time x space lattice; rows are time levels in
// ascending t.
struct Grid1D {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> values;
    double trunc_level = kUntruncated;
    std::string label;

    std::size_t nt() const { return t.size(); }
    std::size_t nx() const { return x.size(); }
    double& operator()(std::size_t j, std::size_t i) { return values[j * x.size() + i]; }
    double operator()(std::size_t j, std::size_t i) const { return values[j * x.size() + i]; }
    std::span<const double> level(std::size_t j) const {
        return {values.data() + j * x.size(), x.size()};
    }

    // Bilinear interpolation; x is clamped to the spatial domain.
    double interpolate(double t, double x) const;
};

// Locates t in an ascending axis: returns the cell index j with
// axis[j] <= t <= axis[j+1] and the weight of axis[j+1].
struct AxisCell {
    std::size_t j = 0;
    double w = 0.0;
};
AxisCell locate(const std::vector<double>& axis, double t);

struct Grid2D {
    std::vector<double> t;
    std::vector<double> nu;
    std::vector<double> s;
    std::vector<double> values;  // [t][nu][s]
    double trunc_level = kUntruncated;
    std::string label;

    std::size_t plane() const { return nu.size() * s.size(); }
    double& operator()(std::size_t j, std::size_t a, std::size_t i) {
        return values[j * plane() + a * s.size() + i];
    }
    double operator()(std::size_t j, std::size_t a, std::size_t i) const {
        return values[j * plane() + a * s.size() + i];
    }
    double interpolate(double t, double nu, double s) const;
};

}  // namespace minliq
