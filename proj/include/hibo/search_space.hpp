#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hibo {

struct Dimension {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
};

/// Named, bounded, continuous dimensions. All optimizer-internal geometry
/// lives in the normalized unit cube; raw coordinates appear only at the
/// objective boundary and in traces.
class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<Dimension> dims);

    std::size_t dim() const { return dims_.size(); }
    const std::vector<Dimension>& dims() const { return dims_; }
    const Dimension& dimension(std::size_t i) const { return dims_[i]; }

private:
    std::vector<Dimension> dims_;
};

/// A location in the normalized unit cube, length = space dimensionality.
struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}

    std::size_t size() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    double& operator[](std::size_t i) { return coords[i]; }
    bool operator==(const Point&) const = default;
};

/// coord_i = (raw_i - lower_i) / (upper_i - lower_i).
/// Throws std::out_of_range naming the offending dimension when raw is
/// outside the box.
Point normalize(const SearchSpace& space, const std::vector<double>& raw);

/// Exact inverse of normalize up to floating round-off.
std::vector<double> denormalize(const SearchSpace& space, const Point& p);

/// Latin-hypercube sample of n points in the unit cube: one point per
/// equal-width stratum per dimension, strata randomly permuted.
/// Deterministic for a fixed seed. n == 0 throws std::invalid_argument.
std::vector<Point> initial_sample(const SearchSpace& space, int n,
                                  std::uint64_t seed);

}  // namespace hibo
