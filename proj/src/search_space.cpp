#include "hibo/search_space.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hibo/seeding.hpp"

namespace hibo {

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
    std::set<std::string> names;
    for (const auto& d : dims_) {
        if (!(d.lower < d.upper)) {
            throw std::invalid_argument("search space dimension '" + d.name +
                                        "': lower must be < upper");
        }
        if (!names.insert(d.name).second) {
            throw std::invalid_argument("duplicate dimension name '" + d.name +
                                        "'");
        }
    }
}

Point normalize(const SearchSpace& space, const std::vector<double>& raw) {
    if (raw.size() != space.dim()) {
        throw std::invalid_argument("normalize: expected " +
                                    std::to_string(space.dim()) +
                                    " coordinates, got " +
                                    std::to_string(raw.size()));
    }
    std::vector<double> coords(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Dimension& d = space.dimension(i);
        if (raw[i] < d.lower || raw[i] > d.upper) {
            throw std::out_of_range("value " + std::to_string(raw[i]) +
                                    " out of bounds for dimension '" + d.name +
                                    "' [" + std::to_string(d.lower) + ", " +
                                    std::to_string(d.upper) + "]");
        }
        coords[i] = (raw[i] - d.lower) / (d.upper - d.lower);
    }
    return Point(std::move(coords));
}

std::vector<double> denormalize(const SearchSpace& space, const Point& p) {
    if (p.size() != space.dim()) {
        throw std::invalid_argument("denormalize: dimensionality mismatch");
    }
    std::vector<double> raw(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Dimension& d = space.dimension(i);
        raw[i] = d.lower + p[i] * (d.upper - d.lower);
    }
    return raw;
}

std::vector<Point> initial_sample(const SearchSpace& space, int n,
                                  std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("initial_sample: n must be >= 1");
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t d = space.dim();

    std::vector<Point> points(static_cast<std::size_t>(n));
    for (auto& p : points) p.coords.resize(d);

    std::vector<std::size_t> strata(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        for (std::size_t i = 0; i < strata.size(); ++i) {
            double u = unit(rng);
            points[i].coords[j] = (static_cast<double>(strata[i]) + u) / n;
        }
    }
    return points;
}

}  // namespace hibo
