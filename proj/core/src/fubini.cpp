#include "cat0/fubini.hpp"

#include "cat0/barycenter.hpp"
#include "cat0/errors.hpp"

#include <cmath>

namespace cat0 {

namespace {

// sum over ordered pairs of w w' d^p, for p = 1 and p = 2 in one pass.
struct PairMoments {
    double first = 0.0;
    double second = 0.0;
};

PairMoments pair_moments(const MapTable& f) {
    PairMoments m;
    const auto& prob = f.domain().probabilities();
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = a + 1; b < f.size(); ++b) {
            const double d = distance(f.target(), f.value(a), f.value(b));
            const double w = 2.0 * prob(a) * prob(b);
            m.first += w * d;
            m.second += w * d * d;
        }
    return m;
}

}  // namespace

double variation(const MapTable& f, double p) { return std::pow(variation_power(f, p), 1.0 / p); }

double variation_power(const MapTable& f, double p) {
    if (!(p >= 1.0)) throw DomainError("variation order must be >= 1");
    const auto& prob = f.domain().probabilities();
    double acc = 0.0;
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = a + 1; b < f.size(); ++b)
            acc += 2.0 * prob(a) * prob(b) * std::pow(distance(f.target(), f.value(a), f.value(b)), p);
    return acc;
}

Point expectation(const MapTable& f) { return barycenter(pushforward(f)).point; }

std::vector<Point> slice_expectations(const MapTable& f) {
    const auto& prod = f.product();
    std::vector<Point> out;
    out.reserve(prod.y().size());
    for (std::size_t j = 0; j < prod.y().size(); ++j) out.push_back(expectation(f.slice_at_y(j)));
    return out;
}

namespace {

Point repeated_from_slices(const MapTable& f, const std::vector<Point>& slices) {
    const auto& py = f.product().y().probabilities();
    return barycenter(DiscreteMeasure(f.target(), slices, std::vector<double>(py.data(), py.data() + py.size())))
        .point;
}

}  // namespace

Point repeated_integral(const MapTable& f) { return repeated_from_slices(f, slice_expectations(f)); }

FubiniReport fubini_report(const MapTable& f) {
    FubiniReport r;
    r.slice_expectations = slice_expectations(f);
    r.repeated = repeated_from_slices(f, r.slice_expectations);
    r.expectation = expectation(f);
    r.defect = distance(f.target(), r.expectation, r.repeated);

    const PairMoments m = pair_moments(f);
    r.v1 = m.first;
    r.v2 = std::sqrt(m.second);
    r.slack1 = r.v1 - r.defect;
    r.slack2 = r.v2 / std::sqrt(3.0) - r.defect;

    const auto& prob = f.domain().probabilities();
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double d = distance(f.target(), f.value(k), r.repeated);
        r.spread_about_repeated += prob(k) * d * d;
    }
    r.half_spread_slack = 0.5 * r.spread_about_repeated - r.defect * r.defect;
    r.two_thirds_slack = (2.0 / 3.0) * m.second - r.spread_about_repeated;
    return r;
}

double slice_contraction_defect(const MapTable& f, const std::vector<Point>& slices, std::size_t y,
                                std::size_t y_prime) {
    const auto& prod = f.product();
    if (y >= prod.y().size() || y_prime >= prod.y().size()) throw DomainError("slice index out of range");
    double mean = 0.0;
    for (std::size_t i = 0; i < prod.x().size(); ++i)
        mean += prod.x().prob(i) * distance(f.target(), f.value(i, y), f.value(i, y_prime));
    return mean - distance(f.target(), slices[y], slices[y_prime]);
}

double slice_contraction_defect(const MapTable& f, std::size_t y, std::size_t y_prime) {
    return slice_contraction_defect(f, slice_expectations(f), y, y_prime);
}

}  // namespace cat0
