#include "cat0/measures.hpp"

#include "cat0/errors.hpp"

#include <cmath>
#include <numeric>

namespace cat0 {

namespace {

constexpr double kWeightSumTolerance = 1e-9;
constexpr double kMetricTolerance = 1e-12;

}  // namespace

// ----------------------------------------------------------- DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(Space space, std::vector<Point> atoms, std::vector<double> weights)
    : space_(std::move(space)) {
    if (atoms.empty()) throw DomainError("measure needs at least one atom");
    if (atoms.size() != weights.size()) throw DomainError("measure atoms and weights differ in length");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("measure weights must be positive and finite");
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        throw DomainError("measure weights sum to " + std::to_string(total) + ", expected 1");

    atoms_.reserve(atoms.size());
    weights_.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        space_.check(atoms[i]);
        bool merged = false;
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            if (distance(space_, atoms_[k], atoms[i]) < kAtomMergeTolerance) {
                weights_[k] += weights[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            atoms_.push_back(std::move(atoms[i]));
            weights_.push_back(weights[i]);
        }
    }
    if (total != 1.0)
        for (double& w : weights_) w /= total;
}

DiscreteMeasure DiscreteMeasure::dirac(Space space, Point atom) {
    return DiscreteMeasure(std::move(space), {std::move(atom)}, {1.0});
}

DiscreteMeasure DiscreteMeasure::uniform(Space space, std::vector<Point> atoms) {
    const std::size_t n = atoms.size();
    return DiscreteMeasure(std::move(space), std::move(atoms),
                           std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::component(std::size_t i) const {
    if (space_.kind() != SpaceKind::product) throw DomainError("component() needs a product space");
    if (i >= space_.components().size()) throw DomainError("product component out of range");
    std::vector<Point> parts;
    parts.reserve(atoms_.size());
    for (const auto& a : atoms_) parts.push_back(a.parts()[i]);
    return DiscreteMeasure(space_.components()[i], std::move(parts), weights_);
}

// -------------------------------------------------------------------- MMSpace

MMSpace::MMSpace(std::vector<std::string> labels, Eigen::MatrixXd metric, Eigen::VectorXd prob) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (n == 0) throw DomainError("mm-space needs at least one sample");
    if (metric.rows() != n || metric.cols() != n) throw DomainError("metric matrix must be n x n");
    if (prob.size() != n) throw DomainError("probability vector must have length n");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (labels[i] == labels[j]) throw DomainError("duplicate sample label '" + labels[i] + "'");

    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(prob(i) > 0.0) || !std::isfinite(prob(i)))
            throw DomainError("probability of '" + labels[i] + "' must be positive (full support)");
        total += prob(i);
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        throw DomainError("probabilities sum to " + std::to_string(total) + ", expected 1");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (metric(i, i) != 0.0) throw DomainError("metric diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = metric(i, j);
            if (!std::isfinite(d) || d < 0.0) throw DomainError("metric entries must be finite and nonnegative");
            if (d != metric(j, i)) throw DomainError("metric must be symmetric");
            if (i != j && d == 0.0) throw DomainError("distinct samples at distance zero");
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                if (metric(i, k) > metric(i, j) + metric(j, k) + kMetricTolerance)
                    throw DomainError("triangle inequality fails for (" + labels[i] + ", " + labels[j] + ", " +
                                      labels[k] + ")");

    data_ = std::make_shared<const Data>(Data{std::move(labels), std::move(metric), prob / total});
}

MMSpace::MMSpace(Trusted, std::vector<std::string> labels, Eigen::MatrixXd metric, Eigen::VectorXd prob)
    : data_(std::make_shared<const Data>(Data{std::move(labels), std::move(metric), std::move(prob)})) {}

MMSpace MMSpace::discrete(std::vector<std::string> labels, double scale) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd metric = Eigen::MatrixXd::Constant(n, n, scale);
    metric.diagonal().setZero();
    return MMSpace(std::move(labels), std::move(metric), Eigen::VectorXd::Constant(n, 1.0 / n));
}

std::optional<std::size_t> MMSpace::find_label(std::string_view label) const {
    for (std::size_t i = 0; i < size(); ++i)
        if (data_->labels[i] == label) return i;
    return std::nullopt;
}

double MMSpace::diameter() const { return data_->metric.maxCoeff(); }

// ------------------------------------------------------------- ProductMMSpace

namespace {

struct JointParts {
    std::vector<std::string> labels;
    Eigen::MatrixXd metric;
    Eigen::VectorXd prob;
};

JointParts joint_data(const MMSpace& x, const MMSpace& y) {
    const std::size_t n = x.size() * y.size();
    std::vector<std::string> labels;
    labels.reserve(n);
    Eigen::VectorXd prob(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) {
            labels.push_back("(" + x.labels()[i] + "," + y.labels()[j] + ")");
            prob(static_cast<Eigen::Index>(i * y.size() + j)) = x.prob(i) * y.prob(j);
        }
    Eigen::MatrixXd metric(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const double dx = x.distance(k / y.size(), l / y.size());
            const double dy = y.distance(k % y.size(), l % y.size());
            metric(k, l) = std::sqrt(dx * dx + dy * dy);
        }
    return {std::move(labels), std::move(metric), std::move(prob)};
}

}  // namespace

ProductMMSpace::ProductMMSpace(MMSpace x, MMSpace y)
    : x_(std::move(x)), y_(std::move(y)), joint_([&] {
          auto d = joint_data(x_, y_);
          return MMSpace(MMSpace::Trusted{}, std::move(d.labels), std::move(d.metric), std::move(d.prob));
      }()) {}

ProductMMSpace product_mm(const MMSpace& x, const MMSpace& y) { return ProductMMSpace(x, y); }

// ------------------------------------------------------------------- MapTable

MapTable::MapTable(MMSpace domain, Space target, std::vector<Point> values)
    : domain_(std::move(domain)), target_(std::move(target)), values_(std::move(values)) {
    if (values_.size() != domain_.size())
        throw DomainError("map table has " + std::to_string(values_.size()) + " values for " +
                          std::to_string(domain_.size()) + " samples");
    for (const auto& v : values_) target_.check(v);
}

MapTable::MapTable(ProductMMSpace domain, Space target, std::vector<Point> values)
    : MapTable(domain.joint(), std::move(target), std::move(values)) {
    product_.emplace(std::move(domain));
}

const ProductMMSpace& MapTable::product() const {
    if (!product_) throw DomainError("map table domain is not a product mm-space");
    return *product_;
}

MapTable MapTable::slice_at_y(std::size_t j) const {
    const auto& p = product();
    std::vector<Point> vals;
    vals.reserve(p.x().size());
    for (std::size_t i = 0; i < p.x().size(); ++i) vals.push_back(values_[p.index(i, j)]);
    return MapTable(p.x(), target_, std::move(vals));
}

MapTable MapTable::slice_at_x(std::size_t i) const {
    const auto& p = product();
    std::vector<Point> vals;
    vals.reserve(p.y().size());
    for (std::size_t j = 0; j < p.y().size(); ++j) vals.push_back(values_[p.index(i, j)]);
    return MapTable(p.y(), target_, std::move(vals));
}

MapTable MapTable::with_values(std::vector<Point> values) const {
    if (product_) return MapTable(*product_, target_, std::move(values));
    return MapTable(domain_, target_, std::move(values));
}

DiscreteMeasure pushforward(const MapTable& f) {
    const auto& prob = f.domain().probabilities();
    return DiscreteMeasure(f.target(), std::vector<Point>(f.values().begin(), f.values().end()),
                           std::vector<double>(prob.data(), prob.data() + prob.size()));
}

double moment(const DiscreteMeasure& nu, double p, const Point& base) {
    if (!(p >= 1.0)) throw DomainError("moment order must be >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) acc += nu.weight(i) * std::pow(distance(nu.space(), base, nu.atom(i)), p);
    return acc;
}

}  // namespace cat0
