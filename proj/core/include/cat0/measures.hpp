#pragma once

// Finite probability measures on target spaces, finite mm-spaces, their l2
// products, and maps from mm-spaces into targets.

#include "cat0/spaces.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cat0 {

/// Atoms closer than this are merged into one atom.
inline constexpr double kAtomMergeTolerance = 1e-12;

/*
 * Finitely supported probability measure on a Space. Weights must be
 * positive and sum to one within 1e-12; near-duplicate atoms are merged.
 */
class DiscreteMeasure {
public:
    DiscreteMeasure(Space space, std::vector<Point> atoms, std::vector<double> weights);

    static DiscreteMeasure dirac(Space space, Point atom);
    static DiscreteMeasure uniform(Space space, std::vector<Point> atoms);

    const Space& space() const { return space_; }
    std::size_t size() const { return atoms_.size(); }
    std::span<const Point> atoms() const { return atoms_; }
    std::span<const double> weights() const { return weights_; }
    const Point& atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Image under the projection onto component `i` of a product space.
    DiscreteMeasure component(std::size_t i) const;

private:
    Space space_;
    std::vector<Point> atoms_;
    std::vector<double> weights_;
};

/*
 * Finite metric measure space: labelled samples, a validated metric matrix
 * and a full-support probability vector.
 */
class MMSpace {
public:
    MMSpace(std::vector<std::string> labels, Eigen::MatrixXd metric, Eigen::VectorXd prob);

    /// Points at pairwise distance `scale`, uniform measure.
    static MMSpace discrete(std::vector<std::string> labels, double scale = 1.0);

    std::size_t size() const { return data_->labels.size(); }
    const std::vector<std::string>& labels() const { return data_->labels; }
    const Eigen::MatrixXd& metric() const { return data_->metric; }
    const Eigen::VectorXd& probabilities() const { return data_->prob; }
    double distance(std::size_t i, std::size_t j) const { return data_->metric(i, j); }
    double prob(std::size_t i) const { return data_->prob(i); }
    std::optional<std::size_t> find_label(std::string_view label) const;
    double diameter() const;

private:
    struct Data {
        std::vector<std::string> labels;
        Eigen::MatrixXd metric;
        Eigen::VectorXd prob;
    };
    struct Trusted {};
    MMSpace(Trusted, std::vector<std::string> labels, Eigen::MatrixXd metric, Eigen::VectorXd prob);
    friend class ProductMMSpace;

    std::shared_ptr<const Data> data_;
};

/*
 * X x Y with the l2 metric and product measure. Sample (i, j) has flat
 * index i * |Y| + j.
 */
class ProductMMSpace {
public:
    ProductMMSpace(MMSpace x, MMSpace y);

    const MMSpace& x() const { return x_; }
    const MMSpace& y() const { return y_; }
    /// The product as a plain mm-space over the flat index.
    const MMSpace& joint() const { return joint_; }
    std::size_t size() const { return joint_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * y_.size() + j; }
    std::pair<std::size_t, std::size_t> split(std::size_t k) const { return {k / y_.size(), k % y_.size()}; }

private:
    MMSpace x_;
    MMSpace y_;
    MMSpace joint_;
};

ProductMMSpace product_mm(const MMSpace& x, const MMSpace& y);

/*
 * Total map from an mm-space (possibly a product) into a target Space.
 */
class MapTable {
public:
    MapTable(MMSpace domain, Space target, std::vector<Point> values);
    MapTable(ProductMMSpace domain, Space target, std::vector<Point> values);

    const MMSpace& domain() const { return domain_; }
    bool is_product() const { return product_.has_value(); }
    const ProductMMSpace& product() const;
    const Space& target() const { return target_; }
    std::span<const Point> values() const { return values_; }
    const Point& value(std::size_t k) const { return values_[k]; }
    const Point& value(std::size_t i, std::size_t j) const { return values_[product().index(i, j)]; }
    std::size_t size() const { return values_.size(); }

    /// f^y : X -> N, x -> f(x, y_j).
    MapTable slice_at_y(std::size_t j) const;
    /// f_x : Y -> N, y -> f(x_i, y).
    MapTable slice_at_x(std::size_t i) const;

    MapTable with_values(std::vector<Point> values) const;

private:
    MMSpace domain_;
    std::optional<ProductMMSpace> product_;
    Space target_;
    std::vector<Point> values_;
};

/// f_* mu: atom weights aggregate the probabilities of their preimages.
DiscreteMeasure pushforward(const MapTable& f);

/// sum_i w_i d(base, atom_i)^p.
double moment(const DiscreteMeasure& nu, double p, const Point& base);

}  // namespace cat0
