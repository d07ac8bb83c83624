#pragma once

// Wasserstein-1 distance between finite measures, with an optimal coupling
// and a 1-Lipschitz dual potential certifying optimality.

#include "cat0/measures.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace cat0 {

struct Coupling {
    DiscreteMeasure mu;    // rows
    DiscreteMeasure nu;    // columns
    Eigen::MatrixXd plan;  // plan(i, j) = mass moved from mu atom i to nu atom j
};

struct TransportResult {
    double value = 0.0;
    Coupling coupling;
    /// Total mass discarded when the weights were scaled to integers
    /// (zero for weights with at most 52 binary fraction digits).
    double rounding_error = 0.0;
};

/*
 * Potential on the joint support (mu atoms, then nu atoms not already present).
 * Built as a c-transform of the flow potentials, so it is 1-Lipschitz.
 */
struct DualPotential {
    std::vector<Point> support;
    std::vector<double> values;
    std::vector<std::size_t> mu_index;  // support slot of each mu atom
    std::vector<std::size_t> nu_index;  // support slot of each nu atom

    /// sum psi dmu - sum psi dnu.
    double objective(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
    /// max over support pairs of |psi(u) - psi(v)| - d(u, v).
    double lipschitz_excess(const Space& space) const;
};

TransportResult w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Throws CertificateError if the plan's residual graph has a negative cycle.
DualPotential dual_certificate(const Coupling& coupling);

/// Sum of plan(i, j) d(a_i, b_j).
double transport_cost(const Coupling& coupling);

/// max |row/column sum - weight|.
double marginal_error(const Coupling& coupling);

/// w1(mu, nu) - d(c(mu), c(nu)).
double barycenter_contraction_defect(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace cat0
