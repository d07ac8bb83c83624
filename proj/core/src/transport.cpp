#include "cat0/transport.hpp"

#include "cat0/barycenter.hpp"
#include "cat0/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace cat0 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelaxSlack = 1e-13;
constexpr int kMaxScaleBits = 52;

int fraction_bits(double w) {
    for (int k = 0; k <= kMaxScaleBits; ++k) {
        const double s = std::ldexp(w, k);
        if (s == std::floor(s)) return k;
    }
    return kMaxScaleBits;
}

// Integer masses summing to exactly 2^bits; returns the discarded mass.
double scale_weights(std::span<const double> w, int bits, std::vector<std::int64_t>& out) {
    const std::int64_t total = std::int64_t{1} << bits;
    out.resize(w.size());
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = std::llround(std::ldexp(w[i], bits));
        sum += out[i];
    }
    const auto largest = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
    out[largest] += total - sum;
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) err += std::abs(std::ldexp(static_cast<double>(out[i]), -bits) - w[i]);
    return err;
}

Eigen::MatrixXd cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    Eigen::MatrixXd c(mu.size(), nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j) c(i, j) = distance(mu.space(), mu.atom(i), nu.atom(j));
    return c;
}

bool same_measure(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.size() != nu.size()) return false;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.weight(i) != nu.weight(i) || distance(mu.space(), mu.atom(i), nu.atom(i)) >= kAtomMergeTolerance)
            return false;
    return true;
}

/*
 * Successive shortest paths on the bipartite transportation network with
 * integer masses. Node layout: sources 0..n-1, sinks n..n+m-1. Paths are found
 * by Bellman-Ford on the residual graph (backward arcs carry negative cost).
 * Each augmentation exhausts a source, a sink, or a backward arc, so the
 * number of rounds is bounded independently of the mass scale.
 */
std::vector<std::int64_t> min_cost_flow(const Eigen::MatrixXd& cost, std::vector<std::int64_t> supply,
                                        std::vector<std::int64_t> demand) {
    const std::size_t n = supply.size();
    const std::size_t m = demand.size();
    std::vector<std::int64_t> flow(n * m, 0);
    std::vector<double> dist(n + m);
    std::vector<std::size_t> pred(n + m);
    constexpr std::size_t kFromSource = npos;

    auto remaining = [&] {
        for (auto s : supply)
            if (s > 0) return true;
        return false;
    };

    while (remaining()) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(pred.begin(), pred.end(), kFromSource);
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > 0) dist[i] = 0.0;

        for (std::size_t round = 0; round < n + m; ++round) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (dist[i] == kInf) continue;
                for (std::size_t j = 0; j < m; ++j) {
                    const double cand = dist[i] + cost(i, j);
                    if (cand < dist[n + j] - kRelaxSlack) {
                        dist[n + j] = cand;
                        pred[n + j] = i;
                        changed = true;
                    }
                }
            }
            for (std::size_t j = 0; j < m; ++j) {
                if (dist[n + j] == kInf) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    if (flow[i * m + j] == 0) continue;
                    const double cand = dist[n + j] - cost(i, j);
                    if (cand < dist[i] - kRelaxSlack) {
                        dist[i] = cand;
                        pred[i] = n + j;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }

        std::size_t sink = npos;
        for (std::size_t j = 0; j < m; ++j)
            if (demand[j] > 0 && dist[n + j] < kInf && (sink == npos || dist[n + j] < dist[n + sink])) sink = j;
        if (sink == npos) throw CertificateError("transport network has no augmenting path");

        // Walk back to a source, collecting the bottleneck.
        std::int64_t push = demand[sink];
        std::size_t node = n + sink;
        std::size_t guard = 0;
        while (true) {
            if (++guard > 2 * (n + m)) throw CertificateError("cycle in shortest-path tree");
            if (node >= n) {
                node = pred[node];
            } else {
                if (pred[node] == kFromSource) break;
                const std::size_t j = pred[node] - n;
                push = std::min(push, flow[node * m + j]);
                node = pred[node];
            }
        }
        push = std::min(push, supply[node]);

        node = n + sink;
        while (true) {
            if (node >= n) {
                const std::size_t i = pred[node];
                flow[i * m + (node - n)] += push;
                node = i;
            } else {
                if (pred[node] == kFromSource) break;
                const std::size_t j = pred[node] - n;
                flow[node * m + j] -= push;
                node = pred[node];
            }
        }
        supply[node] -= push;
        demand[sink] -= push;
    }
    return flow;
}

}  // namespace

double DualPotential::objective(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * values[mu_index[i]];
    for (std::size_t j = 0; j < nu.size(); ++j) acc -= nu.weight(j) * values[nu_index[j]];
    return acc;
}

double DualPotential::lipschitz_excess(const Space& space) const {
    double worst = -kInf;
    for (std::size_t a = 0; a < support.size(); ++a)
        for (std::size_t b = a + 1; b < support.size(); ++b)
            worst = std::max(worst, std::abs(values[a] - values[b]) - distance(space, support[a], support[b]));
    return support.size() < 2 ? 0.0 : worst;
}

TransportResult w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (!(mu.space() == nu.space())) throw DomainError("w1 needs measures on the same space");

    if (same_measure(mu, nu)) {
        Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(mu.size(), nu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) plan(i, i) = mu.weight(i);
        return {0.0, {mu, nu, std::move(plan)}, 0.0};
    }

    int bits = 0;
    for (double w : mu.weights()) bits = std::max(bits, fraction_bits(w));
    for (double w : nu.weights()) bits = std::max(bits, fraction_bits(w));

    std::vector<std::int64_t> supply, demand;
    const double err = std::max(scale_weights(mu.weights(), bits, supply), scale_weights(nu.weights(), bits, demand));

    const Eigen::MatrixXd cost = cost_matrix(mu, nu);
    const auto flow = min_cost_flow(cost, std::move(supply), std::move(demand));

    Eigen::MatrixXd plan(mu.size(), nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
            plan(i, j) = std::ldexp(static_cast<double>(flow[i * nu.size() + j]), -bits);

    Coupling coupling{mu, nu, std::move(plan)};
    const double value = transport_cost(coupling);
    return {value, std::move(coupling), err};
}

double transport_cost(const Coupling& c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.mu.size(); ++i)
        for (std::size_t j = 0; j < c.nu.size(); ++j)
            if (c.plan(i, j) != 0.0) acc += c.plan(i, j) * distance(c.mu.space(), c.mu.atom(i), c.nu.atom(j));
    return acc;
}

double marginal_error(const Coupling& c) {
    double err = 0.0;
    for (std::size_t i = 0; i < c.mu.size(); ++i) err = std::max(err, std::abs(c.plan.row(i).sum() - c.mu.weight(i)));
    for (std::size_t j = 0; j < c.nu.size(); ++j) err = std::max(err, std::abs(c.plan.col(j).sum() - c.nu.weight(j)));
    return err;
}

/*
 * Shortest-path potentials p on the plan's residual graph satisfy
 * p_j <= p_i + c_ij everywhere and equality on the plan's support, so
 * u_i = -p_i, v_j = p_j is dual feasible with zero gap. The c-transform
 * psi(z) = min_j d(z, b_j) - v_j then extends them to a 1-Lipschitz function
 * with psi(a_i) >= u_i and psi(b_j) <= -v_j.
 */
DualPotential dual_certificate(const Coupling& coupling) {
    const auto& mu = coupling.mu;
    const auto& nu = coupling.nu;
    const std::size_t n = mu.size();
    const std::size_t m = nu.size();
    const Eigen::MatrixXd cost = cost_matrix(mu, nu);

    std::vector<double> p(n + m, 0.0);
    auto relax = [&](double tol) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (p[i] + cost(i, j) < p[n + j] - tol) {
                    p[n + j] = p[i] + cost(i, j);
                    changed = true;
                }
                if (coupling.plan(i, j) > 0.0 && p[n + j] - cost(i, j) < p[i] - tol) {
                    p[i] = p[n + j] - cost(i, j);
                    changed = true;
                }
            }
        return changed;
    };
    for (std::size_t round = 0; round + 1 < n + m; ++round)
        if (!relax(kRelaxSlack)) break;
    if (relax(1e-9)) throw CertificateError("transport plan is not optimal: residual graph has a negative cycle");

    DualPotential psi;
    auto slot_of = [&](const Point& z) {
        for (std::size_t s = 0; s < psi.support.size(); ++s)
            if (distance(mu.space(), psi.support[s], z) < kAtomMergeTolerance) return s;
        psi.support.push_back(z);
        return psi.support.size() - 1;
    };
    for (std::size_t i = 0; i < n; ++i) psi.mu_index.push_back(slot_of(mu.atom(i)));
    for (std::size_t j = 0; j < m; ++j) psi.nu_index.push_back(slot_of(nu.atom(j)));

    psi.values.resize(psi.support.size());
    for (std::size_t s = 0; s < psi.support.size(); ++s) {
        double best = kInf;
        for (std::size_t j = 0; j < m; ++j)
            best = std::min(best, distance(mu.space(), psi.support[s], nu.atom(j)) - p[n + j]);
        psi.values[s] = best;
    }
    return psi;
}

double barycenter_contraction_defect(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    const double w = w1(mu, nu).value;
    return w - distance(mu.space(), barycenter(mu).point, barycenter(nu).point);
}

}  // namespace cat0
