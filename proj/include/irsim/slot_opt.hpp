// SPDX-License-Identifier: Apache-2.0
//
// irsim: IRS-assisted MIMO downlink simulation and reflection optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "ucmo.hpp"

namespace irsim
{

// One slot of the weighted sum-rate maximization problem. Channels are stored
// transmit-side: bs_irs[i] is N_t x N, irs_user[i] is N x K, direct (optional,
// empty when the BS-MU links are blocked) is N_t x K.
struct SlotProblem
{
    std::vector<ComplexMatrix> bs_irs;
    std::vector<ComplexMatrix> irs_user;
    ComplexMatrix direct; // size 0 when absent
    RealVector weights;   // omega_k > 0
    double noise_power = 1.0;
    double power_budget = 1.0;

    int num_units() const { return static_cast<int>(bs_irs.size()); }
    int num_users() const { return static_cast<int>(weights.size()); }
    int num_antennas() const
    {
        return static_cast<int>(direct.size() > 0 ? direct.rows() : bs_irs.at(0).rows());
    }
    int elements_per_unit() const { return bs_irs.empty() ? 0 : static_cast<int>(bs_irs[0].cols()); }
    bool has_direct() const { return direct.size() > 0; }

    void validate() const
    {
        require(weights.size() > 0 && (weights.array() > 0.0).all(),
                "SlotProblem: weights must be positive");
        require(noise_power > 0.0 && power_budget > 0.0,
                "SlotProblem: noise power and power budget must be positive");
        require(bs_irs.size() == irs_user.size(), "SlotProblem: per-unit channel lists must match");
        require(!bs_irs.empty() || has_direct(), "SlotProblem: need at least one unit or a direct link");
        const int k = num_users();
        const int n_t = num_antennas();
        if (has_direct())
            require(direct.rows() == n_t && direct.cols() == k, "SlotProblem: direct link dimensions");
        for (std::size_t i = 0; i < bs_irs.size(); ++i)
        {
            require(bs_irs[i].rows() == n_t && irs_user[i].cols() == k &&
                        bs_irs[i].cols() == irs_user[i].rows() &&
                        bs_irs[i].cols() == bs_irs[0].cols(),
                    "SlotProblem: per-unit channel dimensions");
        }
    }

    // Effective transmit-side channel H_d + sum_i G_i diag(theta_i) H_i for a
    // stacked unit-modulus reflection vector (length I*N).
    ComplexMatrix effective(const ComplexVector &theta_tilde) const
    {
        const int n = elements_per_unit();
        require(theta_tilde.size() == static_cast<Eigen::Index>(bs_irs.size()) * n,
                "SlotProblem: stacked reflection vector has wrong length");
        ComplexMatrix h = has_direct() ? direct : ComplexMatrix::Zero(num_antennas(), num_users());
        for (std::size_t i = 0; i < bs_irs.size(); ++i)
        {
            const auto theta_i = theta_tilde.segment(static_cast<Eigen::Index>(i) * n, n);
            h.noalias() += bs_irs[i] * theta_i.asDiagonal() * irs_user[i];
        }
        return h;
    }
};

// Per-user SINR gamma_k = |h_k^H w_k|^2 / (sum_{j != k} |h_k^H w_j|^2 + sigma^2)
// with h_k the k-th column of the effective channel.
inline RealVector sinr(const SlotProblem &problem, const ComplexMatrix &precoder,
                       const ComplexVector &theta_tilde)
{
    problem.validate();
    const int k_users = problem.num_users();
    require(precoder.rows() == problem.num_antennas() && precoder.cols() == k_users,
            "sinr: precoder dimensions");
    const ComplexMatrix h = problem.effective(theta_tilde);
    const ComplexMatrix cross = h.adjoint() * precoder; // cross(k, j) = h_k^H w_j
    RealVector gamma(k_users);
    for (int k = 0; k < k_users; ++k)
    {
        double interference = 0.0;
        for (int j = 0; j < k_users; ++j)
            if (j != k)
                interference += std::norm(cross(k, j));
        gamma(k) = std::norm(cross(k, k)) / (interference + problem.noise_power);
    }
    return gamma;
}

// f1 = sum_k omega_k log2(1 + gamma_k).
inline double weighted_sum_rate(const SlotProblem &problem, const ComplexMatrix &precoder,
                                const ComplexVector &theta_tilde)
{
    const RealVector gamma = sinr(problem, precoder, theta_tilde);
    double rate = 0.0;
    for (Eigen::Index k = 0; k < gamma.size(); ++k)
        rate += problem.weights(k) * std::log2(1.0 + gamma(k));
    return rate;
}

// The SINR auxiliaries are optimal at alpha_k = gamma_k; at that value the
// surrogate f2 collapses back to the weighted sum-rate f1.
inline RealVector update_alpha(const RealVector &gamma)
{
    require((gamma.array() >= 0.0).all(), "update_alpha: SINRs must be non-negative");
    return gamma;
}

// The f2 surrogate evaluated at an arbitrary alpha (used by tests to verify
// the alpha update is its maximizer and that f2(alpha = gamma) == f1).
inline double surrogate_f2(const SlotProblem &problem, const ComplexMatrix &precoder,
                           const ComplexVector &theta_tilde, const RealVector &alpha)
{
    const RealVector gamma = sinr(problem, precoder, theta_tilde);
    double f = 0.0;
    for (Eigen::Index k = 0; k < gamma.size(); ++k)
    {
        const double w = problem.weights(k);
        f += w * std::log(1.0 + alpha(k)) - w * alpha(k) +
             w * (1.0 + alpha(k)) * gamma(k) / (1.0 + gamma(k));
    }
    return f / std::log(2.0);
}

namespace detail
{
// cross(k, j) = h_k^H w_j for the effective channel columns.
inline ComplexMatrix effective_cross(const SlotProblem &problem, const ComplexMatrix &precoder,
                                     const ComplexVector &theta_tilde)
{
    return problem.effective(theta_tilde).adjoint() * precoder;
}

inline RealVector boosted_weights(const SlotProblem &problem, const RealVector &alpha)
{
    require(alpha.size() == problem.weights.size(), "alpha vector has wrong length");
    return (problem.weights.array() * (1.0 + alpha.array())).matrix();
}
} // namespace detail

// Quadratic-transform auxiliary for the precoder subproblem:
// beta_k = sqrt(w~_k) h_k^H w_k / (sum_j |h_k^H w_j|^2 + sigma^2).
inline ComplexVector update_beta(const SlotProblem &problem, const ComplexMatrix &precoder,
                                 const ComplexVector &theta_tilde, const RealVector &alpha)
{
    const ComplexMatrix cross = detail::effective_cross(problem, precoder, theta_tilde);
    const RealVector w = detail::boosted_weights(problem, alpha);
    const int k_users = problem.num_users();
    ComplexVector beta(k_users);
    for (int k = 0; k < k_users; ++k)
    {
        double denom = problem.noise_power;
        for (int j = 0; j < k_users; ++j)
            denom += std::norm(cross(k, j));
        beta(k) = std::sqrt(w(k)) * cross(k, k) / denom;
    }
    return beta;
}

// The f5 surrogate for a given beta (test hook for the stationarity checks).
inline double surrogate_f5(const SlotProblem &problem, const ComplexMatrix &precoder,
                           const ComplexVector &theta_tilde, const RealVector &alpha,
                           const ComplexVector &beta)
{
    const ComplexMatrix cross = detail::effective_cross(problem, precoder, theta_tilde);
    const RealVector w = detail::boosted_weights(problem, alpha);
    double f = 0.0;
    for (int k = 0; k < problem.num_users(); ++k)
    {
        double quad = problem.noise_power;
        for (int j = 0; j < problem.num_users(); ++j)
            quad += std::norm(cross(k, j));
        f += 2.0 * std::sqrt(w(k)) * (std::conj(beta(k)) * cross(k, k)).real() -
             std::norm(beta(k)) * quad;
    }
    return f;
}

namespace detail
{
// Solve (mu I + sum_k |beta_k|^2 h_k h_k^H) x = h_k for every k. At mu = 0 the
// system can be singular; the pseudo-inverse is the correct limit because
// every h_k with beta_k != 0 lies in the range.
inline ComplexMatrix precoder_at_mu(const ComplexMatrix &h_eff, const ComplexVector &beta,
                                    const RealVector &w_boost, double mu)
{
    const Eigen::Index n_t = h_eff.rows();
    const Eigen::Index k_users = h_eff.cols();
    ComplexMatrix m = mu * ComplexMatrix::Identity(n_t, n_t);
    for (Eigen::Index k = 0; k < k_users; ++k)
        m.noalias() += std::norm(beta(k)) * (h_eff.col(k) * h_eff.col(k).adjoint());

    ComplexMatrix solved(n_t, k_users);
    if (mu > 0.0)
    {
        Eigen::LLT<ComplexMatrix> llt(m);
        if (llt.info() == Eigen::Success)
        {
            solved = llt.solve(h_eff);
        }
        else
        {
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
            const RealVector ev = es.eigenvalues();
            RealVector inv = RealVector::Zero(ev.size());
            const double floor = 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
            for (Eigen::Index i = 0; i < ev.size(); ++i)
                inv(i) = ev(i) > floor ? 1.0 / ev(i) : 0.0;
            solved = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint() * h_eff;
        }
    }
    else
    {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
        const RealVector ev = es.eigenvalues();
        const double emax = ev.size() > 0 ? std::max(ev.maxCoeff(), 0.0) : 0.0;
        RealVector inv = RealVector::Zero(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            inv(i) = ev(i) > 1e-12 * std::max(emax, 1e-300) ? 1.0 / ev(i) : 0.0;
        solved = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint() * h_eff;
    }

    ComplexMatrix precoder(n_t, k_users);
    for (Eigen::Index k = 0; k < k_users; ++k)
        precoder.col(k) = std::sqrt(w_boost(k)) * beta(k) * solved.col(k);
    return precoder;
}
} // namespace detail

// Lagrangian precoder update (exact maximizer of f5 under the power budget):
// w_k = sqrt(w~_k) beta_k (mu I + sum_i |beta_i|^2 h_i h_i^H)^{-1} h_k with
// mu >= 0 from bisection so that tr(W W^H) = P_max when the constraint binds.
inline ComplexMatrix update_precoder(const SlotProblem &problem, const ComplexVector &theta_tilde,
                                     const RealVector &alpha, const ComplexVector &beta)
{
    problem.validate();
    const ComplexMatrix h_eff = problem.effective(theta_tilde);
    const RealVector w = detail::boosted_weights(problem, alpha);
    const double p_max = problem.power_budget;

    ComplexMatrix at_zero = detail::precoder_at_mu(h_eff, beta, w, 0.0);
    if (at_zero.squaredNorm() <= p_max * (1.0 + 1e-12))
        return at_zero;

    double hi = 1.0;
    ComplexMatrix feasible = detail::precoder_at_mu(h_eff, beta, w, hi);
    while (feasible.squaredNorm() >= p_max)
    {
        hi *= 2.0;
        require(hi < 1e30, "update_precoder: failed to bracket the power constraint");
        feasible = detail::precoder_at_mu(h_eff, beta, w, hi);
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        ComplexMatrix candidate = detail::precoder_at_mu(h_eff, beta, w, mid);
        const double power = candidate.squaredNorm();
        if (power <= p_max)
        {
            feasible = std::move(candidate); // keep the best strictly feasible iterate
            hi = mid;
            if (p_max - power <= 1e-8 * p_max)
                break;
        }
        else
        {
            lo = mid;
        }
    }
    return feasible;
}

// Stacked per-user cascade vectors v~_{k,j} (column-major over units):
// v_{i,k,j} = diag(h_{i,k}^H) G_i^H w_j, so that theta~^H v~_{k,j} equals the
// IRS part of h_k^H w_j. With a direct link the scalar h_{d,k}^H w_j is the
// theta-independent offset.
struct ReflectionLinearization
{
    std::vector<std::vector<ComplexVector>> v; // v[k][j], each of length I*N
    ComplexMatrix offset;                      // offset(k, j) = h_{d,k}^H w_j (zero without direct)
};

inline ReflectionLinearization reflection_linearization(const SlotProblem &problem,
                                                        const ComplexMatrix &precoder)
{
    problem.validate();
    const int k_users = problem.num_users();
    const int units = problem.num_units();
    const int n = problem.elements_per_unit();

    ReflectionLinearization lin;
    lin.offset = problem.has_direct() ? ComplexMatrix(problem.direct.adjoint() * precoder)
                                      : ComplexMatrix::Zero(k_users, k_users);
    lin.v.assign(static_cast<std::size_t>(k_users),
                 std::vector<ComplexVector>(static_cast<std::size_t>(k_users)));

    std::vector<ComplexMatrix> gw(static_cast<std::size_t>(units)); // G_i^H W, N x K
    for (int i = 0; i < units; ++i)
        gw[static_cast<std::size_t>(i)] = problem.bs_irs[static_cast<std::size_t>(i)].adjoint() * precoder;

    for (int k = 0; k < k_users; ++k)
        for (int j = 0; j < k_users; ++j)
        {
            ComplexVector stacked(static_cast<Eigen::Index>(units) * n);
            for (int i = 0; i < units; ++i)
            {
                const auto h_ik = problem.irs_user[static_cast<std::size_t>(i)].col(k);
                stacked.segment(static_cast<Eigen::Index>(i) * n, n) =
                    h_ik.conjugate().cwiseProduct(gw[static_cast<std::size_t>(i)].col(j));
            }
            lin.v[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = std::move(stacked);
        }
    return lin;
}

// Quadratic-transform auxiliary for the reflection subproblem; same form as
// beta but taken at the current (W, theta) pair:
// rho_k = sqrt(w~_k) h_k^H w_k / (sum_j |h_k^H w_j|^2 + sigma^2).
inline ComplexVector update_rho(const SlotProblem &problem, const ComplexMatrix &precoder,
                                const ComplexVector &theta_tilde, const RealVector &alpha)
{
    return update_beta(problem, precoder, theta_tilde, alpha);
}

// The f8 surrogate for a given rho (test hook).
inline double surrogate_f8(const SlotProblem &problem, const ComplexMatrix &precoder,
                           const ComplexVector &theta_tilde, const RealVector &alpha,
                           const ComplexVector &rho)
{
    return surrogate_f5(problem, precoder, theta_tilde, alpha, rho);
}

// Hermitian PSD quadratic form of the reflection subproblem: maximizing f8
// over theta~ is maximizing -theta~^H A theta~ + 2 Re{theta~^H b} + const with
//   A = sum_k |rho_k|^2 sum_j v~_{k,j} v~_{k,j}^H
//   b = sum_k [ sqrt(w~_k) rho_k^* v~_{k,k} - |rho_k|^2 sum_j conj(c_{k,j}) v~_{k,j} ]
// (the c terms vanish without a direct link, recovering the blocked-direct form).
struct ReflectionQuadratic
{
    ComplexMatrix a;
    ComplexVector b;
    double constant = 0.0; // f8 = f9(theta) + constant offset collected here
};

inline ReflectionQuadratic assemble_reflection_quadratic(const SlotProblem &problem,
                                                         const ComplexMatrix &precoder,
                                                         const RealVector &alpha,
                                                         const ComplexVector &rho)
{
    const ReflectionLinearization lin = reflection_linearization(problem, precoder);
    const RealVector w = detail::boosted_weights(problem, alpha);
    const int k_users = problem.num_users();
    const Eigen::Index dim = static_cast<Eigen::Index>(problem.num_units()) * problem.elements_per_unit();

    ReflectionQuadratic quad;
    quad.a = ComplexMatrix::Zero(dim, dim);
    quad.b = ComplexVector::Zero(dim);
    for (int k = 0; k < k_users; ++k)
    {
        const double rho2 = std::norm(rho(k));
        for (int j = 0; j < k_users; ++j)
        {
            const ComplexVector &v = lin.v[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            if (rho2 > 0.0)
            {
                quad.a.noalias() += rho2 * (v * v.adjoint());
                quad.b.noalias() -= rho2 * std::conj(lin.offset(k, j)) * v;
            }
            quad.constant -= rho2 * std::norm(lin.offset(k, j));
        }
        quad.b.noalias() += std::sqrt(w(k)) * std::conj(rho(k)) *
                            lin.v[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        quad.constant += 2.0 * std::sqrt(w(k)) * (std::conj(rho(k)) * lin.offset(k, k)).real();
        quad.constant -= rho2 * problem.noise_power;
    }
    return quad;
}

// ---------------------------------------------------------------------------
// Reflection dual solve (Lemma-style fixed point instead of a generic SDP).
// theta(zeta) = (A + diag(zeta))^{-1} b; the optimal zeta >= 0 makes every
// entry of theta unit-modulus. Jacobi sweeps of safeguarded Newton steps on
// g_n(zeta) = |theta_n|^2 - 1 (slope -2 D_nn |theta_n|^2 with D = inverse),
// projected to zeta >= 0 and damped by 0.5 whenever a sweep overshoots.
// ---------------------------------------------------------------------------

struct DualResult
{
    ComplexVector theta;
    RealVector zeta;
    int sweeps = 0;
    double modulus_residual = 0.0;    // max_n | |theta_n| - 1 |
    double stationarity_residual = 0.0; // ||(A + diag(zeta)) theta - b|| / ||b||
    bool converged = false;
};

inline DualResult solve_reflection_dual_detailed(const ComplexMatrix &a, const ComplexVector &b,
                                                 double tol = 1e-6, int max_sweeps = 500)
{
    const Eigen::Index n = b.size();
    require(a.rows() == n && a.cols() == n, "solve_reflection_dual: dimension mismatch");
    require(b.norm() > 0.0, "solve_reflection_dual: b must be nonzero");
    require((a - a.adjoint()).norm() <= 1e-10 * std::max(1.0, a.norm()),
            "solve_reflection_dual: A must be Hermitian");

    const ComplexMatrix a_sym = 0.5 * (a + a.adjoint());
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);

    // f_D(zeta) = b^H D(zeta) b + sum(zeta) is convex; minimizing it with
    // zeta >= 0 is the dual. theta(zeta) = D(zeta) b, grad f_D = 1 - |theta|^2.
    const auto solve_theta = [&](const RealVector &zeta, ComplexVector &theta) -> bool {
        ComplexMatrix m = a_sym;
        m.diagonal() += zeta.cast<Complex>();
        Eigen::LDLT<ComplexMatrix> ldlt(m);
        if (ldlt.info() != Eigen::Success)
            return false;
        theta = ldlt.solve(b);
        return true;
    };
    const auto dual_value = [&](const RealVector &zeta, const ComplexVector &theta) {
        return b.dot(theta).real() + zeta.sum();
    };

    DualResult res;
    res.zeta = b.cwiseAbs();
    const double zeta_floor = 1e-12 * std::max(res.zeta.maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
        res.zeta(i) = std::max(res.zeta(i), zeta_floor);

    if (!solve_theta(res.zeta, res.theta))
    {
        res.zeta.array() += 1e-8 * std::max(1.0, res.zeta.maxCoeff());
        if (!solve_theta(res.zeta, res.theta))
            return res;
    }
    double f_cur = dual_value(res.zeta, res.theta);

    for (int sweep = 1; sweep <= max_sweeps; ++sweep)
    {
        res.sweeps = sweep;
        double residual = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(std::abs(res.theta(i)) - 1.0));
        res.modulus_residual = residual;
        if (residual <= tol)
        {
            res.converged = true;
            break;
        }

        // Scaled Newton direction d_n = (|theta_n|^2 - 1) / (2 D_nn |theta_n|^2):
        // always a descent direction for f_D, since grad_n = 1 - |theta_n|^2.
        ComplexMatrix m = a_sym;
        m.diagonal() += res.zeta.cast<Complex>();
        const ComplexMatrix inv = m.ldlt().solve(eye);
        RealVector direction(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double mod2 = std::max(std::norm(res.theta(i)), 1e-300);
            direction(i) = (mod2 - 1.0) / (2.0 * std::max(inv(i, i).real(), 1e-300) * mod2);
        }

        // Projected backtracking: halve on overshoot until f_D decreases.
        double step = 1.0;
        RealVector zeta_next = res.zeta;
        ComplexVector theta_next = res.theta;
        double f_next = f_cur;
        bool improved = false;
        for (int attempt = 0; attempt < 30; ++attempt)
        {
            RealVector candidate = (res.zeta + step * direction).cwiseMax(0.0);
            ComplexVector theta_candidate;
            if (solve_theta(candidate, theta_candidate))
            {
                const double f_candidate = dual_value(candidate, theta_candidate);
                if (f_candidate < f_cur)
                {
                    zeta_next = std::move(candidate);
                    theta_next = std::move(theta_candidate);
                    f_next = f_candidate;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!improved)
            break; // stalled at the dual optimum without meeting the modulus target
        res.zeta = std::move(zeta_next);
        res.theta = std::move(theta_next);
        f_cur = f_next;
    }

    if (res.theta.size() == n)
    {
        ComplexMatrix m = a_sym;
        m.diagonal() += res.zeta.cast<Complex>();
        res.stationarity_residual = (m * res.theta - b).norm() / b.norm();
        double residual = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            residual = std::max(residual, std::abs(std::abs(res.theta(i)) - 1.0));
        res.modulus_residual = residual;
        res.converged = residual <= tol;
    }
    return res;
}

inline ComplexVector solve_reflection_dual(const ComplexMatrix &a, const ComplexVector &b,
                                           double tol = 1e-6, int max_sweeps = 500)
{
    DualResult res = solve_reflection_dual_detailed(a, b, tol, max_sweeps);
    if (!res.converged)
        throw convergence_error("solve_reflection_dual: unit-modulus condition not met", res.theta,
                                res.modulus_residual);
    return res.theta;
}

// Dual objective f_D(zeta) = b^H D(zeta) b + sum_n zeta_n; at the optimum it
// coincides with the primal f10 value (strong duality check used in tests).
inline double dual_objective(const ComplexMatrix &a, const ComplexVector &b, const RealVector &zeta)
{
    ComplexMatrix m = 0.5 * (a + a.adjoint());
    m.diagonal() += zeta.cast<Complex>();
    const ComplexVector x = m.ldlt().solve(b);
    return b.dot(x).real() + zeta.sum();
}

// ---------------------------------------------------------------------------
// Alternating optimization (precoder <-> reflection), Prop.-style monotone.
// ---------------------------------------------------------------------------

enum class ReflectionSolver
{
    dual,
    ucmo
};

struct AoState
{
    ComplexMatrix precoder;            // W, N_t x K
    ComplexVector theta_tilde;         // stacked unit-modulus reflections, I*N
    RealVector alpha;                  // SINR auxiliaries
    ComplexVector beta;                // precoder-side quadratic-transform auxiliaries
    ComplexVector rho_aux;             // reflection-side quadratic-transform auxiliaries
    std::vector<double> objective_trace; // f1 after init and after each iteration
};

struct AoOptions
{
    ReflectionSolver solver = ReflectionSolver::dual;
    double tol = 1e-6; // relative change of the objective
    int max_iters = 200;
    double dual_tol = 1e-6;
    int dual_max_sweeps = 500;
    UcmoConfig ucmo{0.0, 1e-10, 3000};
};

// Matched-filter precoder with an equal power split and all-zero phases:
// feasible and deterministic.
inline AoState initial_ao_state(const SlotProblem &problem)
{
    problem.validate();
    const int k_users = problem.num_users();
    AoState st;
    st.theta_tilde = ComplexVector::Ones(
        static_cast<Eigen::Index>(problem.num_units()) * problem.elements_per_unit());
    const ComplexMatrix h = problem.effective(st.theta_tilde);
    st.precoder = ComplexMatrix::Zero(problem.num_antennas(), k_users);
    const double per_user = problem.power_budget / k_users;
    for (int k = 0; k < k_users; ++k)
    {
        const double norm = h.col(k).norm();
        if (norm > 0.0)
            st.precoder.col(k) = std::sqrt(per_user) * h.col(k) / norm;
    }
    st.alpha = RealVector::Zero(k_users);
    st.beta = ComplexVector::Zero(k_users);
    st.rho_aux = ComplexVector::Zero(k_users);
    return st;
}

inline AoState run_ao(const SlotProblem &problem, AoState state, const AoOptions &opts = {})
{
    problem.validate();
    require(state.precoder.squaredNorm() <= problem.power_budget * (1.0 + 1e-9),
            "run_ao: initial precoder violates the power budget");
    for (Eigen::Index i = 0; i < state.theta_tilde.size(); ++i)
        require(std::abs(std::abs(state.theta_tilde(i)) - 1.0) <= 1e-6,
                "run_ao: initial reflection vector must be unit-modulus");

    state.objective_trace.clear();
    double f = weighted_sum_rate(problem, state.precoder, state.theta_tilde);
    state.objective_trace.push_back(f);

    for (int it = 0; it < opts.max_iters; ++it)
    {
        state.alpha = update_alpha(sinr(problem, state.precoder, state.theta_tilde));
        state.beta = update_beta(problem, state.precoder, state.theta_tilde, state.alpha);
        state.precoder = update_precoder(problem, state.theta_tilde, state.alpha, state.beta);
        state.rho_aux = update_rho(problem, state.precoder, state.theta_tilde, state.alpha);

        if (state.theta_tilde.size() > 0)
        {
            const ReflectionQuadratic quad =
                assemble_reflection_quadratic(problem, state.precoder, state.alpha, state.rho_aux);
            if (quad.b.norm() > 0.0)
            {
                ComplexVector candidate;
                if (opts.solver == ReflectionSolver::dual)
                {
                    const DualResult dr = solve_reflection_dual_detailed(quad.a, quad.b, opts.dual_tol,
                                                                         opts.dual_max_sweeps);
                    candidate = dr.theta;
                }
                else
                {
                    const ManifoldPoint start = ManifoldPoint::from_vector(state.theta_tilde);
                    candidate = detail::run_ucmo_impl(quad.a, quad.b, start, opts.ucmo).point.value;
                }
                // Snap to the manifold and keep the better of old/new; exact
                // subproblem solutions always win, so this only guards
                // unconverged inner solves from breaking monotonicity.
                for (Eigen::Index i = 0; i < candidate.size(); ++i)
                {
                    const double mag = std::abs(candidate(i));
                    candidate(i) = mag > 1e-14 ? candidate(i) / mag : Complex(1.0, 0.0);
                }
                if (quadratic_objective(quad.a, quad.b, candidate) >=
                    quadratic_objective(quad.a, quad.b, state.theta_tilde))
                    state.theta_tilde = candidate;
            }
        }

        const double f_next = weighted_sum_rate(problem, state.precoder, state.theta_tilde);
        state.objective_trace.push_back(f_next);
        const bool done = std::abs(f_next - f) <= opts.tol * (1.0 + std::abs(f));
        f = f_next;
        if (done)
            break;
    }
    return state;
}

} // namespace irsim
