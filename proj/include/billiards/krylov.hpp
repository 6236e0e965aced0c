#pragma once
/**
 * @file krylov.hpp
 * @brief Conjugate gradients on the normal equations (CGLS) for complex systems.
 *
 * For the Crank-Nicolson matrix A = I + i*a*H with H real symmetric, A is
 * normal and A^H A = I + a^2 H^2 is Hermitian positive definite with a small
 * condition number, so CG on the normal equations converges in a few
 * iterations. The unconjugated COCG variant is avoided: for fields carrying
 * momentum its bilinear form r^T r nearly cancels and the iteration stalls.
 *
 * Convergence is judged on the residual ||b - A x|| / ||b|| and confirmed
 * against a freshly computed residual before returning.
 */

#include <cmath>
#include <complex>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "billiards/errors.hpp"

namespace billiards::krylov {

using Complex = std::complex<double>;

struct SolveStats {
    int iterations{0};
    double relative_residual{0.0};
};

inline double norm2(std::span<const Complex> u) {
    double s = 0.0;
    for (const auto& z : u) s += std::norm(z);
    return std::sqrt(s);
}

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

/// Solves A x = b in place, starting from the incoming x.
/// `apply(in, out)` writes A*in and `apply_adjoint(in, out)` writes A^H*in.
/// Throws SolverError when the relative residual has not reached `tolerance`
/// within `max_iterations` iterations.
template <typename Apply, typename ApplyAdjoint>
SolveStats cgls(Apply&& apply, ApplyAdjoint&& apply_adjoint, std::span<const Complex> b, std::span<Complex> x,
                double tolerance, int max_iterations) {
    const std::size_t n = b.size();
    SolveStats stats;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        for (auto& v : x) v = 0.0;
        return stats;
    }

    std::vector<Complex> r(n), s(n), p(n), q(n);
    auto true_residual = [&]() {
        apply(std::span<const Complex>(x), std::span<Complex>(q));
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        return norm2(r) / bnorm;
    };

    double rel = true_residual();
    while (rel >= tolerance) {
        apply_adjoint(std::span<const Complex>(r), std::span<Complex>(s));
        p = s;
        double gamma = norm2(s);
        gamma *= gamma;
        for (;;) {
            if (stats.iterations >= max_iterations) {
                stats.relative_residual = rel;
                throw SolverError("CGLS did not converge in " + std::to_string(max_iterations) +
                                      " iterations (relative residual " + sci(rel) + ")",
                                  rel, stats.iterations);
            }
            apply(std::span<const Complex>(p), std::span<Complex>(q));
            ++stats.iterations;
            double qq = norm2(q);
            qq *= qq;
            if (!(qq > 0.0) || !(gamma > 0.0)) {
                throw SolverError("CGLS breakdown (relative residual " + sci(rel) + ")", rel, stats.iterations);
            }
            const double alpha = gamma / qq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            rel = norm2(r) / bnorm;
            if (rel < tolerance) {
                rel = true_residual();
                break;  // restart from the true residual if the recurrence drifted
            }
            apply_adjoint(std::span<const Complex>(r), std::span<Complex>(s));
            double gamma_next = norm2(s);
            gamma_next *= gamma_next;
            const double beta = gamma_next / gamma;
            gamma = gamma_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = s[i] + beta * p[i];
        }
    }
    stats.relative_residual = rel;
    return stats;
}

}  // namespace billiards::krylov
