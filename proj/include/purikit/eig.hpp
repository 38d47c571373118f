#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "purikit/cmatrix.hpp"

namespace purikit {

struct EigResult {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // column k is the eigenvector of values[k]
};

namespace detail {

// zero A(p,q) with the unitary J = D*G, D = diag(e^{i phi}, 1) absorbing the
// phase of A(p,q) and G the classic symmetric Schur rotation
struct JacobiRotation {
    cplx jpp, jpq;  // first row of the 2x2 block of J
    cplx jqp, jqq;  // second row
};

inline JacobiRotation make_rotation(const cplx& app, const cplx& apq, const cplx& aqq) {
    const double r = std::abs(apq);
    const cplx phase = apq / r;
    const double tau = (aqq.real() - app.real()) / (2.0 * r);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    return JacobiRotation{phase * c, phase * s, cplx(-s, 0.0), cplx(c, 0.0)};
}

inline double offdiag_norm(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace detail

// Cyclic Jacobi eigendecomposition of a Hermitian matrix. Eigenvalues are
// returned ascending; each eigenvector column has its largest-magnitude
// entry made real positive so repeated runs agree at the contract level.
inline EigResult eig_hermitian(const CMatrix& m, double tol = 1e-15, int max_sweeps = 60) {
    if (!m.is_square()) throw ArgumentError("eig_hermitian: matrix not square");
    if (m.hermiticity_deviation() > 1e-10 * std::max(1.0, m.norm_inf()))
        throw ArgumentError("eig_hermitian: matrix not Hermitian");

    const std::size_t n = m.rows();
    CMatrix a = m.hermitized();
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(a.norm_fro(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_norm(a) <= tol * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= 1e-300) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const auto rot = detail::make_rotation(a(p, p), a(p, q), a(q, q));
                // columns: A <- A*J, V <- V*J
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * rot.jpp + akq * rot.jqp;
                    a(k, q) = akp * rot.jpq + akq * rot.jqq;
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * rot.jpp + vkq * rot.jqp;
                    v(k, q) = vkp * rot.jpq + vkq * rot.jqq;
                }
                // rows: A <- J† * A
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(rot.jpp) * apk + std::conj(rot.jqp) * aqk;
                    a(q, k) = std::conj(rot.jpq) * apk + std::conj(rot.jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });

    EigResult res;
    res.values.resize(n);
    res.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        res.values[k] = diag[src];
        // canonical phase: largest-magnitude entry real positive
        std::size_t imax = 0;
        double amax = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double av = std::abs(v(i, src));
            if (av > amax + 1e-300) {
                amax = av;
                imax = i;
            }
        }
        cplx ph(1.0, 0.0);
        if (amax > 0.0) ph = std::conj(v(imax, src)) / amax;
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, k) = v(i, src) * ph;
    }
    return res;
}

inline double min_eigenvalue(const CMatrix& m) {
    return eig_hermitian(m).values.front();
}

// largest eigenpair of a PSD matrix by power iteration
inline std::pair<double, CMatrix> dominant_eigenpair(const CMatrix& m, int iters = 300) {
    const std::size_t n = m.rows();
    CMatrix v(n, 1);
    // deterministic start with nonzero overlap against any direction
    for (std::size_t i = 0; i < n; ++i) v[i] = cplx(1.0 + 1e-3 * double(i % 7), 1e-3 * double(i % 5));
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        CMatrix w = m * v;
        const double nw = w.norm_fro();
        if (nw <= 1e-300) return {0.0, v};
        w *= cplx(1.0 / nw, 0.0);
        lambda = std::real(inner(w, m * w));
        const double delta = max_abs_diff(w, v);
        v = w;
        if (it > 3 && delta < 1e-15) break;
    }
    return {lambda, v};
}

// Sound upper bound on the second-largest eigenvalue of a PSD matrix:
// deflate the dominant eigenpair and take the Frobenius norm of the rest.
inline double second_eigenvalue_bound(const CMatrix& m) {
    auto [l1, v] = dominant_eigenpair(m);
    CMatrix defl = m - cplx(l1, 0.0) * outer(v, v);
    return defl.norm_fro();
}

}  // namespace purikit
