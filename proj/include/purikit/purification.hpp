#pragma once

#include <string>
#include <vector>

#include "purikit/assemblages.hpp"

namespace purikit {

// Simultaneous purification: one setting-independent pure object omega on
// aux ⊗ H (ancilla first) plus per-(x,a) POVMs on the ancilla reproducing
// every member as Tr_A[(M_{a|x} ⊗ 1)|omega><omega|].
struct Purification {
    std::size_t aux_dim = 0;
    CMatrix omega;                             // column vector on aux ⊗ H
    std::vector<std::vector<CMatrix>> povms;   // [x][a], on the ancilla
    QuantumObjectSet extended_set;

    CMatrix omega_matrix() const { return outer(omega, omega); }

    CMatrix reconstruct(std::size_t x, std::size_t a) const {
        return compress_with_povm(omega, aux_dim, povms[x][a]);
    }
};

namespace detail {

// the state construction: omega = sum_i |i> ⊗ O^{1/2}|i>,
// M_{a|x} = [O^{-1/2} O_{a|x} O^{-1/2} + (1 - Pi_supp)/|A_x|]^T
inline Purification purify_core(const Assemblage& asm_, double tol) {
    const auto rep = marginals(asm_, tol);
    if (!rep.is_non_signalling)
        throw SignallingError("purify: assemblage is signalling (marginal deviation " +
                                  std::to_string(rep.max_deviation) + ")",
                              rep.max_deviation);
    const CMatrix& marg = rep.marginal;
    const std::size_t d = marg.rows();

    CMatrix sqrt_m = psd_pow(marg, 0.5);
    CMatrix isqrt_m = psd_pow(marg, -0.5);
    CMatrix completion = CMatrix::identity(d) - support_projector(marg);

    Purification p;
    p.aux_dim = d;
    p.omega = CMatrix(d * d, 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t h = 0; h < d; ++h) p.omega[i * d + h] = sqrt_m(h, i);

    for (std::size_t x = 0; x < asm_.n_settings(); ++x) {
        std::vector<CMatrix> row;
        const double share = 1.0 / double(asm_.n_outcomes(x));
        for (std::size_t a = 0; a < asm_.n_outcomes(x); ++a) {
            CMatrix n = isqrt_m * asm_.member(x, a) * isqrt_m + completion * cplx(share, 0.0);
            row.push_back(n.hermitized().transpose());
        }
        p.povms.push_back(std::move(row));
    }
    p.extended_set = extend_set(asm_.set, d);
    return p;
}

}  // namespace detail

// Theorem for state assemblages: requires a state-type set.
inline Purification purify_states(const Assemblage& asm_, double tol = kDefaultTol) {
    if (asm_.set.projector.kind != ObjectKind::state)
        throw ArgumentError("purify_states: assemblage is not over a state set");
    return detail::purify_core(asm_, tol);
}

// General quantum-object version: treat the Choi operators as a
// (sub-normalized) state assemblage, purify, then certify the result as a
// pure object of the extended set.
inline Purification purify_object(const Assemblage& asm_, double tol = kDefaultTol) {
    Purification p = detail::purify_core(asm_, tol);
    // P'(omega omega†) = omega omega† reduces to the marginal being a fixed
    // point of the base projector; check on the extended space directly
    CMatrix omega_mat = p.omega_matrix();
    const double pdev = max_abs_diff(project(p.extended_set, omega_mat), omega_mat);
    if (pdev > tol)
        throw InconsistencyError(
            "purify_object: purification violates the extended projector by " +
            std::to_string(pdev) + " (input set invalid?)");
    const double tr = std::real(inner(p.omega, p.omega));
    if (tr > asm_.set.gamma + tol)
        throw InconsistencyError("purify_object: Tr[omega omega†] = " + std::to_string(tr) +
                                 " exceeds gamma = " + std::to_string(asm_.set.gamma));
    return p;
}

// max over (x,a) of ||Tr_A[(M_{a|x} ⊗ 1) omega omega†] - O_{a|x}||_inf
inline double verify_purification(const Assemblage& asm_, const Purification& p) {
    if (p.omega.rows() != p.aux_dim * asm_.set.dim())
        throw ArgumentError("verify_purification: dimension mismatch");
    if (p.povms.size() != asm_.n_settings())
        throw ArgumentError("verify_purification: setting count mismatch");
    double dev = 0.0;
    for (std::size_t x = 0; x < asm_.n_settings(); ++x) {
        if (p.povms[x].size() != asm_.n_outcomes(x))
            throw ArgumentError("verify_purification: outcome count mismatch");
        for (std::size_t a = 0; a < asm_.n_outcomes(x); ++a)
            dev = std::max(dev, max_abs_diff(p.reconstruct(x, a), asm_.member(x, a)));
    }
    return dev;
}

struct KrausFamily {
    std::vector<CMatrix> operators;  // K_i : H_I -> H_O, eigenvalue-descending
    std::size_t rank = 0;
};

namespace detail {

// eigenpairs above the kernel threshold, K_i = sqrt(lambda_i) unvec(v_i);
// works for sub-normalized CP maps too
inline KrausFamily kraus_from_choi(const CMatrix& choi, const SpaceLayout& layout) {
    check_layout_matches(choi, layout, "kraus_from_choi");
    std::set<std::string> in_labels;
    for (const auto& l : layout.labels_with_role(Role::input)) in_labels.insert(l);
    const auto in_off = group_offsets(layout, positions_of(layout, in_labels, false));
    const auto out_off = group_offsets(layout, positions_of(layout, in_labels, true));
    const std::size_t di = in_off.size(), dout = out_off.size();

    const auto eig = eig_hermitian(choi.hermitized());
    if (eig.values.front() < -1e-8 * std::max(1.0, choi.norm_inf()))
        throw NotPsdError("kraus_from_choi: Choi not PSD");

    const double tau = kKernelTauFactor * std::max(eig.values.back(), 0.0);
    KrausFamily kf;
    for (std::size_t k = eig.values.size(); k-- > 0;) {
        const double lam = eig.values[k];
        if (lam <= tau) break;
        const double w = std::sqrt(lam);
        CMatrix op(dout, di);
        for (std::size_t i = 0; i < di; ++i)
            for (std::size_t o = 0; o < dout; ++o) op(o, i) = w * eig.vectors(in_off[i] + out_off[o], k);
        kf.operators.push_back(std::move(op));
    }
    kf.rank = kf.operators.size();
    return kf;
}

}  // namespace detail

// Minimal Kraus decomposition of a channel Choi (trace-preserving map).
inline KrausFamily minimal_kraus(const CMatrix& choi, const SpaceLayout& layout,
                                 double tol = 1e-7) {
    detail::check_layout_matches(choi, layout, "minimal_kraus");
    std::size_t di = 1;
    for (const auto& l : layout.labels_with_role(Role::input)) di *= layout.dim_of(l);
    CMatrix tr_out =
        partial_trace(choi, layout, detail::as_set(layout.labels_with_role(Role::output)));
    if (max_abs_diff(tr_out, CMatrix::identity(di)) > tol)
        throw ArgumentError("minimal_kraus: Tr_O[choi] deviates from identity by " +
                            std::to_string(max_abs_diff(tr_out, CMatrix::identity(di))));
    return detail::kraus_from_choi(choi, layout);
}

// Kraus-route dilation of an instrument assemblage: isometry
// V : H_I -> H_A ⊗ H_O built from the marginal's minimal Kraus family plus
// POVMs from the expansion coefficients of each member's Kraus operators.
struct IsometricDilation {
    std::size_t aux_dim = 0;
    CMatrix isometry;  // (aux_dim * d_O) x d_I, rows ordered ancilla ⊗ output
    std::vector<std::vector<CMatrix>> povms;  // [x][a] on the ancilla
    double coefficient_residual = 0.0;        // worst ||L_mu - sum_i u_i K_i||_inf
    double isometry_relation_deviation = 0.0; // worst_x ||sum_{a,mu} u* u - 1||_inf
    std::size_t d_in = 0, d_out = 0;

    // Choi of rho -> Tr_A[(M_{a|x} ⊗ 1) V rho V†]
    CMatrix member_choi(std::size_t x, std::size_t a) const {
        const CMatrix& m = povms[x][a];
        CMatrix choi(d_in * d_out, d_in * d_out);
        for (std::size_t i = 0; i < d_in; ++i)
            for (std::size_t j = 0; j < d_in; ++j)
                for (std::size_t o = 0; o < d_out; ++o)
                    for (std::size_t op = 0; op < d_out; ++op) {
                        cplx acc = 0.0;
                        for (std::size_t al = 0; al < aux_dim; ++al)
                            for (std::size_t ar = 0; ar < aux_dim; ++ar)
                                acc += m(al, ar) * isometry(ar * d_out + o, i) *
                                       std::conj(isometry(al * d_out + op, j));
                        choi(i * d_out + o, j * d_out + op) = acc;
                    }
        return choi;
    }
};

namespace detail {

// solve the r x r Hermitian system G u = b by Gaussian elimination
inline std::vector<cplx> solve_small(CMatrix g, std::vector<cplx> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(g(i, k)) > std::abs(g(piv, k))) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(g(k, j), g(piv, j));
            std::swap(b[k], b[piv]);
        }
        const cplx d = g(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = g(i, k) / d;
            for (std::size_t j = k; j < n; ++j) g(i, j) -= f * g(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<cplx> u(n);
    for (std::size_t k = n; k-- > 0;) {
        cplx s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= g(k, j) * u[j];
        u[k] = s / g(k, k);
    }
    return u;
}

}  // namespace detail

inline IsometricDilation purify_instrument_kraus(const Assemblage& asm_, double tol = kDefaultTol) {
    if (asm_.set.projector.kind != ObjectKind::channel)
        throw ArgumentError("purify_instrument_kraus: assemblage is not over a channel set");
    const auto rep = marginals(asm_, tol);
    if (!rep.is_non_signalling)
        throw SignallingError("purify_instrument_kraus: assemblage is signalling (deviation " +
                                  std::to_string(rep.max_deviation) + ")",
                              rep.max_deviation);

    const KrausFamily kf = minimal_kraus(rep.marginal, asm_.set.layout);
    const std::size_t r = kf.rank;
    IsometricDilation dil;
    dil.aux_dim = r;
    dil.d_in = kf.operators.front().cols();
    dil.d_out = kf.operators.front().rows();
    dil.isometry = CMatrix(r * dil.d_out, dil.d_in);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t o = 0; o < dil.d_out; ++o)
            for (std::size_t v = 0; v < dil.d_in; ++v)
                dil.isometry(i * dil.d_out + o, v) = kf.operators[i](o, v);

    CMatrix gram(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) gram(i, j) = hs_inner(kf.operators[i], kf.operators[j]);

    for (std::size_t x = 0; x < asm_.n_settings(); ++x) {
        std::vector<CMatrix> row;
        CMatrix total(r, r);
        for (std::size_t a = 0; a < asm_.n_outcomes(x); ++a) {
            const KrausFamily lf = detail::kraus_from_choi(asm_.member(x, a), asm_.set.layout);
            CMatrix m(r, r);
            for (const auto& l : lf.operators) {
                std::vector<cplx> b(r);
                for (std::size_t i = 0; i < r; ++i) b[i] = hs_inner(kf.operators[i], l);
                const auto u = detail::solve_small(gram, b);
                CMatrix resid = l;
                for (std::size_t i = 0; i < r; ++i) resid -= kf.operators[i] * u[i];
                dil.coefficient_residual = std::max(dil.coefficient_residual, resid.norm_inf());
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < r; ++j) m(i, j) += u[i] * std::conj(u[j]);
            }
            row.push_back(m.hermitized());
            total += row.back();
        }
        dil.isometry_relation_deviation = std::max(
            dil.isometry_relation_deviation, max_abs_diff(total, CMatrix::identity(r)));
        dil.povms.push_back(std::move(row));
    }
    if (dil.coefficient_residual > tol)
        throw InconsistencyError(
            "purify_instrument_kraus: member Kraus operators leave the span of the marginal's "
            "(residual " + std::to_string(dil.coefficient_residual) + ")");
    return dil;
}

}  // namespace purikit
