#pragma once

#include <atomic>
#include <set>
#include <string>
#include <vector>

#include "purikit/cmatrix.hpp"
#include "purikit/eig.hpp"
#include "purikit/layout.hpp"

namespace purikit {

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kKernelTauFactor = 1e-10;

// total-dimension cap for composite spaces; set once at process start
// (PURIKIT_MAX_DIM / --max-dim), read-only afterwards
inline std::atomic<std::size_t>& max_total_dim() {
    static std::atomic<std::size_t> cap{4096};
    return cap;
}

inline void check_capacity(std::size_t dim, const char* where) {
    if (dim > max_total_dim().load())
        throw CapacityError(std::string(where) + ": total dimension " + std::to_string(dim) +
                            " exceeds cap " + std::to_string(max_total_dim().load()));
}

// Kronecker product; first operand is the slowest-varying index
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    check_capacity(a.rows() * b.rows(), "tensor");
    check_capacity(a.cols() * b.cols(), "tensor");
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

inline CMatrix tensor(const std::vector<CMatrix>& ms) {
    if (ms.empty()) return CMatrix::identity(1);
    CMatrix out = ms.front();
    for (std::size_t i = 1; i < ms.size(); ++i) out = tensor(out, ms[i]);
    return out;
}

namespace detail {

inline void check_layout_matches(const CMatrix& m, const SpaceLayout& layout, const char* where) {
    if (m.rows() != layout.total_dim())
        throw ArgumentError(std::string(where) + ": layout dim " +
                            std::to_string(layout.total_dim()) + " does not match matrix dim " +
                            std::to_string(m.rows()));
}

}  // namespace detail

// Trace out the factors named in `traced`; remaining factors keep their
// original order.
inline CMatrix partial_trace(const CMatrix& m, const SpaceLayout& layout,
                             const std::set<std::string>& traced) {
    if (!m.is_square()) throw ArgumentError("partial_trace: matrix not square");
    detail::check_layout_matches(m, layout, "partial_trace");
    for (const auto& lab : traced)
        if (!layout.has(lab)) throw ArgumentError("partial_trace: unknown label '" + lab + "'");

    const auto keep_pos = positions_of(layout, traced, /*complement=*/true);
    const auto tr_pos = positions_of(layout, traced, /*complement=*/false);
    const auto keep_off = group_offsets(layout, keep_pos);
    const auto tr_off = group_offsets(layout, tr_pos);

    CMatrix out(keep_off.size(), keep_off.size());
    for (std::size_t r = 0; r < keep_off.size(); ++r)
        for (std::size_t c = 0; c < keep_off.size(); ++c) {
            cplx s = 0.0;
            for (const auto t : tr_off) s += m(keep_off[r] + t, keep_off[c] + t);
            out(r, c) = s;
        }
    return out;
}

// Replace the named factors with the maximally mixed state:
// m -> Tr_S[m] ⊗ 1_S / d_S, identity re-inserted at the original positions.
// Orthogonal projection in the Hilbert-Schmidt inner product.
inline CMatrix depolarize_factors(const CMatrix& m, const SpaceLayout& layout,
                                  const std::set<std::string>& labels) {
    if (labels.empty()) return m;
    detail::check_layout_matches(m, layout, "depolarize_factors");
    const auto keep_pos = positions_of(layout, labels, true);
    const auto dep_pos = positions_of(layout, labels, false);
    const auto keep_off = group_offsets(layout, keep_pos);
    const auto dep_off = group_offsets(layout, dep_pos);
    const double inv_d = 1.0 / double(dep_off.size());

    CMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < keep_off.size(); ++r)
        for (std::size_t c = 0; c < keep_off.size(); ++c) {
            cplx s = 0.0;
            for (const auto t : dep_off) s += m(keep_off[r] + t, keep_off[c] + t);
            s *= inv_d;
            for (const auto t : dep_off) out(keep_off[r] + t, keep_off[c] + t) = s;
        }
    return out;
}

// Hermitian matrix power for p in {1/2, -1/2} via eigendecomposition.
// Eigenvalues below tau = kKernelTauFactor * lambda_max count as exactly 0
// (Moore-Penrose convention for the inverse square root).
inline CMatrix psd_pow(const CMatrix& m, double p, double* kernel_tau = nullptr) {
    if (!m.is_square()) throw ArgumentError("psd_pow: matrix not square");
    const auto eig = eig_hermitian(m);
    const double lmax = eig.values.empty() ? 0.0 : eig.values.back();
    if (!eig.values.empty() && eig.values.front() < -1e-8 * std::max(1.0, m.norm_inf()))
        throw NotPsdError("psd_pow: eigenvalue " + std::to_string(eig.values.front()) +
                          " below PSD tolerance");
    const double tau = kKernelTauFactor * std::max(lmax, 0.0);
    if (kernel_tau) *kernel_tau = tau;

    const std::size_t n = m.rows();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = eig.values[k];
        if (lam <= tau) continue;
        const double f = (p > 0) ? std::sqrt(lam) : 1.0 / std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = eig.vectors(i, k) * f;
            if (vik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eig.vectors(j, k));
        }
    }
    return out.hermitized();
}

// projector onto the support of a PSD matrix (eigenvalues above tau)
inline CMatrix support_projector(const CMatrix& m) {
    const auto eig = eig_hermitian(m);
    const double tau = kKernelTauFactor * std::max(eig.values.back(), 0.0);
    const std::size_t n = m.rows();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] <= tau) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    }
    return out.hermitized();
}

// Apply a Choi operator (unnormalized, input factors first by convention of
// the layout roles) to a state: Tr_I[(rho^T ⊗ 1_O) choi].
inline CMatrix apply_choi(const CMatrix& choi, const SpaceLayout& layout, const CMatrix& rho) {
    detail::check_layout_matches(choi, layout, "apply_choi");
    std::set<std::string> in_labels;
    for (const auto& lab : layout.labels_with_role(Role::input)) in_labels.insert(lab);
    const auto in_pos = positions_of(layout, in_labels, false);
    const auto out_pos = positions_of(layout, in_labels, true);
    const auto in_off = group_offsets(layout, in_pos);
    const auto out_off = group_offsets(layout, out_pos);
    if (rho.rows() != in_off.size() || !rho.is_square())
        throw ArgumentError("apply_choi: state dim " + std::to_string(rho.rows()) +
                            " does not match input dim " + std::to_string(in_off.size()));

    CMatrix out(out_off.size(), out_off.size());
    for (std::size_t i = 0; i < in_off.size(); ++i)
        for (std::size_t j = 0; j < in_off.size(); ++j) {
            const cplx rji = rho(j, i);
            if (rji == cplx(0.0, 0.0)) continue;
            for (std::size_t r = 0; r < out_off.size(); ++r)
                for (std::size_t c = 0; c < out_off.size(); ++c)
                    out(r, c) += rji * choi(in_off[i] + out_off[r], in_off[j] + out_off[c]);
        }
    return out;
}

struct LabeledMatrix {
    CMatrix m;
    SpaceLayout layout;
};

// Link product A ⋆ B = Tr_S[(A^{T_S} ⊗ 1)(1 ⊗ B)] over the shared labels S.
// Result acts on A's unshared factors followed by B's unshared factors.
// With S = ∅ this is the tensor product.
inline LabeledMatrix link_product(const CMatrix& a, const SpaceLayout& la, const CMatrix& b,
                                  const SpaceLayout& lb, const std::set<std::string>& shared) {
    detail::check_layout_matches(a, la, "link_product");
    detail::check_layout_matches(b, lb, "link_product");
    std::vector<std::size_t> sa_pos, sb_pos;
    for (const auto& lab : shared) {
        if (!la.has(lab) || !lb.has(lab))
            throw ArgumentError("link_product: shared label '" + lab + "' missing from an operand");
        if (la.dim_of(lab) != lb.dim_of(lab))
            throw ArgumentError("link_product: shared label '" + lab + "' has dim " +
                                std::to_string(la.dim_of(lab)) + " vs " +
                                std::to_string(lb.dim_of(lab)));
        sa_pos.push_back(la.position(lab));
        sb_pos.push_back(lb.position(lab));
    }
    const auto ka_pos = positions_of(la, shared, true);
    const auto kb_pos = positions_of(lb, shared, true);
    const auto ka_off = group_offsets(la, ka_pos);
    const auto kb_off = group_offsets(lb, kb_pos);
    const auto sa_off = group_offsets(la, sa_pos);
    const auto sb_off = group_offsets(lb, sb_pos);
    const std::size_t ds = sa_off.size();

    const SpaceLayout lout = la.without(shared).concat(lb.without(shared));
    check_capacity(lout.total_dim(), "link_product");

    CMatrix out(ka_off.size() * kb_off.size(), ka_off.size() * kb_off.size());
    for (std::size_t ra = 0; ra < ka_off.size(); ++ra)
        for (std::size_t ca = 0; ca < ka_off.size(); ++ca)
            for (std::size_t rb = 0; rb < kb_off.size(); ++rb)
                for (std::size_t cb = 0; cb < kb_off.size(); ++cb) {
                    cplx acc = 0.0;
                    for (std::size_t s = 0; s < ds; ++s)
                        for (std::size_t sp = 0; sp < ds; ++sp)
                            acc += a(ka_off[ra] + sa_off[sp], ka_off[ca] + sa_off[s]) *
                                   b(sb_off[sp] + kb_off[rb], sb_off[s] + kb_off[cb]);
                    out(ra * kb_off.size() + rb, ca * kb_off.size() + cb) = acc;
                }
    return {out, lout};
}

struct LabeledVector {
    CMatrix v;  // column
    SpaceLayout layout;
};

// Pure-state shortcut of the link product: if A = |a><a| and B = |b><b|,
// then A ⋆ B = |c><c| with c the plain bilinear contraction below.
inline LabeledVector contract_pure(const CMatrix& a, const SpaceLayout& la, const CMatrix& b,
                                   const SpaceLayout& lb, const std::set<std::string>& shared) {
    if (!a.is_column() || !b.is_column()) throw ArgumentError("contract_pure: expects column vectors");
    if (a.rows() != la.total_dim() || b.rows() != lb.total_dim())
        throw ArgumentError("contract_pure: layout/vector dim mismatch");
    std::vector<std::size_t> sa_pos, sb_pos;
    for (const auto& lab : shared) {
        if (la.dim_of(lab) != lb.dim_of(lab))
            throw ArgumentError("contract_pure: shared dim mismatch on '" + lab + "'");
        sa_pos.push_back(la.position(lab));
        sb_pos.push_back(lb.position(lab));
    }
    const auto ka_off = group_offsets(la, positions_of(la, shared, true));
    const auto kb_off = group_offsets(lb, positions_of(lb, shared, true));
    const auto sa_off = group_offsets(la, sa_pos);
    const auto sb_off = group_offsets(lb, sb_pos);

    const SpaceLayout lout = la.without(shared).concat(lb.without(shared));
    check_capacity(lout.total_dim(), "contract_pure");

    CMatrix out(ka_off.size() * kb_off.size(), 1);
    for (std::size_t ra = 0; ra < ka_off.size(); ++ra)
        for (std::size_t rb = 0; rb < kb_off.size(); ++rb) {
            cplx acc = 0.0;
            for (std::size_t s = 0; s < sa_off.size(); ++s)
                acc += a[ka_off[ra] + sa_off[s]] * b[sb_off[s] + kb_off[rb]];
            out[ra * kb_off.size() + rb] = acc;
        }
    return {out, lout};
}

// Apply an operator acting on a single named factor to a state vector.
inline CMatrix apply_factor_op(const CMatrix& v, const SpaceLayout& layout,
                               const std::string& label, const CMatrix& op) {
    const std::size_t pos = layout.position(label);
    const std::size_t d = layout.factor(pos).dim;
    if (op.rows() != d || op.cols() != d)
        throw ArgumentError("apply_factor_op: operator dim mismatch on '" + label + "'");
    const auto strides = layout.strides();
    const std::size_t stride = strides[pos];
    const auto rest_off = group_offsets(layout, positions_of(layout, {label}, true));

    CMatrix out(v.rows(), 1);
    for (const auto base : rest_off)
        for (std::size_t i = 0; i < d; ++i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) acc += op(i, j) * v[base + j * stride];
            out[base + i * stride] = acc;
        }
    return out;
}

// same, acting on a density matrix from both sides: op_on_factor · rho · op†
inline CMatrix conjugate_factor_op(const CMatrix& rho, const SpaceLayout& layout,
                                   const std::string& label, const CMatrix& op) {
    const std::size_t pos = layout.position(label);
    const std::size_t d = layout.factor(pos).dim;
    const std::size_t stride = layout.strides()[pos];
    const auto rest_off = group_offsets(layout, positions_of(layout, {label}, true));

    CMatrix tmp(rho.rows(), rho.cols());
    for (const auto br : rest_off)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t c = 0; c < rho.cols(); ++c) {
                cplx acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += op(i, j) * rho(br + j * stride, c);
                tmp(br + i * stride, c) = acc;
            }
    CMatrix out(rho.rows(), rho.cols());
    for (const auto bc : rest_off)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t r = 0; r < rho.rows(); ++r) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < d; ++k) acc += tmp(r, bc + k * stride) * std::conj(op(j, k));
                out(r, bc + j * stride) = acc;
            }
    return out;
}

// Choi operator of a map given by Kraus operators, input factor first:
// sum_ij |i><j| ⊗ (sum_k K_k |i><j| K_k†)
inline CMatrix kraus_to_choi(const std::vector<CMatrix>& kraus) {
    if (kraus.empty()) throw ArgumentError("kraus_to_choi: empty family");
    const std::size_t di = kraus.front().cols();
    const std::size_t dout = kraus.front().rows();
    CMatrix choi(di * dout, di * dout);
    for (const auto& k : kraus)
        for (std::size_t i = 0; i < di; ++i)
            for (std::size_t j = 0; j < di; ++j)
                for (std::size_t r = 0; r < dout; ++r)
                    for (std::size_t c = 0; c < dout; ++c)
                        choi(i * dout + r, j * dout + c) += k(r, i) * std::conj(k(c, j));
    return choi;
}

}  // namespace purikit
