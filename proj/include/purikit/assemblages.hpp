#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "purikit/objectsets.hpp"
#include "purikit/rng.hpp"

namespace purikit {

// Family of sub-normalized quantum objects O_{a|x} within one object set.
// Outcome lists may be ragged across settings; completeness is per-setting.
struct Assemblage {
    QuantumObjectSet set;
    std::vector<std::string> settings;               // labels for x
    std::vector<std::vector<std::string>> outcomes;  // labels for a, per setting
    std::vector<std::vector<CMatrix>> members;       // members[x][a]

    std::size_t n_settings() const { return settings.size(); }
    std::size_t n_outcomes(std::size_t x) const { return outcomes[x].size(); }
    const CMatrix& member(std::size_t x, std::size_t a) const { return members[x][a]; }

    CMatrix setting_sum(std::size_t x) const {
        CMatrix s(set.dim(), set.dim());
        for (const auto& m : members[x]) s += m;
        return s;
    }
};

struct AssemblageReport {
    bool members_psd = true;
    bool sums_projector_ok = true;
    bool sums_trace_ok = true;
    double worst_member_min_eig = 0.0;
    double worst_member_trace_excess = 0.0;     // max(Tr member - gamma, 0)
    double worst_sum_projector_deviation = 0.0; // ||P(sum_a O_{a|x}) - sum||_inf
    double worst_sum_trace_deviation = 0.0;     // |Tr sum_a O_{a|x} - gamma|
    double worst_member_projector_deviation = 0.0;  // diagnostic only
    std::string offender;                           // "(x=...,a=...)" of first violation
    bool valid() const { return members_psd && sums_projector_ok && sums_trace_ok; }
};

// Assemblage validity: every member PSD and sub-normalized, every
// per-setting sum a normalized fixed point of the set's projector. The
// per-member projector deviation is reported but does not gate validity:
// sub-normalized members of instrument or comb assemblages are generally
// outside the projector subspace even though their per-setting sums are in
// it.
inline AssemblageReport validate(const Assemblage& asm_, double tol = kDefaultTol) {
    AssemblageReport r;
    for (std::size_t x = 0; x < asm_.n_settings(); ++x) {
        for (std::size_t a = 0; a < asm_.n_outcomes(x); ++a) {
            const CMatrix& m = asm_.member(x, a);
            const double mineig = min_eigenvalue(m.hermitized());
            if (mineig < r.worst_member_min_eig) {
                r.worst_member_min_eig = mineig;
                if (mineig < -tol && r.offender.empty())
                    r.offender = "(x=" + asm_.settings[x] + ",a=" + asm_.outcomes[x][a] + ")";
            }
            r.worst_member_trace_excess =
                std::max(r.worst_member_trace_excess, m.trace().real() - asm_.set.gamma);
            r.worst_member_projector_deviation = std::max(
                r.worst_member_projector_deviation, max_abs_diff(project(asm_.set, m), m));
        }
        const CMatrix sum = asm_.setting_sum(x);
        r.worst_sum_projector_deviation =
            std::max(r.worst_sum_projector_deviation, max_abs_diff(project(asm_.set, sum), sum));
        r.worst_sum_trace_deviation =
            std::max(r.worst_sum_trace_deviation, std::abs(sum.trace().real() - asm_.set.gamma));
    }
    r.members_psd = r.worst_member_min_eig >= -tol && r.worst_member_trace_excess <= tol;
    r.sums_projector_ok = r.worst_sum_projector_deviation <= tol;
    r.sums_trace_ok = r.worst_sum_trace_deviation <= tol;
    return r;
}

struct MarginalReport {
    bool is_non_signalling = false;
    CMatrix marginal;       // arithmetic mean over settings (canonical O)
    double max_deviation = 0.0;  // largest ||sum_a O_{a|x} - sum_a O_{a|x'}||_inf
};

// Non-signalling test: per-setting sums must agree pairwise.
inline MarginalReport marginals(const Assemblage& asm_, double tol = kDefaultTol) {
    MarginalReport r;
    std::vector<CMatrix> sums;
    sums.reserve(asm_.n_settings());
    for (std::size_t x = 0; x < asm_.n_settings(); ++x) sums.push_back(asm_.setting_sum(x));
    CMatrix mean(asm_.set.dim(), asm_.set.dim());
    for (const auto& s : sums) mean += s;
    mean *= cplx(1.0 / double(sums.size()), 0.0);
    for (std::size_t x = 0; x < sums.size(); ++x)
        for (std::size_t y = x + 1; y < sums.size(); ++y)
            r.max_deviation = std::max(r.max_deviation, max_abs_diff(sums[x], sums[y]));
    r.marginal = mean.hermitized();
    r.is_non_signalling = r.max_deviation <= tol;
    return r;
}

// embed an operator acting on the product of `labels` (in layout order)
// into the full space, identity on the remaining factors
inline CMatrix embed_on_factors(const CMatrix& op, const SpaceLayout& layout,
                                const std::set<std::string>& labels) {
    const auto on_pos = positions_of(layout, labels, false);
    const auto rest_pos = positions_of(layout, labels, true);
    const auto on_off = group_offsets(layout, on_pos);
    const auto rest_off = group_offsets(layout, rest_pos);
    if (op.rows() != on_off.size())
        throw ArgumentError("embed_on_factors: operator dim mismatch");
    CMatrix out(layout.total_dim(), layout.total_dim());
    for (std::size_t r = 0; r < on_off.size(); ++r)
        for (std::size_t c = 0; c < on_off.size(); ++c) {
            const cplx v = op(r, c);
            if (v == cplx(0.0, 0.0)) continue;
            for (const auto t : rest_off) out(on_off[r] + t, on_off[c] + t) = v;
        }
    return out;
}

// random Choi operator of a channel over the given input/output factors,
// with the stated Kraus rank: Ginibre rho, then congruence by
// (Tr_O rho)^{-1/2} on the inputs
inline CMatrix random_channel_choi(const SpaceLayout& layout,
                                   const std::vector<std::string>& inputs,
                                   const std::vector<std::string>& outputs, std::size_t kraus_rank,
                                   Rng& rng) {
    const std::size_t d = layout.total_dim();
    std::set<std::string> out_set(outputs.begin(), outputs.end());
    CMatrix g = rng.ginibre(d, kraus_rank);
    CMatrix rho = (g * g.dagger()).hermitized();
    CMatrix s = partial_trace(rho, layout, out_set);
    CMatrix s_isqrt = psd_pow(s, -0.5);
    CMatrix a = embed_on_factors(s_isqrt, layout, detail::as_set(inputs));
    return (a * rho * a).hermitized();
}

// random normalized valid object of the set (trace = gamma, P-fixed, PSD);
// combs are assembled from random memory channels, tooth by tooth
inline CMatrix random_object(const QuantumObjectSet& set, std::size_t max_rank, Rng& rng) {
    switch (set.projector.kind) {
        case ObjectKind::state: {
            const std::size_t d = set.dim();
            const std::size_t r = std::min<std::size_t>(std::max<std::size_t>(max_rank, 1), d);
            CMatrix g = rng.ginibre(d, r);
            CMatrix rho = (g * g.dagger()).hermitized();
            return rho * cplx(set.gamma / rho.trace().real(), 0.0);
        }
        case ObjectKind::channel: {
            std::size_t d_in = 1;
            for (const auto& l : set.projector.inputs) d_in *= set.layout.dim_of(l);
            const std::size_t r =
                std::min<std::size_t>(std::max<std::size_t>(max_rank, d_in), set.dim());
            return random_channel_choi(set.layout, set.projector.inputs, set.projector.outputs, r,
                                       rng);
        }
        case ObjectKind::comb: {
            const auto& teeth = set.projector.teeth;
            // tooth j: channel (mem_{j-1}, I_j) -> (O_j, mem_j), memories
            // contracted away; first/last memory trivial
            LabeledMatrix acc{CMatrix::identity(1), SpaceLayout(std::vector<Factor>{})};
            std::size_t prev_mem_dim = 1;
            std::string prev_mem;
            for (std::size_t j = 0; j < teeth.size(); ++j) {
                const auto& [in_l, out_l] = teeth[j];
                const std::size_t mem_dim = (j + 1 == teeth.size()) ? 1 : 2;
                const std::string mem = "__mem" + std::to_string(j);
                std::vector<Factor> fs;
                std::vector<std::string> t_in{in_l}, t_out{out_l};
                if (prev_mem_dim > 1) {
                    fs.push_back(Factor{prev_mem, prev_mem_dim, Role::input});
                    t_in.push_back(prev_mem);
                }
                fs.push_back(Factor{in_l, set.layout.dim_of(in_l), Role::input});
                fs.push_back(Factor{out_l, set.layout.dim_of(out_l), Role::output});
                if (mem_dim > 1) {
                    fs.push_back(Factor{mem, mem_dim, Role::output});
                    t_out.push_back(mem);
                }
                SpaceLayout tl(fs);
                const std::size_t d_in_t = tl.total_dim() /
                                           (set.layout.dim_of(out_l) * mem_dim);
                CMatrix tooth = random_channel_choi(tl, t_in, t_out, d_in_t * 2, rng);
                std::set<std::string> shared;
                if (prev_mem_dim > 1) shared.insert(prev_mem);
                acc = link_product(acc.m, acc.layout, tooth, tl, shared);
                prev_mem_dim = mem_dim;
                prev_mem = mem;
            }
            return acc.m.hermitized();
        }
        case ObjectKind::extended:
            throw ArgumentError("random_object: sample the base set and purify instead");
    }
    throw ArgumentError("random_object: unknown kind");
}

// purification of a normalized object into an aux_dim ancilla (prepended),
// with a Haar twist on the ancilla so the output is a generic purification
inline CMatrix purify_object_vector(const CMatrix& obj, std::size_t aux_dim, Rng* twist_rng) {
    const auto eig = eig_hermitian(obj.hermitized());
    const double lmax = std::max(eig.values.back(), 0.0);
    const double tau = kKernelTauFactor * lmax;
    std::vector<std::size_t> kept;
    for (std::size_t k = eig.values.size(); k-- > 0;)
        if (eig.values[k] > tau) kept.push_back(k);
    if (kept.size() > aux_dim)
        throw ArgumentError("purification ancilla dim " + std::to_string(aux_dim) +
                            " below object rank " + std::to_string(kept.size()));
    const std::size_t d = obj.rows();
    CMatrix omega(aux_dim * d, 1);
    for (std::size_t slot = 0; slot < kept.size(); ++slot) {
        const std::size_t k = kept[slot];
        const double w = std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < d; ++i) omega[slot * d + i] = w * eig.vectors(i, k);
    }
    if (twist_rng && aux_dim > 1) {
        CMatrix u = twist_rng->haar_unitary(aux_dim);
        SpaceLayout l({Factor{"A", aux_dim, Role::auxiliary}, Factor{"H", d, Role::wire}});
        omega = apply_factor_op(omega, l, "A", u);
    }
    return omega;
}

// member reconstruction Tr_A[(M ⊗ 1)|omega><omega|] with the ancilla as the
// first (slowest) factor of omega
inline CMatrix compress_with_povm(const CMatrix& omega, std::size_t aux_dim, const CMatrix& m) {
    const std::size_t d = omega.rows() / aux_dim;
    CMatrix out(d, d);
    for (std::size_t al = 0; al < aux_dim; ++al)
        for (std::size_t ar = 0; ar < aux_dim; ++ar) {
            const cplx w = m(al, ar);
            if (w == cplx(0.0, 0.0)) continue;
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c)
                    out(r, c) += w * omega[ar * d + r] * std::conj(omega[al * d + c]);
        }
    return out.hermitized();
}

// Seeded generator of guaranteed-non-signalling assemblages: a random pure
// fixed point of the extended set measured by random POVMs on the ancilla.
// Completeness of the POVMs forces equal per-setting sums by construction.
inline Assemblage random_non_signalling(const QuantumObjectSet& set, std::size_t n_settings,
                                        std::size_t n_outcomes, std::size_t aux_dim,
                                        std::uint64_t seed) {
    if (aux_dim == 0) throw ArgumentError("random_non_signalling: aux_dim must be >= 1");
    Rng rng(seed);
    CMatrix obj = random_object(set, aux_dim, rng);
    CMatrix omega = purify_object_vector(obj, aux_dim, &rng);

    Assemblage out;
    out.set = set;
    for (std::size_t x = 0; x < n_settings; ++x) {
        out.settings.push_back(std::to_string(x));
        std::vector<std::string> labels;
        std::vector<CMatrix> row;
        auto povm = random_povm(aux_dim, n_outcomes, rng);
        for (std::size_t a = 0; a < n_outcomes; ++a) {
            labels.push_back(std::to_string(a));
            row.push_back(compress_with_povm(omega, aux_dim, povm[a]));
        }
        out.outcomes.push_back(std::move(labels));
        out.members.push_back(std::move(row));
    }
    return out;
}

// measurement family as an assemblage: members are transposed POVM
// elements, the object set is the measure type (channel with no outputs)
inline Assemblage povm_assemblage(const std::vector<std::vector<CMatrix>>& povms,
                                  const std::string& wire_label, std::size_t dim) {
    SpaceLayout layout = SpaceLayout::single(wire_label, dim, Role::input);
    Assemblage out;
    out.set = channel_set(layout, {wire_label}, {});
    for (std::size_t x = 0; x < povms.size(); ++x) {
        out.settings.push_back(std::to_string(x));
        std::vector<std::string> labels;
        std::vector<CMatrix> row;
        for (std::size_t a = 0; a < povms[x].size(); ++a) {
            labels.push_back(std::to_string(a));
            row.push_back(povms[x][a].transpose());
        }
        out.outcomes.push_back(std::move(labels));
        out.members.push_back(std::move(row));
    }
    return out;
}

}  // namespace purikit
