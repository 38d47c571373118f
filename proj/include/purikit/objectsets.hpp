#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "purikit/linalg.hpp"

namespace purikit {

enum class ObjectKind { state, channel, comb, extended };

// Which linear subspace the structural-consistency projector P fixes.
//   state    — P = identity (all operators)
//   channel  — Choi operators proportional to channels input->output
//   comb     — k-tooth causal combs over the wire sequence (I1,O1,...,Ik,Ok)
//   extended — base type with an unconstrained auxiliary output prepended
struct ProjectorSpec {
    ObjectKind kind = ObjectKind::state;
    std::vector<std::string> inputs;   // channel
    std::vector<std::string> outputs;  // channel (may be empty: measure-type, d_O = 1)
    std::vector<std::pair<std::string, std::string>> teeth;  // comb
    std::shared_ptr<ProjectorSpec> base;                     // extended
    std::string aux_label;                                   // extended

    static ProjectorSpec state() { return ProjectorSpec{}; }

    static ProjectorSpec channel(std::vector<std::string> in, std::vector<std::string> out) {
        ProjectorSpec p;
        p.kind = ObjectKind::channel;
        p.inputs = std::move(in);
        p.outputs = std::move(out);
        return p;
    }

    static ProjectorSpec comb(std::vector<std::pair<std::string, std::string>> teeth) {
        ProjectorSpec p;
        p.kind = ObjectKind::comb;
        p.teeth = std::move(teeth);
        return p;
    }

    static ProjectorSpec extended(const ProjectorSpec& base, std::string aux_label) {
        ProjectorSpec p;
        p.kind = ObjectKind::extended;
        p.base = std::make_shared<ProjectorSpec>(base);
        p.aux_label = std::move(aux_label);
        return p;
    }
};

// A quantum object set per the Choi-picture definition: operators that are
// PSD, fixed points of the projector, and trace-bounded by gamma.
struct QuantumObjectSet {
    SpaceLayout layout;
    double gamma = 1.0;
    ProjectorSpec projector;

    std::size_t dim() const { return layout.total_dim(); }
};

namespace detail {

inline std::set<std::string> as_set(const std::vector<std::string>& v) {
    return std::set<std::string>(v.begin(), v.end());
}

// comb projector by recursion on the causality conditions
// Tr_{O_k}[C] = 1_{I_k} ⊗ C^{(k-1)}:
//   P_k = id - D_{O_k} + D_{I_k O_k} ∘ P_{k-1},   P_0 = id,
// with D_S the depolarize-factors projection. All terms commute, so P_k is
// an orthogonal projection; k = 1 is exactly the channel formula.
inline CMatrix comb_project(const CMatrix& x, const SpaceLayout& layout,
                            const std::vector<std::pair<std::string, std::string>>& teeth,
                            std::size_t k) {
    if (k == 0) return x;
    const auto& [in_k, out_k] = teeth[k - 1];
    CMatrix d_out = depolarize_factors(x, layout, {out_k});
    CMatrix d_both = depolarize_factors(x, layout, {in_k, out_k});
    return x - d_out + comb_project(d_both, layout, teeth, k - 1);
}

}  // namespace detail

// P(x): orthogonal projection onto the set's structural subspace.
inline CMatrix project(const QuantumObjectSet& set, const CMatrix& x) {
    if (!x.is_square() || x.rows() != set.dim())
        throw ArgumentError("project: matrix dim " + std::to_string(x.rows()) +
                            " does not match set dim " + std::to_string(set.dim()));
    switch (set.projector.kind) {
        case ObjectKind::state:
            return x;
        case ObjectKind::channel: {
            // x - Tr_O[x] ⊗ 1_O/d_O + Tr_IO[x] 1_IO/(d_I d_O)
            const auto outs = detail::as_set(set.projector.outputs);
            auto ins = detail::as_set(set.projector.inputs);
            if (outs.empty()) return depolarize_factors(x, set.layout, ins);
            CMatrix d_out = depolarize_factors(x, set.layout, outs);
            std::set<std::string> both = outs;
            both.insert(ins.begin(), ins.end());
            return x - d_out + depolarize_factors(x, set.layout, both);
        }
        case ObjectKind::comb:
            return detail::comb_project(x, set.layout, set.projector.teeth,
                                        set.projector.teeth.size());
        case ObjectKind::extended: {
            // P'(W) = W + 1_A ⊗ [P(Tr_A W) - Tr_A W] / d_A
            const std::string& aux = set.projector.aux_label;
            const std::size_t d_aux = set.layout.dim_of(aux);
            CMatrix t = partial_trace(x, set.layout, {aux});
            QuantumObjectSet base_set{set.layout.without({aux}), set.gamma, *set.projector.base};
            CMatrix delta = project(base_set, t) - t;
            if (delta.norm_inf() == 0.0) return x;
            // aux is the first factor by construction of extend_set
            if (set.layout.factor(0).label != aux)
                throw ArgumentError("project: extended aux factor must come first");
            return x + tensor(CMatrix::identity(d_aux), delta) * cplx(1.0 / double(d_aux), 0.0);
        }
    }
    throw ArgumentError("project: unknown kind");
}

struct ValidityReport {
    bool psd_ok = false;
    bool projector_ok = false;
    bool trace_ok = false;
    double min_eigenvalue = 0.0;
    double projector_deviation = 0.0;  // ||P(x) - x||_inf
    double trace_value = 0.0;
    bool valid() const { return psd_ok && projector_ok && trace_ok; }
};

// Membership test for a single object: PSD, structural consistency,
// sub-normalization. Report-style, never throws on failure.
inline ValidityReport is_valid_object(const QuantumObjectSet& set, const CMatrix& x, double tol) {
    ValidityReport r;
    r.min_eigenvalue = min_eigenvalue(x.hermitized());
    r.psd_ok = r.min_eigenvalue >= -tol;
    r.projector_deviation = max_abs_diff(project(set, x), x);
    r.projector_ok = r.projector_deviation <= tol;
    r.trace_value = x.trace().real();
    r.trace_ok = r.trace_value <= set.gamma + tol;
    return r;
}

// The extended set of Theorem A3: auxiliary factor prepended, same gamma,
// projector P' acting trivially on the new output.
inline QuantumObjectSet extend_set(const QuantumObjectSet& set, std::size_t aux_dim,
                                   std::string aux_label = "") {
    if (aux_dim == 0) throw ArgumentError("extend_set: aux_dim must be >= 1");
    if (aux_label.empty()) {
        aux_label = "aux";
        int k = 0;
        while (set.layout.has(aux_label)) aux_label = "aux" + std::to_string(k++);
    }
    check_capacity(set.dim() * aux_dim, "extend_set");
    QuantumObjectSet out;
    out.layout = set.layout.prepended(Factor{aux_label, aux_dim, Role::auxiliary});
    out.gamma = set.gamma;
    out.projector = ProjectorSpec::extended(set.projector, aux_label);
    return out;
}

// Built-in sets. gamma defaults: state 1, channel d_I, comb prod of d_{I_j}.
inline QuantumObjectSet state_set(const SpaceLayout& layout) {
    return QuantumObjectSet{layout, 1.0, ProjectorSpec::state()};
}

inline QuantumObjectSet channel_set(const SpaceLayout& layout, std::vector<std::string> inputs,
                                    std::vector<std::string> outputs) {
    double gamma = 1.0;
    for (const auto& l : inputs) gamma *= double(layout.dim_of(l));
    for (const auto& l : outputs) layout.dim_of(l);  // existence check
    return QuantumObjectSet{layout, gamma, ProjectorSpec::channel(std::move(inputs), std::move(outputs))};
}

inline QuantumObjectSet comb_set(const SpaceLayout& layout,
                                 std::vector<std::pair<std::string, std::string>> teeth) {
    double gamma = 1.0;
    for (const auto& [in, out] : teeth) {
        gamma *= double(layout.dim_of(in));
        layout.dim_of(out);
    }
    return QuantumObjectSet{layout, gamma, ProjectorSpec::comb(std::move(teeth))};
}

}  // namespace purikit
