#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "purikit/errors.hpp"

namespace purikit {

enum class Role { input, output, auxiliary, wire };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::input: return "input";
        case Role::output: return "output";
        case Role::auxiliary: return "auxiliary";
        case Role::wire: return "wire";
    }
    return "?";
}

struct Factor {
    std::string label;
    std::size_t dim = 1;
    Role role = Role::wire;
};

// Ordered list of labelled tensor factors annotating one matrix dimension.
// The first factor is the slowest-varying index (row-major convention).
class SpaceLayout {
  public:
    SpaceLayout() = default;

    explicit SpaceLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
        std::set<std::string> seen;
        for (const auto& f : factors_) {
            if (f.dim == 0) throw ArgumentError("layout: zero-dimensional factor '" + f.label + "'");
            if (!seen.insert(f.label).second)
                throw ArgumentError("layout: duplicate label '" + f.label + "'");
        }
    }

    static SpaceLayout single(const std::string& label, std::size_t dim, Role role = Role::wire) {
        return SpaceLayout({Factor{label, dim, role}});
    }

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t count() const { return factors_.size(); }
    const Factor& factor(std::size_t i) const { return factors_[i]; }

    std::size_t total_dim() const {
        std::size_t d = 1;
        for (const auto& f : factors_) d *= f.dim;
        return d;
    }

    bool has(const std::string& label) const {
        for (const auto& f : factors_)
            if (f.label == label) return true;
        return false;
    }

    std::size_t position(const std::string& label) const {
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].label == label) return i;
        throw ArgumentError("layout: unknown label '" + label + "'");
    }

    std::size_t dim_of(const std::string& label) const { return factors_[position(label)].dim; }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(factors_.size());
        for (const auto& f : factors_) out.push_back(f.label);
        return out;
    }

    std::vector<std::string> labels_with_role(Role r) const {
        std::vector<std::string> out;
        for (const auto& f : factors_)
            if (f.role == r) out.push_back(f.label);
        return out;
    }

    // strides of each factor in the flattened index
    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(factors_.size(), 1);
        for (std::size_t i = factors_.size(); i-- > 1;) s[i - 1] = s[i] * factors_[i].dim;
        return s;
    }

    SpaceLayout without(const std::set<std::string>& labels) const {
        std::vector<Factor> kept;
        for (const auto& f : factors_)
            if (!labels.count(f.label)) kept.push_back(f);
        return SpaceLayout(std::move(kept));
    }

    SpaceLayout keep_only(const std::set<std::string>& labels) const {
        std::vector<Factor> kept;
        for (const auto& f : factors_)
            if (labels.count(f.label)) kept.push_back(f);
        return SpaceLayout(std::move(kept));
    }

    SpaceLayout prepended(const Factor& f) const {
        std::vector<Factor> fs;
        fs.reserve(factors_.size() + 1);
        fs.push_back(f);
        fs.insert(fs.end(), factors_.begin(), factors_.end());
        return SpaceLayout(std::move(fs));
    }

    SpaceLayout concat(const SpaceLayout& other) const {
        std::vector<Factor> fs = factors_;
        fs.insert(fs.end(), other.factors_.begin(), other.factors_.end());
        return SpaceLayout(std::move(fs));
    }

    SpaceLayout relabeled(const std::string& old_label, const std::string& new_label) const {
        std::vector<Factor> fs = factors_;
        fs[position(old_label)].label = new_label;
        return SpaceLayout(std::move(fs));
    }

    bool operator==(const SpaceLayout& o) const {
        if (factors_.size() != o.factors_.size()) return false;
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].label != o.factors_[i].label || factors_[i].dim != o.factors_[i].dim ||
                factors_[i].role != o.factors_[i].role)
                return false;
        return true;
    }

  private:
    std::vector<Factor> factors_;
};

// Flat offsets of every multi-index over the factors at `positions`,
// enumerated row-major in the order given. offsets[k] is the contribution
// of the k-th multi-index to the flattened matrix index.
inline std::vector<std::size_t> group_offsets(const SpaceLayout& layout,
                                              const std::vector<std::size_t>& positions) {
    const auto strides = layout.strides();
    std::size_t n = 1;
    for (auto p : positions) n *= layout.factor(p).dim;
    std::vector<std::size_t> offsets(n, 0);
    std::size_t block = n;
    for (auto p : positions) {
        const std::size_t dim = layout.factor(p).dim;
        block /= dim;
        const std::size_t stride = strides[p];
        for (std::size_t k = 0; k < n; ++k) offsets[k] += ((k / block) % dim) * stride;
    }
    return offsets;
}

inline std::vector<std::size_t> positions_of(const SpaceLayout& layout,
                                             const std::set<std::string>& labels,
                                             bool complement = false) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < layout.count(); ++i) {
        const bool in = labels.count(layout.factor(i).label) > 0;
        if (in != complement) out.push_back(i);
    }
    return out;
}

}  // namespace purikit
