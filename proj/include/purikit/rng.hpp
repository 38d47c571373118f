#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "purikit/cmatrix.hpp"

namespace purikit {

// Explicit-seed random source. Never ambient: every sampler receives one.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }
    std::uint64_t next_u64() { return gen_(); }

    cplx cnormal() {
        const double re = normal();
        const double im = normal();
        return cplx(re, im);
    }

    // iid standard complex Gaussian entries
    CMatrix ginibre(std::size_t rows, std::size_t cols) {
        CMatrix g(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) g(i, j) = cnormal();
        return g;
    }

    // Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal
    // phased positive (modified Gram-Schmidt is plenty at these sizes)
    CMatrix haar_unitary(std::size_t n) {
        CMatrix g = ginibre(n, n);
        CMatrix q(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<cplx> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = g(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * col[i];
                for (std::size_t i = 0; i < n; ++i) col[i] -= proj * q(i, k);
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) nrm += std::norm(col[i]);
            nrm = std::sqrt(nrm);
            for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
            // fix the phase so the map is Haar, not QR-convention biased
            cplx rjj = 0.0;
            for (std::size_t i = 0; i < n; ++i) rjj += std::conj(q(i, j)) * g(i, j);
            const cplx ph = rjj / std::abs(rjj);
            for (std::size_t i = 0; i < n; ++i) q(i, j) *= ph;
        }
        return q;
    }

    // random probability vector (flat Dirichlet)
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> w(n);
        double s = 0.0;
        for (auto& x : w) {
            x = -std::log(std::max(uniform(), 1e-300));
            s += x;
        }
        for (auto& x : w) x /= s;
        return w;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// n-outcome POVM on dimension d from a Haar isometry: take d columns of a
// Haar unitary on d*n, split the rows into n blocks V_a, set M_a = V_a† V_a.
inline std::vector<CMatrix> random_povm(std::size_t dim, std::size_t n_outcomes, Rng& rng) {
    if (n_outcomes == 1) return {CMatrix::identity(dim)};
    const std::size_t big = dim * n_outcomes;
    CMatrix u = rng.haar_unitary(big);
    std::vector<CMatrix> povm;
    povm.reserve(n_outcomes);
    for (std::size_t a = 0; a < n_outcomes; ++a) {
        CMatrix block(dim, dim);  // rows a*dim..a*dim+dim-1, first dim columns
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) block(i, j) = u(a * dim + i, j);
        povm.push_back((block.dagger() * block).hermitized());
    }
    return povm;
}

}  // namespace purikit
