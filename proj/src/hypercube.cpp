#include "hclab/hypercube.hpp"

#include <bit>

#include "hclab/errors.hpp"

namespace hclab {

int hamming(Vertex u, Vertex v) {
    if (u.dim != v.dim) throw DimensionMismatch("hamming: vertex dims differ");
    return std::popcount(static_cast<unsigned>(u.bits ^ v.bits));
}

int inner_product(Vertex u, Vertex v) {
    return u.dim - 2 * hamming(u, v);
}

static void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
        throw DimensionMismatch("dimension must be in [1," + std::to_string(kMaxDim) + "]");
}

HypercubeDist::HypercubeDist(int dim, std::vector<Rational> mass)
    : dim_(dim), mass_(std::move(mass)) {
    check_dim(dim);
    if (mass_.size() != (std::size_t{1} << dim))
        throw DimensionMismatch("vertex distribution: wrong length");
    Rational total;
    for (const auto& m : mass_) {
        if (m < Rational(0)) throw std::domain_error("vertex distribution: negative mass");
        total += m;
    }
    if (total != Rational(1)) throw std::domain_error("vertex distribution: masses must sum to 1");
}

HypercubeDist HypercubeDist::uniform(int dim) {
    check_dim(dim);
    std::size_t n = std::size_t{1} << dim;
    return HypercubeDist(dim, std::vector<Rational>(n, Rational(1, static_cast<std::int64_t>(n))));
}

HypercubeDist HypercubeDist::point_mass(Vertex v) {
    check_dim(v.dim);
    std::vector<Rational> m(std::size_t{1} << v.dim, Rational(0));
    m[v.bits] = Rational(1);
    return HypercubeDist(v.dim, std::move(m));
}

std::vector<double> HypercubeDist::real() const {
    std::vector<double> out(mass_.size());
    for (std::size_t i = 0; i < mass_.size(); ++i) out[i] = mass_[i].to_double();
    return out;
}

HammingDist::HammingDist(int dim, std::vector<Rational> mass)
    : dim_(dim), mass_(std::move(mass)) {
    check_dim(dim);
    if (mass_.size() != static_cast<std::size_t>(dim) + 1)
        throw DimensionMismatch("hamming distribution: length must be d+1");
    Rational total;
    for (const auto& m : mass_) {
        if (m < Rational(0)) throw std::domain_error("hamming distribution: negative mass");
        total += m;
    }
    if (total != Rational(1)) throw std::domain_error("hamming distribution: masses must sum to 1");
}

std::vector<double> HammingDist::real() const {
    std::vector<double> out(mass_.size());
    for (std::size_t i = 0; i < mass_.size(); ++i) out[i] = mass_[i].to_double();
    return out;
}

HammingDist induced_hamming(const HypercubeDist& D) {
    int d = D.dim();
    std::size_t n = D.size();
    std::vector<Rational> out(static_cast<std::size_t>(d) + 1, Rational(0));
    for (std::size_t u = 0; u < n; ++u) {
        if (D.mass(u) == Rational(0)) continue;
        for (std::size_t v = 0; v < n; ++v) {
            if (D.mass(v) == Rational(0)) continue;
            int h = std::popcount(static_cast<unsigned>(u ^ v));
            out[static_cast<std::size_t>(h)] += D.mass(u) * D.mass(v);
        }
    }
    return HammingDist(d, std::move(out));
}

}  // namespace hclab
