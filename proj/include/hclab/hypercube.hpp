#ifndef HCLAB_HYPERCUBE_HPP
#define HCLAB_HYPERCUBE_HPP

#include <cstdint>
#include <vector>

#include "hclab/rational.hpp"

namespace hclab {

inline constexpr int kMaxDim = 16;

// A vertex of {-1,+1}^d packed into a bitmask: bit j set <=> coordinate j is +1.
struct Vertex {
    std::uint16_t bits = 0;
    int dim = 0;
};

int hamming(Vertex u, Vertex v);       // popcount(u.bits ^ v.bits)
int inner_product(Vertex u, Vertex v); // d - 2*hamming

// Probability distribution over the 2^d vertices, exact rational masses.
class HypercubeDist {
public:
    HypercubeDist(int dim, std::vector<Rational> mass);  // validates
    static HypercubeDist uniform(int dim);
    static HypercubeDist point_mass(Vertex v);

    int dim() const { return dim_; }
    std::size_t size() const { return mass_.size(); }
    const Rational& mass(std::size_t v) const { return mass_[v]; }
    const std::vector<Rational>& masses() const { return mass_; }
    std::vector<double> real() const;  // float view

private:
    int dim_;
    std::vector<Rational> mass_;
};

// Distribution over Hamming distances {0,...,d}.
class HammingDist {
public:
    HammingDist(int dim, std::vector<Rational> mass);  // validates (length d+1, sums to 1)
    int dim() const { return dim_; }
    const Rational& mass(std::size_t k) const { return mass_[k]; }
    const std::vector<Rational>& masses() const { return mass_; }
    std::vector<double> real() const;

private:
    int dim_;
    std::vector<Rational> mass_;
};

// Distribution of hamming(y, y') for y, y' i.i.d. ~ D.
HammingDist induced_hamming(const HypercubeDist& D);

}  // namespace hclab

#endif
