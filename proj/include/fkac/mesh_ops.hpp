#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "fkac/types.hpp"

namespace fkac {

/// Uniform spatial grid on [0, l] with nodes x_i = i*h, i = 0..M.
struct Grid1D {
    double l;
    int M;
    double h;

    Grid1D(double length, int cells) : l(length), M(cells), h(length / cells) {
        if (!(length > 0.0)) {
            throw std::invalid_argument("Grid1D: domain length must be positive");
        }
        if (cells < 2) {
            throw std::invalid_argument("Grid1D: at least 2 cells required");
        }
    }

    double node(int i) const { return h * static_cast<double>(i); }

    bool same_as(const Grid1D& other) const { return M == other.M && l == other.l; }
};

/// Uniform time grid on [0, T] with steps t_n = n*tau, n = 0..N.
struct TimeGrid {
    double T;
    int N;
    double tau;

    TimeGrid(double horizon, int steps) : T(horizon), N(steps), tau(horizon / steps) {
        if (!(horizon > 0.0)) {
            throw std::invalid_argument("TimeGrid: horizon must be positive");
        }
        if (steps < 1) {
            throw std::invalid_argument("TimeGrid: at least 1 step required");
        }
    }

    double node(int n) const { return tau * static_cast<double>(n); }
};

/// Complex-valued grid function on nodes 0..M, boundary nodes included.
struct GridFn {
    Grid1D grid;
    std::vector<Complex> v;

    GridFn(Grid1D g, std::vector<Complex> values) : grid(g), v(std::move(values)) {
        if (static_cast<int>(v.size()) != grid.M + 1) {
            throw std::invalid_argument("GridFn: expected M+1 node values");
        }
    }

    static GridFn zeros(const Grid1D& g) {
        return GridFn(g, std::vector<Complex>(static_cast<std::size_t>(g.M) + 1));
    }

    template <typename F>
    static GridFn sample(const Grid1D& g, F&& f) {
        std::vector<Complex> values(static_cast<std::size_t>(g.M) + 1);
        for (int i = 0; i <= g.M; ++i) {
            values[static_cast<std::size_t>(i)] = f(g.node(i));
        }
        return GridFn(g, std::move(values));
    }
};

/// Membership in the zero-boundary grid function space.
bool in_vh(const GridFn& u);

/// Forward difference at half nodes: entry j (0-based) is (u_{j+1} - u_j)/h, j = 0..M-1.
std::vector<Complex> delta_x(const GridFn& u);

/// Second difference at interior nodes: entry i-1 is (u_{i+1} - 2u_i + u_{i-1})/h^2.
std::vector<Complex> delta_x2(const GridFn& u);

/// Compact averaging stencil: (u_{i-1} + 10u_i + u_{i+1})/12 on the interior,
/// identity on the boundary nodes.
GridFn compact_apply(const GridFn& u);

/// Energy inner product used by the stability analysis; conjugates the second
/// argument. Both arguments must have zero boundary values.
Complex inner_product(const GridFn& u, const GridFn& v);

struct GridNorms {
    double inf;   // max interior modulus
    double l2;    // sqrt(h * sum interior |u_i|^2)
    double grad;  // sqrt(h * sum over half nodes |delta_x u|^2)
    double lap;   // sqrt(h * sum interior |delta_x2 u|^2)
};

GridNorms norms(const GridFn& u);

}  // namespace fkac
