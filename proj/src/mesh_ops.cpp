#include "fkac/mesh_ops.hpp"

#include <algorithm>
#include <cmath>

namespace fkac {

bool in_vh(const GridFn& u) {
    return u.v.front() == Complex{} && u.v.back() == Complex{};
}

std::vector<Complex> delta_x(const GridFn& u) {
    const int M = u.grid.M;
    const double inv_h = 1.0 / u.grid.h;
    std::vector<Complex> d(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        d[static_cast<std::size_t>(j)] = (u.v[static_cast<std::size_t>(j) + 1] - u.v[static_cast<std::size_t>(j)]) * inv_h;
    }
    return d;
}

std::vector<Complex> delta_x2(const GridFn& u) {
    const int M = u.grid.M;
    const double inv_h2 = 1.0 / (u.grid.h * u.grid.h);
    std::vector<Complex> d(static_cast<std::size_t>(M) - 1);
    for (int i = 1; i < M; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        d[s - 1] = (u.v[s + 1] - 2.0 * u.v[s] + u.v[s - 1]) * inv_h2;
    }
    return d;
}

GridFn compact_apply(const GridFn& u) {
    GridFn out = u;
    for (int i = 1; i < u.grid.M; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        out.v[s] = (u.v[s + 1] + 10.0 * u.v[s] + u.v[s - 1]) / 12.0;
    }
    return out;
}

Complex inner_product(const GridFn& u, const GridFn& v) {
    if (!u.grid.same_as(v.grid)) {
        throw std::invalid_argument("inner_product: mismatched grids");
    }
    if (!in_vh(u) || !in_vh(v)) {
        throw std::invalid_argument("inner_product: arguments must vanish on the boundary");
    }
    const double h = u.grid.h;
    const auto du = delta_x(u);
    const auto dv = delta_x(v);
    Complex grad_part{};
    for (std::size_t j = 0; j < du.size(); ++j) {
        grad_part += du[j] * std::conj(dv[j]);
    }
    const auto d2u = delta_x2(u);
    const auto d2v = delta_x2(v);
    Complex lap_part{};
    for (std::size_t j = 0; j < d2u.size(); ++j) {
        lap_part += d2u[j] * std::conj(d2v[j]);
    }
    return h * grad_part - (h * h / 12.0) * h * lap_part;
}

GridNorms norms(const GridFn& u) {
    const double h = u.grid.h;
    GridNorms n{0.0, 0.0, 0.0, 0.0};
    double l2 = 0.0;
    for (int i = 1; i < u.grid.M; ++i) {
        const double m = std::abs(u.v[static_cast<std::size_t>(i)]);
        n.inf = std::max(n.inf, m);
        l2 += m * m;
    }
    n.l2 = std::sqrt(h * l2);
    double grad = 0.0;
    for (const Complex& d : delta_x(u)) {
        grad += std::norm(d);
    }
    n.grad = std::sqrt(h * grad);
    double lap = 0.0;
    for (const Complex& d : delta_x2(u)) {
        lap += std::norm(d);
    }
    n.lap = std::sqrt(h * lap);
    return n;
}

}  // namespace fkac
