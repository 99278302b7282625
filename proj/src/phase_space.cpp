#include "landau/phase_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace landau {

double energy_of(const Vec3& p) { return std::sqrt(1.0 + norm2(p)); }

double lorentz_inner(const Vec3& p, const Vec3& q) { return -energy_of(p) * energy_of(q) + dot(p, q); }

double rho_minus_one(const Vec3& p, const Vec3& q) {
    // 2(rho-1) = |p-q|^2 - (p0-q0)^2, with p0-q0 = (|p|^2-|q|^2)/(p0+q0)
    const double p0 = energy_of(p), q0 = energy_of(q);
    const Vec3 d{p[0] - q[0], p[1] - q[1], p[2] - q[2]};
    const double de = (norm2(p) - norm2(q)) / (p0 + q0);
    return 0.5 * (norm2(d) - de * de);
}

Vec3 p_hat(const Vec3& p) {
    const double e = energy_of(p);
    return {p[0] / e, p[1] / e, p[2] / e};
}

MomentumGrid::MomentumGrid(double radius, int n) : radius_(radius), n_(n) {
    h_ = 2.0 * radius / (n - 1);
    const std::size_t np = std::size_t(n) * n * n;
    nodes_.resize(np);
    p0_.resize(np);
    phat_.resize(np);
    w_.resize(np);
    std::vector<double> coord(n), w1(n);
    for (int i = 0; i < n; ++i) {
        // symmetric construction so that coord[n-1-i] == -coord[i] bitwise
        const int m = n - 1 - 2 * i;
        coord[i] = -0.5 * m * h_;
        w1[i] = (i == 0 || i == n - 1) ? 0.5 * h_ : h_;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const std::size_t a = index(i, j, k);
                nodes_[a] = {coord[i], coord[j], coord[k]};
                p0_[a] = energy_of(nodes_[a]);
                phat_[a] = p_hat(nodes_[a]);
                w_[a] = w1[i] * w1[j] * w1[k];
            }
}

std::array<int, 3> MomentumGrid::multi_index(std::size_t a) const {
    const int k = static_cast<int>(a % n_);
    const int j = static_cast<int>((a / n_) % n_);
    const int i = static_cast<int>(a / (std::size_t(n_) * n_));
    return {i, j, k};
}

MomentumGrid build_momentum_grid(const GridParams& params) {
    if (!(params.radius > 0.0)) throw std::invalid_argument("momentum radius must be positive");
    if (params.points_per_axis % 2 != 0)
        throw std::invalid_argument("points_per_axis must be even (odd counts put a node at p=0 and break the stencil symmetry), got " +
                                    std::to_string(params.points_per_axis));
    if (params.points_per_axis < 4) throw std::invalid_argument("points_per_axis must be >= 4");
    return MomentumGrid(params.radius, params.points_per_axis);
}

namespace {
double cascade(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return cascade(v, half) + cascade(v + half, n - half);
}
}  // namespace

double pairwise_sum(std::span<const double> values) { return cascade(values.data(), values.size()); }

double integrate_p(std::span<const double> values, const MomentumGrid& grid) {
    if (values.size() != grid.size())
        throw std::invalid_argument("integrate_p: length mismatch (" + std::to_string(values.size()) + " vs " +
                                    std::to_string(grid.size()) + ")");
    std::vector<double> prod(values.size());
    for (std::size_t a = 0; a < values.size(); ++a) prod[a] = grid.weight(a) * values[a];
    return pairwise_sum(prod);
}

SpatialGrid::SpatialGrid(int n, double len) : cells(n), length(len) {
    if (n < 4) throw std::invalid_argument("space.cells must be >= 4");
    if (!(len > 0.0)) throw std::invalid_argument("space.length must be positive");
}

}  // namespace landau
