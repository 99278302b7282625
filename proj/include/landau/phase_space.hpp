#pragma once
// Relativistic kinematics and the discrete grids (units c = m = k_B = 1).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace landau {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }

/// p^0 = sqrt(1 + |p|^2)
double energy_of(const Vec3& p);

/// Momentum on the mass shell; p^0 is recomputed on demand, never stored.
struct Momentum {
    Vec3 p{};
    double p0() const { return energy_of(p); }
};

/// -p^0 q^0 + p.q  (<= -1 for on-shell pairs)
double lorentz_inner(const Vec3& p, const Vec3& q);
inline double lorentz_inner(const Momentum& p, const Momentum& q) { return lorentz_inner(p.p, q.p); }

/// rho - 1 where rho = -p^mu q_mu, computed without cancellation near p = q.
double rho_minus_one(const Vec3& p, const Vec3& q);

/// p / p^0
Vec3 p_hat(const Vec3& p);

struct GridParams {
    double radius = 6.0;
    int points_per_axis = 12;
};

/// Uniform tensor lattice on [-R,R]^3 with trapezoid weights.
/// Node a = (i*n + j)*n + k, coordinate of index i is -R + i*h.
class MomentumGrid {
public:
    MomentumGrid() = default;
    MomentumGrid(double radius, int n);

    int n_axis() const { return n_; }
    std::size_t size() const { return nodes_.size(); }
    double radius() const { return radius_; }
    double spacing() const { return h_; }

    const Vec3& p(std::size_t a) const { return nodes_[a]; }
    double p0(std::size_t a) const { return p0_[a]; }
    const Vec3& phat(std::size_t a) const { return phat_[a]; }
    double weight(std::size_t a) const { return w_[a]; }

    const std::vector<Vec3>& nodes() const { return nodes_; }
    const std::vector<double>& p0s() const { return p0_; }
    const std::vector<double>& weights() const { return w_; }

    std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n_ + j) * n_ + k; }
    std::array<int, 3> multi_index(std::size_t a) const;
    /// stride of axis d in the flat index
    std::size_t stride(int d) const { return d == 0 ? std::size_t(n_) * n_ : (d == 1 ? std::size_t(n_) : 1); }

    /// Node-wise product p -> -p maps a to mirror(a).
    std::size_t mirror(std::size_t a) const { return size() - 1 - a; }

private:
    double radius_ = 0.0;
    double h_ = 0.0;
    int n_ = 0;
    std::vector<Vec3> nodes_;
    std::vector<double> p0_;
    std::vector<Vec3> phat_;
    std::vector<double> w_;
};

/// Rejects odd or too small per-axis counts and non-positive radii.
MomentumGrid build_momentum_grid(const GridParams& params);

/// Fixed-order pairwise sum of weight*value.
double integrate_p(std::span<const double> values, const MomentumGrid& grid);

/// Pairwise (cascade) summation with a fixed split order.
double pairwise_sum(std::span<const double> values);

struct SpatialGrid {
    int cells = 32;
    double length = 6.283185307179586;

    SpatialGrid() = default;
    SpatialGrid(int n, double len);
    double h() const { return length / cells; }
    double x(int i) const { return (i + 0.5) * h(); }
    int wrap(int i) const { return ((i % cells) + cells) % cells; }
};

}  // namespace landau
