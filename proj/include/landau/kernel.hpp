#pragma once
// Landau kernel Phi(p,q), the one-sided difference stencils and the
// precomputed kernel table used by all collision evaluations.

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "landau/phase_space.hpp"

namespace landau {

struct KernelValue {
    double lambda = 0.0;
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d phi = Eigen::Matrix3d::Zero();
};

/// Lambda = rho^2 (rho^2-1)^{-3/2}, S = (rho^2-1) I - (p-q)(p-q)^T + (rho-1)(p q^T + q p^T),
/// Phi = Lambda S / (p0 q0), rho = -p^mu q_mu. With eta > 0 only Lambda is regularized
/// (g -> g + eta^2) so the null direction q^-p^ stays exact. Throws std::domain_error
/// when g = rho^2 - 1 <= eta^2 (in particular p = q).
KernelValue kernel_phi(const Vec3& p, const Vec3& q, double eta = 0.0);

/// One family of first-order one-sided differences on the momentum lattice.
/// sign=+1: forward differences (backward on the last layer); sign=-1: the mirror image.
/// div() is minus the weighted adjoint of grad(), so sum_a w_a psi_a div(F)_a = -sum_a w_a grad(psi)_a . F_a.
class Stencil {
public:
    struct Row {
        std::size_t c0, c1;
        double v0, v1;
    };

    Stencil(const MomentumGrid& grid, int sign);
    int sign() const { return sign_; }
    Row row(std::size_t a, int axis) const;

    /// out holds 3 consecutive arrays of size Np (component-major)
    void grad(const double* psi, double* out) const;
    /// F holds 3 consecutive arrays; out = -W^{-1} sum_k D_k^T (W F_k)
    void div(const double* F, double* out) const;
    /// D p0, component-major 3*Np
    const std::vector<double>& dp0() const { return dp0_; }

private:
    const MomentumGrid* grid_;
    int sign_;
    std::vector<double> dp0_;
};

enum class KernelMode { Projected, Plain };

struct KernelOptions {
    double eta_reg = 1e-3;  // regularization length in units of the momentum spacing
    KernelMode mode = KernelMode::Projected;
    std::string cache_dir;           // empty: no disk cache
    double memory_limit_gb = 2.5;    // larger tables are streamed instead of stored
};

/// Symmetric 3x3-block kernel per stencil family, stored as six Np x Np
/// symmetric matrices (components 00,01,02,11,12,22). In Projected mode the
/// family-s block is Pi Phi Pi with Pi the projector off Dp0(p) - Dp0(q).
class KernelTable {
public:
    struct Job {
        int block;         // 0..5
        const double* z;   // Np x ncols, column-major
        double* y;         // Np x ncols, column-major
        double beta;       // y = B z + beta y
    };

    KernelTable(const MomentumGrid& grid, const std::array<const Stencil*, 2>& stencils, const KernelOptions& opt);

    const KernelOptions& options() const { return opt_; }
    bool stored() const { return stored_; }
    double eta() const { return eta_; }

    /// Kernel of family s for the pair (a,b); zero on the diagonal.
    Eigen::Matrix3d entry(int family, std::size_t a, std::size_t b) const;

    /// Runs all products for one family.
    void multiply(int family, const std::vector<Job>& jobs, int ncols) const;

    /// Identifier of the geometry the table was built for.
    std::string geometry_key() const;

    static int block_index(int k, int l);

    /// Raw Np x Np block (symmetric); nullptr when the table is streamed.
    const double* block_data(int family, int blk) const {
        return stored_ ? blocks_[nfam_ == 1 ? 0 : family][blk].data() : nullptr;
    }

private:
    void build();
    bool load(const std::string& path);
    void save(const std::string& path) const;
    void compute_rows(int family, std::size_t r0, std::size_t r1, std::array<std::vector<double>, 6>& out) const;
    Eigen::Matrix3d pair_kernel(int family, std::size_t a, std::size_t b) const;

    const MomentumGrid* grid_;
    std::array<const Stencil*, 2> stencils_;
    KernelOptions opt_;
    double eta_ = 0.0;
    bool stored_ = true;
    int nfam_ = 2;  // 1 when both families share the plain kernel
    std::vector<std::array<std::vector<double>, 6>> blocks_;
};

/// kappa(p) = 2^{7/2} pi p0 int_0^pi (1+|p|^2 sin^2 th)^{-3/2} sin th dth, by quadrature.
double kappa(const Vec3& p);

}  // namespace landau
