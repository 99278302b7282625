#include "landau/kernel.hpp"

#include <cblas.h>
#include <openssl/evp.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "landau/parallel.hpp"

namespace landau {

KernelValue kernel_phi(const Vec3& p, const Vec3& q, double eta) {
    const double rm1 = rho_minus_one(p, q);
    const double rho = 1.0 + rm1;
    const double g = rm1 * (rho + 1.0);  // rho^2 - 1 without cancellation
    if (!(g > 0.0) || g < eta * eta) throw std::domain_error("kernel_phi: p and q too close (diagonal singularity)");

    KernelValue kv;
    kv.lambda = rho * rho / std::pow(g + eta * eta, 1.5);
    const Eigen::Vector3d pv(p[0], p[1], p[2]), qv(q[0], q[1], q[2]);
    const Eigen::Vector3d d = pv - qv;
    kv.s = g * Eigen::Matrix3d::Identity() - d * d.transpose() + rm1 * (pv * qv.transpose() + qv * pv.transpose());
    kv.phi = kv.s * (kv.lambda / (energy_of(p) * energy_of(q)));
    return kv;
}

// ---------------------------------------------------------------------------

Stencil::Stencil(const MomentumGrid& grid, int sign) : grid_(&grid), sign_(sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("Stencil: sign must be +1 or -1");
    const std::size_t np = grid.size();
    dp0_.assign(3 * np, 0.0);
    grad(grid.p0s().data(), dp0_.data());
}

Stencil::Row Stencil::row(std::size_t a, int axis) const {
    const int n = grid_->n_axis();
    const int i = grid_->multi_index(a)[axis];
    const std::size_t st = grid_->stride(axis);
    const double ih = 1.0 / grid_->spacing();
    bool forward = sign_ > 0 ? (i < n - 1) : (i == 0);
    if (forward) return {a, a + st, -ih, ih};
    return {a - st, a, -ih, ih};
}

void Stencil::grad(const double* psi, double* out) const {
    const std::size_t np = grid_->size();
    const int n = grid_->n_axis();
    const double ih = 1.0 / grid_->spacing();
    for (int d = 0; d < 3; ++d) {
        const std::size_t st = grid_->stride(d);
        double* o = out + d * np;
        for (std::size_t a = 0; a < np; ++a) {
            const int i = static_cast<int>((a / st) % n);
            const bool forward = sign_ > 0 ? (i < n - 1) : (i == 0);
            o[a] = forward ? (psi[a + st] - psi[a]) * ih : (psi[a] - psi[a - st]) * ih;
        }
    }
}

void Stencil::div(const double* F, double* out) const {
    const std::size_t np = grid_->size();
    const int n = grid_->n_axis();
    const double ih = 1.0 / grid_->spacing();
    const auto& w = grid_->weights();
    std::fill(out, out + np, 0.0);
    for (int d = 0; d < 3; ++d) {
        const std::size_t st = grid_->stride(d);
        const double* f = F + d * np;
        for (std::size_t a = 0; a < np; ++a) {
            const int i = static_cast<int>((a / st) % n);
            const bool forward = sign_ > 0 ? (i < n - 1) : (i == 0);
            const double x = w[a] * f[a] * ih;
            // transpose of the difference row, accumulated into the two touched nodes
            if (forward) {
                out[a] += x;
                out[a + st] -= x;
            } else {
                out[a - st] += x;
                out[a] -= x;
            }
        }
    }
    for (std::size_t a = 0; a < np; ++a) out[a] /= w[a];
}

// ---------------------------------------------------------------------------

int KernelTable::block_index(int k, int l) {
    if (k > l) std::swap(k, l);
    static const int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return idx[k][l];
}

KernelTable::KernelTable(const MomentumGrid& grid, const std::array<const Stencil*, 2>& stencils, const KernelOptions& opt)
    : grid_(&grid), stencils_(stencils), opt_(opt) {
    if (!(opt.eta_reg >= 0.0)) throw std::invalid_argument("collision.eta_reg must be >= 0");
    eta_ = opt.eta_reg * grid.spacing();
    nfam_ = opt.mode == KernelMode::Plain ? 1 : 2;
    const double np = static_cast<double>(grid.size());
    const double bytes = nfam_ * 6.0 * np * np * sizeof(double);
    stored_ = bytes <= opt.memory_limit_gb * 1e9;
    if (stored_) build();
}

Eigen::Matrix3d KernelTable::pair_kernel(int family, std::size_t a, std::size_t b) const {
    if (a == b) return Eigen::Matrix3d::Zero();
    Eigen::Matrix3d phi = kernel_phi(grid_->p(a), grid_->p(b), eta_).phi;
    if (opt_.mode == KernelMode::Plain) return phi;
    const auto& dp = stencils_[family]->dp0();
    const std::size_t np = grid_->size();
    const Eigen::Vector3d v(dp[a] - dp[b], dp[np + a] - dp[np + b], dp[2 * np + a] - dp[2 * np + b]);
    const double v2 = v.squaredNorm();
    if (!(v2 > 1e-28)) return phi;
    // Pi Phi Pi with Pi = I - v v^T / |v|^2
    const Eigen::Vector3d y = phi * v;
    const double vy = v.dot(y);
    return phi - (y * v.transpose() + v * y.transpose()) / v2 + (vy / (v2 * v2)) * (v * v.transpose());
}

Eigen::Matrix3d KernelTable::entry(int family, std::size_t a, std::size_t b) const {
    return pair_kernel(nfam_ == 1 ? 0 : family, a, b);
}

void KernelTable::compute_rows(int family, std::size_t r0, std::size_t r1, std::array<std::vector<double>, 6>& out) const {
    // out[blk] holds rows r0..r1-1 stored as columns of an Np x (r1-r0) column-major array
    const std::size_t np = grid_->size();
    const std::size_t nr = r1 - r0;
    for (auto& v : out) v.assign(np * nr, 0.0);
    parallel_for(nr, [&](std::size_t r) {
        const std::size_t a = r0 + r;
        for (std::size_t b = 0; b < np; ++b) {
            if (b == a) continue;
            const Eigen::Matrix3d k = pair_kernel(family, a, b);
            const std::size_t off = r * np + b;
            out[0][off] = k(0, 0);
            out[1][off] = k(0, 1);
            out[2][off] = k(0, 2);
            out[3][off] = k(1, 1);
            out[4][off] = k(1, 2);
            out[5][off] = k(2, 2);
        }
    });
}

std::string KernelTable::geometry_key() const {
    std::ostringstream os;
    os << std::setprecision(17) << "kernel-v1;R=" << grid_->radius() << ";n=" << grid_->n_axis() << ";eta=" << eta_
       << ";mode=" << (opt_.mode == KernelMode::Plain ? "plain" : "projected");
    return os.str();
}

namespace {
std::string sha256_hex(const std::string& s) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}
}  // namespace

void KernelTable::build() {
    std::string path;
    if (!opt_.cache_dir.empty()) {
        path = (std::filesystem::path(opt_.cache_dir) / ("kernel_" + sha256_hex(geometry_key()).substr(0, 16) + ".bin")).string();
        if (load(path)) return;
    }
    const std::size_t np = grid_->size();
    blocks_.resize(nfam_);
    for (int f = 0; f < nfam_; ++f) {
        // symmetric in (a,b): rows are columns too, so the row layout is directly usable
        compute_rows(f, 0, np, blocks_[f]);
    }
    if (!path.empty()) save(path);
}

bool KernelTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    const std::string key = geometry_key();
    std::uint64_t klen = 0;
    in.read(reinterpret_cast<char*>(&klen), sizeof(klen));
    if (!in || klen != key.size()) return false;
    std::string stored(klen, '\0');
    in.read(stored.data(), static_cast<std::streamsize>(klen));
    if (!in || stored != key) return false;
    const std::size_t np = grid_->size();
    std::vector<std::array<std::vector<double>, 6>> blocks(nfam_);
    for (auto& fam : blocks)
        for (auto& b : fam) {
            b.resize(np * np);
            in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
            if (!in) return false;
        }
    blocks_ = std::move(blocks);
    return true;
}

void KernelTable::save(const std::string& path) const {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return;  // cache is best effort
        const std::string key = geometry_key();
        const std::uint64_t klen = key.size();
        out.write(reinterpret_cast<const char*>(&klen), sizeof(klen));
        out.write(key.data(), static_cast<std::streamsize>(klen));
        for (const auto& fam : blocks_)
            for (const auto& b : fam) out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
        if (!out) return;
    }
    std::filesystem::rename(tmp, path);
}

void KernelTable::multiply(int family, const std::vector<Job>& jobs, int ncols) const {
    const int fam = nfam_ == 1 ? 0 : family;
    const int np = static_cast<int>(grid_->size());
    if (stored_) {
        for (const auto& j : jobs)
            cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, np, ncols, np, 1.0, blocks_[fam][j.block].data(), np, j.z, np,
                        j.beta, j.y, np);
        return;
    }
    // streamed: rebuild row chunks on the fly
    const std::size_t chunk = std::max<std::size_t>(64, static_cast<std::size_t>(opt_.memory_limit_gb * 1e9 / (6.0 * 8.0 * np)));
    std::array<std::vector<double>, 6> buf;
    for (std::size_t r0 = 0; r0 < std::size_t(np); r0 += chunk) {
        const std::size_t r1 = std::min<std::size_t>(np, r0 + chunk);
        compute_rows(fam, r0, r1, buf);
        const int nr = static_cast<int>(r1 - r0);
        for (const auto& j : jobs)
            cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, nr, ncols, np, 1.0, buf[j.block].data(), np, j.z, np, j.beta,
                        j.y + r0, np);
    }
}

// ---------------------------------------------------------------------------

double kappa(const Vec3& p) {
    const double a2 = norm2(p);
    auto f = [a2](double th) {
        const double s = std::sin(th);
        return s / std::pow(1.0 + a2 * s * s, 1.5);
    };
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, M_PI, 12, 1e-13);
    return std::pow(2.0, 3.5) * M_PI * energy_of(p) * I;
}

}  // namespace landau
