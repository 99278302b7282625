#include "landau/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cblas.h>
#include <unistd.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "landau/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace landau {

int worker_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("LANDAU_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, cap);
        } catch (...) {
        }
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = static_cast<int>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
                next = n;
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void configure_blas_threads() {
    openblas_set_num_threads(worker_count());
    blas_self_check();
}

void select_blas_kernel(char** argv) {
    if (std::getenv("OPENBLAS_CORETYPE")) return;
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    bool avx512 = false;
    while (std::getline(in, line))
        if (line.rfind("flags", 0) == 0) {
            avx512 = line.find(" avx512f") != std::string::npos;
            break;
        }
    if (!avx512) return;
    // SkylakeX: correct on the affected hosts and the fastest of the ones that are
    setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
    execv("/proc/self/exe", argv);
    // exec failed: carry on, blas_self_check will catch a bad kernel
}

void blas_self_check() {
    const int n = 256;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> A(n * n), B(n * n), C(n * n), D(n * n, 0.0);
    for (auto& x : A) x = u(rng);
    for (auto& x : B) x = u(rng);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, A.data(), n, B.data(), n, 0.0, C.data(), n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) D[j * n + i] += A[k * n + i] * B[j * n + k];
    double err = 0.0;
    for (int i = 0; i < n * n; ++i) err = std::max(err, std::abs(C[i] - D[i]));
    if (!(err < 1e-9))
        throw NumericalFailure("BLAS self-check failed (dgemm error " + std::to_string(err) +
                               "); set OPENBLAS_CORETYPE to a core type that works on this CPU, e.g. Haswell");
}

}  // namespace landau
