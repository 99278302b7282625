#pragma once
#include <cstddef>
#include <functional>

namespace landau {

/// Worker count: hardware concurrency capped by LANDAU_THREADS.
int worker_count();

/// Runs fn(i) for i in [0,n) on up to worker_count() threads. Each index
/// must write only to its own output slot; results are therefore independent
/// of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Pins the BLAS backend to the configured worker count and runs blas_self_check (call once at startup).
void configure_blas_threads();

/// OpenBLAS picks its kernel at load time, and on some AVX-512 hosts the
/// autodetected one returns wrong dgemm results for n >= ~200. When
/// OPENBLAS_CORETYPE is unset on such a host this sets it and re-executes the
/// process image; otherwise it returns. Call first thing in main.
void select_blas_kernel(char** argv);

/// Compares a 256x256 dgemm against a plain triple loop; throws NumericalFailure on mismatch.
void blas_self_check();

}  // namespace landau
