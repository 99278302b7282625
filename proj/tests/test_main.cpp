#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "landau/parallel.hpp"

int main(int argc, char** argv) {
    // the BLAS kernel must be fixed before any test touches dgemm
    landau::select_blas_kernel(argv);
    landau::configure_blas_threads();
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
