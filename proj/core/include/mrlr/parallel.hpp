#pragma once

namespace mrlr {

/// Applies the MRLR_NUM_THREADS environment variable (when set) to the
/// OpenMP runtime and pins Eigen to one thread. Returns the thread count.
int configure_threads();

/// Threads available to parallel regions.
int max_threads();

} // namespace mrlr
