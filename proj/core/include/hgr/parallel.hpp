#pragma once

namespace hgr {

/// Number of worker threads used by pointwise kernels. Reads the THREADS
/// environment variable once; unset or invalid means "runtime default".
int thread_count();

/// Override the worker count (values < 1 restore the default).
void set_thread_count(int threads);

}  // namespace hgr
