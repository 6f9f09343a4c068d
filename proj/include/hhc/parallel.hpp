#pragma once

namespace hhc {

// Number of threads the parallel kernels will use.
int thread_count();

// Applies the HHC_THREADS cap (if set) to the OpenMP runtime.
// Called once from the tool mains; harmless to call repeatedly.
void apply_thread_cap();

}  // namespace hhc
