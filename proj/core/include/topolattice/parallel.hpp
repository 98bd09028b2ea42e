#pragma once

#include <functional>

namespace topolattice {

// Process-wide worker budget for grid sweeps. 1 (the default) runs
// everything on the calling thread. The CLI sets this from --threads or the
// TOPOLATTICE_THREADS environment variable.
void set_thread_budget(int n_threads);
int thread_budget();

// Resolution order: explicit request > TOPOLATTICE_THREADS > hardware
// concurrency. Returns at least 1.
int resolve_thread_count(int requested);

// Runs fn(0..n-1) over the budgeted threads with a static block partition.
// Callers own output slots per index, so results are deterministic regardless
// of the budget.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace topolattice
