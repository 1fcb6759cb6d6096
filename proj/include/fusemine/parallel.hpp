#pragma once

namespace fusemine {

// Every OpenMP kernel has a serial reference path. Both produce identical
// results: work items own their seeds and write to preassigned slots.
enum class Execution { Serial, Parallel };

// Thread cap: FUSEMINE_THREADS when set and positive, else the OpenMP default.
int max_threads();

}  // namespace fusemine
