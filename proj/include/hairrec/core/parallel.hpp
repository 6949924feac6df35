#pragma once

namespace hairrec {

// Thread-count control for the OpenMP kernels. 0 restores the OpenMP
// default. Every parallel kernel in this project writes results at
// per-element indices or combines with order-independent operations
// (min, counts), so output is identical for any thread count.
void set_threads(int n);
int max_threads();

}  // namespace hairrec
