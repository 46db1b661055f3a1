#pragma once

namespace stg {

// Caps the OpenMP worker count; n <= 0 keeps the current setting.
void set_num_threads(int n);
int max_threads();

} // namespace stg
