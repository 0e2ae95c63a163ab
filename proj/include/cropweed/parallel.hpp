#pragma once

namespace cropweed {

/// Sets the OpenMP team size used by every parallel kernel. n < 1 restores the runtime default.
void set_thread_count(int n);

/// Current maximum OpenMP team size.
[[nodiscard]] int thread_count();

}  // namespace cropweed
