#pragma once

namespace sfl {

/// Worker thread cap: SFL_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int max_threads();

}  // namespace sfl
