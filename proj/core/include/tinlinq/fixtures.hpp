#pragma once

// Reference strength matrices used by tests, benchmarks and `--version`.

#include "tinlinq/model.hpp"

namespace tinlinq::fixtures {

/// Three users; region bounds 2, 1, 1.5 | 2.3, 2.4, 1.5 | 2.5.
inline ChannelMatrix fix_a() {
  Eigen::MatrixXd a(3, 3);
  a << 2.0, 0.5, 0.1,
       0.2, 1.0, 0.5,
       1.0, 0.5, 1.5;
  return ChannelMatrix(a);
}

/// Three users, unit direct strengths; C1 everywhere, GNAJ fails for users
/// 0 and 1 (0-based).
inline ChannelMatrix fix_b() {
  Eigen::MatrixXd a(3, 3);
  a << 1.0, 0.3, 0.0,
       0.6, 1.0, 0.1,
       0.8, 0.6, 1.0;
  return ChannelMatrix(a);
}

}  // namespace tinlinq::fixtures
