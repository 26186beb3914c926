// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/error.hpp"

namespace colddiff {

void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

}  // namespace colddiff
