// Copyright 2026 The qratchet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>

namespace qratchet::detail {

// Symmetric fourth-order composition
//   A(a0) B(b0) A(a1) B(b1) A(a2) B(b2) A(a3)
// with b = (w1, w0, w1), w1 = 1 / (2 - 2^(1/3)), w0 = 1 - 2 w1.
struct Composition {
  double a[4];
  double b[3];
};

inline Composition fourth_order_composition() {
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = 1.0 - 2.0 * w1;
  return {{0.5 * w1, 0.5 * (w1 + w0), 0.5 * (w1 + w0), 0.5 * w1}, {w1, w0, w1}};
}

}  // namespace qratchet::detail
