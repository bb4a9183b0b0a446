// Copyright 2026 The bellsel Authors
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

// Bell-state measurement on the inner particles of two singlets: each
// outcome leaves the outer pair in the Bell state with the same label.

#include <cstdio>

#include "bellsel/bellsel.hpp"

int main() {
  using namespace bellsel;
  const auto input = tensor(bell_state(BellLabel::C0), bell_state(BellLabel::C0));
  for (const auto& branch : bsm_decompose(input)) {
    const bool same = branch.conditional && equal_up_to_phase(*branch.conditional, bell_state(branch.outcome));
    std::printf("M%zu  p=%.6f  outer pair = C%zu up to phase: %s  CHSH=%+.6f\n", index_of(branch.outcome),
                branch.probability, index_of(branch.outcome), same ? "yes" : "no",
                branch.conditional ? chsh_value(*branch.conditional, AngleConfig{}) : 0.0);
  }
  return 0;
}
