/*
 * Copyright 2026 The alab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Runs every acceptance criterion; exits 3 if any fails.
//
//   alab_acceptance [criterion ...]

#include <cstdlib>
#include <iostream>
#include <vector>

#include "acceptance/criteria.hpp"

#ifndef ALAB_CLI_PATH
#define ALAB_CLI_PATH "alab"
#endif

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto results = alab::acceptance::run_all(ALAB_CLI_PATH, only, std::cout);
  for (const auto& r : results)
    if (!r.passed) return alab::acceptance::kExitAcceptance;
  return 0;
}
