// Copyright 2026 The txc Authors
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

#ifndef TXC_TESTS_EXPECT_ERROR_H_
#define TXC_TESTS_EXPECT_ERROR_H_

#include <string>

#include <gtest/gtest.h>

#include "txc/error.h"

namespace txc::test {

// Fails unless `f` throws txc::Error whose message contains `needle`.
template <typename F>
void ExpectError(F&& f, const std::string& needle) {
  try {
    f();
    ADD_FAILURE() << "expected Error containing '" << needle << "'";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
        << e.what();
  }
}

}  // namespace txc::test

#endif  // TXC_TESTS_EXPECT_ERROR_H_
