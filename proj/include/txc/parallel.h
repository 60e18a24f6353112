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

#ifndef TXC_PARALLEL_H_
#define TXC_PARALLEL_H_

namespace txc {

// Team size for every OpenMP kernel in the library. Defaults to 1; results
// never depend on it. No-op in builds without OpenMP.
void SetNumThreads(int threads);
int NumThreads();

}  // namespace txc

#endif  // TXC_PARALLEL_H_
