// Copyright 2026 The fluxgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fluxgate/context.hpp"

namespace fluxgate {

namespace {

CrossingSet checked_crossings(const DeviceParams& params) {
  params.validate();
  CrossingSet set = find_crossings(params);
  if (!set.at("A2").found) throw DomainError("no |2,0>/|1,1> avoided crossing below phi = 1");
  return set;
}

}  // namespace

ModelContext::ModelContext(const DeviceParams& params, std::size_t steps)
    : params_(params),
      crossings_(checked_crossings(params)),
      spectrum_(track_spectrum(params, crossings_.at("A2").phi, steps)) {}

}  // namespace fluxgate
