// Copyright 2026 The compass-coherence Authors
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

#ifndef COMPASS_ERRORS_H
#define COMPASS_ERRORS_H

#include <stdexcept>
#include <string>

namespace compass {

/// A request exceeds what an exact method can handle (qubit count, flagged
/// checks per component, ...). Distinct from malformed input, which raises
/// std::invalid_argument.
class LimitError : public std::runtime_error {
   public:
    explicit LimitError(const std::string &what) : std::runtime_error(what) {
    }
};

}  // namespace compass

#endif  // COMPASS_ERRORS_H
