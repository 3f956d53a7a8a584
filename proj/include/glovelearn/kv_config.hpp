// Copyright 2026 The glovelearn Authors
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

#pragma once

// Flat key-value text files:
//
//   # comment
//   key = value
//
// Keys are unique; blank lines and '#' comments are ignored.

#include <iosfwd>
#include <map>
#include <string>

#include "glovelearn/emulator.hpp"

namespace glovelearn {

using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(std::istream& in);

/// Emulator config keys: rate, noise_std, seed and channel<N>.{offset,amplitude,frequency,phase}
/// for N = 1..5. Missing keys keep their defaults; unknown keys are a ParseError.
EmulatorConfig read_emulator_config(std::istream& in);
void write_emulator_config(std::ostream& out, const EmulatorConfig& config);

}  // namespace glovelearn
