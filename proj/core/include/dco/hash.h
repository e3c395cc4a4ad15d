// Copyright 2026 The DCO Authors.
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

#ifndef DCO_HASH_H_
#define DCO_HASH_H_

#include <string>
#include <string_view>

namespace dco {

// Lowercase hex SHA-256 of the bytes of `data` (64 characters).
std::string Sha256Hex(std::string_view data);

bool IsHex64(std::string_view s);

}  // namespace dco

#endif  // DCO_HASH_H_
