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

#ifndef DCO_PYTHON_RUNTIME_H_
#define DCO_PYTHON_RUNTIME_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>

namespace dco::python {

// Starts the embedded interpreter once per process and releases the GIL so
// any thread may enter with GilGuard. The interpreter is
// never finalized.
void EnsureInitialized();

// Holds the GIL for the enclosing scope, starting the interpreter first if
// needed. Uses the PyGILState API, so a thread without a thread state gets
// one for the duration.
class GilGuard {
 public:
  GilGuard() : state_((EnsureInitialized(), PyGILState_Ensure())) {}
  ~GilGuard() { PyGILState_Release(state_); }
  GilGuard(const GilGuard&) = delete;
  GilGuard& operator=(const GilGuard&) = delete;

 private:
  PyGILState_STATE state_;
};

// Shared reference to a Python object. Copies and the final release are safe
// without holding the GIL.
class Handle {
 public:
  Handle() = default;
  // Requires the GIL.
  explicit Handle(pybind11::object obj);

  explicit operator bool() const { return static_cast<bool>(ref_); }
  PyObject* ptr() const { return ref_.get(); }
  // Requires the GIL.
  pybind11::object get() const;

 private:
  std::shared_ptr<PyObject> ref_;
};

// The runtime helper module (block scopes, harvesting, call marshaling).
// Requires the GIL.
pybind11::module_ Helpers();

// json -> Python via json.loads. Requires the GIL.
pybind11::object FromJson(const nlohmann::json& value);

struct ForkResult {
  enum class Status { kCompleted, kTimedOut, kCrashed };
  Status status = Status::kCrashed;
  std::string payload;  // What the child body returned, when completed.
  std::string detail;   // Why the child crashed.
  std::int64_t elapsed_ms = 0;
};

// Runs `body` in a fork of this process and returns the string it produced.
// The child runs `body` holding the GIL, with stdio redirected to /dev/null.
// When `timeout_ms` elapses first, the child's process group is SIGKILLed.
// Call without holding the GIL.
ForkResult RunForked(const std::function<std::string()>& body, int timeout_ms);

}  // namespace dco::python

#endif  // DCO_PYTHON_RUNTIME_H_
