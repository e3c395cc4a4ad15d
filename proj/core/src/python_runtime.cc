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

#include "dco/python_runtime.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include <pybind11/embed.h>

namespace py = pybind11;

namespace dco::python {
namespace {

constexpr const char* kHelperSource = R"PY(
import json
import inspect
import types


class BlockScope(dict):
    """Globals of one generated block. Names the block does not define
    resolve against the registry bindings, then the host namespace."""

    __slots__ = ("_dco_registry", "_dco_host")

    def __init__(self, registry, host):
        super().__init__()
        self._dco_registry = registry
        self._dco_host = host

    def __missing__(self, key):
        try:
            return self._dco_registry[key]
        except KeyError:
            return self._dco_host[key]


def new_scope(registry, host, name):
    scope = BlockScope(registry, host)
    scope["__name__"] = name
    return scope


def harvest(scope, filename):
    names = []
    for name, value in list(dict.items(scope)):
        if not isinstance(value, types.FunctionType):
            continue
        if value.__code__.co_filename != filename:
            continue
        if value.__name__ == name:
            names.append(name)
    return names


def describe(exc):
    text = str(exc)
    return type(exc).__name__ + (": " + text if text else "")


def encode(out):
    try:
        return json.dumps(out, allow_nan=False, default=repr)
    except (ValueError, TypeError, RecursionError):
        out["value"] = repr(out.get("value"))
        return json.dumps(out, allow_nan=False, default=repr)


def wants_receiver(fn):
    try:
        params = list(inspect.signature(fn).parameters.values())
    except (TypeError, ValueError):
        return False
    return bool(params) and params[0].name == "self"


def call(fn, args, receiver, reporter):
    args = tuple(args)
    if receiver is not None and wants_receiver(fn):
        args = (receiver,) + args
    try:
        out = {"status": "ok", "value": fn(*args)}
    except BaseException as exc:
        out = {"status": "runtime_error", "error_type": type(exc).__name__,
               "error": describe(exc)}
    if reporter is not None:
        try:
            out["effects"] = reporter()
        except Exception as exc:
            out["effects"] = {"error": describe(exc)}
    return encode(out)


def trial_exec(code, registry, host, name, filename):
    scope = new_scope(registry, host, name)
    try:
        exec(code, scope)
    except BaseException as exc:
        return json.dumps({"status": "runtime_error", "error_type": type(exc).__name__,
                           "error": describe(exc)})
    return json.dumps({"status": "ok", "value": harvest(scope, filename)})
)PY";

std::once_flag g_init_once;
py::object* g_helpers = nullptr;

bool WriteAll(int fd, const char* data, std::size_t size) {
  while (size > 0) {
    ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
  return true;
}

[[noreturn]] void ChildMain(int write_fd, const std::function<std::string()>& body) {
  PyOS_AfterFork_Child();
  ::setpgid(0, 0);
  int devnull = ::open("/dev/null", O_RDWR);
  if (devnull >= 0) {
    ::dup2(devnull, 0);
    ::dup2(devnull, 1);
    ::dup2(devnull, 2);
  }
  std::string payload;
  int code = 0;
  try {
    payload = body();
  } catch (const std::exception& e) {
    payload = e.what();
    code = 3;
  } catch (...) {
    code = 3;
  }
  std::uint64_t size = payload.size();
  bool ok = WriteAll(write_fd, reinterpret_cast<const char*>(&size), sizeof(size)) &&
            WriteAll(write_fd, payload.data(), payload.size());
  ::_exit(ok ? code : 4);
}

}  // namespace

void EnsureInitialized() {
  std::call_once(g_init_once, [] {
    if (!Py_IsInitialized()) {
      py::initialize_interpreter(/*init_signal_handlers=*/false);
    }
    {
      py::module_ helpers = py::module_::import("types").attr("ModuleType")("_dco_runtime");
      py::exec(kHelperSource, helpers.attr("__dict__"));
      g_helpers = new py::object(std::move(helpers));
    }
    PyEval_SaveThread();
  });
}

Handle::Handle(py::object obj) {
  PyObject* raw = obj.release().ptr();
  ref_ = std::shared_ptr<PyObject>(raw, [](PyObject* p) {
    PyGILState_STATE state = PyGILState_Ensure();
    Py_XDECREF(p);
    PyGILState_Release(state);
  });
}

py::object Handle::get() const {
  return ref_ ? py::reinterpret_borrow<py::object>(ref_.get()) : py::none();
}

py::module_ Helpers() { return py::reinterpret_borrow<py::module_>(*g_helpers); }

py::object FromJson(const nlohmann::json& value) {
  return py::module_::import("json").attr("loads")(value.dump());
}

ForkResult RunForked(const std::function<std::string()>& body, int timeout_ms) {
  EnsureInitialized();
  ForkResult result;
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    result.detail = std::string("pipe: ") + std::strerror(errno);
    return result;
  }
  const auto start = std::chrono::steady_clock::now();
  pid_t pid;
  {
    GilGuard gil;
    PyOS_BeforeFork();
    pid = ::fork();
    if (pid == 0) {
      ::close(fds[0]);
      ChildMain(fds[1], body);
    }
    PyOS_AfterFork_Parent();
  }
  ::close(fds[1]);
  if (pid < 0) {
    ::close(fds[0]);
    result.detail = std::string("fork: ") + std::strerror(errno);
    return result;
  }

  const auto deadline = start + std::chrono::milliseconds(timeout_ms);
  std::string buffer;
  bool eof = false;
  bool timed_out = false;
  while (!eof) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    // Rounded up so the wait never ends before the deadline.
    const auto remaining = std::chrono::ceil<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{fds[0], POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(remaining));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (rc == 0) continue;
    char chunk[65536];
    ssize_t n = ::read(fds[0], chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) {
      eof = true;
    } else {
      buffer.append(chunk, static_cast<std::size_t>(n));
      // Grandchildren may hold the pipe open; a complete frame is enough.
      if (buffer.size() >= sizeof(std::uint64_t)) {
        std::uint64_t size;
        std::memcpy(&size, buffer.data(), sizeof(size));
        if (buffer.size() >= sizeof(size) + size) eof = true;
      }
    }
  }
  ::close(fds[0]);

  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  if (timed_out) {
    result.status = ForkResult::Status::kTimedOut;
    return result;
  }

  std::uint64_t size = 0;
  if (buffer.size() >= sizeof(size)) std::memcpy(&size, buffer.data(), sizeof(size));
  const bool framed = buffer.size() >= sizeof(size) && buffer.size() - sizeof(size) == size;
  if (WIFEXITED(status) && WEXITSTATUS(status) == 0 && framed) {
    result.status = ForkResult::Status::kCompleted;
    result.payload = buffer.substr(sizeof(size));
    return result;
  }
  result.status = ForkResult::Status::kCrashed;
  if (WIFSIGNALED(status)) {
    result.detail = std::string("worker killed by signal ") + strsignal(WTERMSIG(status));
  } else if (WIFEXITED(status)) {
    result.detail = "worker exited with status " + std::to_string(WEXITSTATUS(status));
    if (framed && !buffer.empty()) result.detail += ": " + buffer.substr(sizeof(size));
  } else {
    result.detail = "worker ended abnormally";
  }
  return result;
}

}  // namespace dco::python
