#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "madsim/config.hpp"
#include "madsim/types.hpp"

namespace madsim {

// A single debate's connection to a text generator. Sessions are owned by one
// run and are not shared between threads.
class Session {
 public:
  virtual ~Session() = default;

  // Returns the raw model reply for one prompt. Throws BackendError.
  virtual std::string complete(std::string_view prompt, const GenerationParams& params) = 0;

  virtual std::string_view backend_tag() const = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Opens a session for one run. `run_seed` makes scripted backends
  // reproducible; live backends ignore it. `treatment` is the batch's
  // toxicity condition.
  virtual std::unique_ptr<Session> open_session(std::uint64_t run_seed,
                                                ToxicityLevel treatment) = 0;

  virtual std::string_view tag() const = 0;
};

}  // namespace madsim
