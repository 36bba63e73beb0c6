#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Error categories; the CLI maps them 1:1 onto exit codes.
enum class errc : int {
  config = 1,       // bad key, bad value, violated config invariant
  domain = 2,       // regime/domain violations (subcritical input, degenerate data, range)
  convergence = 3,  // iteration caps, explosion guard
  io = 4,           // file system
};

class error : public std::runtime_error {
 public:
  error(errc c, const std::string& what) : std::runtime_error(what), code_(c) {}
  [[nodiscard]] errc code() const noexcept { return code_; }

 private:
  errc code_;
};

struct config_error : error {
  explicit config_error(const std::string& w) : error(errc::config, w) {}
};

struct domain_error : error {
  explicit domain_error(const std::string& w) : error(errc::domain, w) {}
};

struct convergence_error : error {
  explicit convergence_error(const std::string& w) : error(errc::convergence, w) {}
};

struct io_error : error {
  explicit io_error(const std::string& w) : error(errc::io, w) {}
};

inline const char* category_name(errc c) {
  switch (c) {
    case errc::config: return "config";
    case errc::domain: return "domain";
    case errc::convergence: return "convergence";
    case errc::io: return "io";
  }
  return "unknown";
}

}  // namespace hawkes
