#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace seqlab {

// All library failures surface as this exception; the CLI maps it to exit
// code 2 (data error).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Train mode enables stochastic pieces (dropout); eval mode is deterministic.
enum class Mode { kTrain, kEval };

namespace detail {

inline void fail(const std::string& msg) { throw Error(msg); }

template <class... Args>
std::string message(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace detail

template <class... Args>
void require(bool cond, Args&&... args) {
  if (!cond) detail::fail(detail::message(std::forward<Args>(args)...));
}

}  // namespace seqlab
