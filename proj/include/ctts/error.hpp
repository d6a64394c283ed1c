#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctts {

// All library failures derive from Error; messages are prefixed with the
// module that raised them ("alignment: ...", "cox: ...").
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& module, std::size_t line, const std::string& what)
      : Error(module, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ctts
