#ifndef SPACETIME_ERROR_HPP_
#define SPACETIME_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace spacetime {

/// A single problem found while validating input, located by a JSON pointer.
struct issue {
  std::string code;
  std::string message;
  std::string pointer;
};

class error : public std::runtime_error {
 public:
  error(std::string code, std::string const& message, std::string pointer = {})
      : std::runtime_error(message)
      , m_code(std::move(code))
      , m_pointer(std::move(pointer)) {}

  [[nodiscard]] auto code() const noexcept -> std::string const& { return m_code; }
  [[nodiscard]] auto pointer() const noexcept -> std::string const& { return m_pointer; }

 private:
  std::string m_code;
  std::string m_pointer;
};

class validation_error : public error {
 public:
  explicit validation_error(std::vector<issue> issues)
      : error(issues.empty() ? "validation" : issues.front().code, summarize(issues),
              issues.empty() ? std::string{} : issues.front().pointer)
      , m_issues(std::move(issues)) {}

  [[nodiscard]] auto issues() const noexcept -> std::vector<issue> const& { return m_issues; }

 private:
  static auto summarize(std::vector<issue> const& issues) -> std::string {
    std::string out;
    for (auto const& i : issues) {
      if (!out.empty()) {
        out += "; ";
      }
      out += i.message;
      if (!i.pointer.empty()) {
        out += " at " + i.pointer;
      }
    }
    return out.empty() ? "validation failed" : out;
  }

  std::vector<issue> m_issues;
};

/// An operation was requested out of order in the interactive protocol.
class protocol_error : public error {
 public:
  explicit protocol_error(std::string const& message)
      : error("protocol", message) {}
};

}  // namespace spacetime

#endif  // SPACETIME_ERROR_HPP_
