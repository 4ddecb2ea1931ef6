#ifndef SARCS_ERRORS_HPP
#define SARCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sarcs {

// Error categories map one-to-one onto CLI exit codes:
// Usage -> 1, Data -> 2, Numeric -> 3.
enum class ErrorKind {
    Usage,
    Data,
    Numeric,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

}  // namespace sarcs

#endif
