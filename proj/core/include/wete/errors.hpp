#ifndef WETE_ERRORS_HPP
#define WETE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wete {

// Error categories map 1:1 onto CLI exit codes (config=1, io=2, divergence=3).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wete

#endif  // WETE_ERRORS_HPP
