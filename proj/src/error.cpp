#include "gazekit/error.hpp"

#include <utility>

namespace gazekit {

Error::Error(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

ParseError::ParseError(const std::string& message, std::size_t line)
    : Error("parse", "line " + std::to_string(line) + ": " + message), line_(line) {}

IoError::IoError(const std::string& message, std::string path)
    : Error("io", message + ": " + path), path_(std::move(path)) {}

DivergenceError::DivergenceError(const std::string& message, int epoch)
    : Error("divergence", message + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

}  // namespace gazekit
