#pragma once

#include <stdexcept>
#include <string>

namespace gazekit {

// Every failure raised by the library derives from Error. code() is a stable
// machine-readable tag used by the CLI's diagnostic line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message);
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message) : Error("schema", message) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("domain", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class IoError : public Error {
public:
    IoError(const std::string& message, std::string path);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format", message) {}
};

class BoundsError : public Error {
public:
    explicit BoundsError(const std::string& message) : Error("bounds", message) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& message) : Error("training", message) {}
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& message, int epoch);
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

}  // namespace gazekit
