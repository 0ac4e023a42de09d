#pragma once

#include <stdexcept>
#include <string>

namespace crosslex {

// Base error carrying a short machine-readable code alongside the message.
// The CLI surfaces these as one-line `error code=<code> msg="..."` records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class CryptoError : public Error {
 public:
  explicit CryptoError(const std::string& msg) : Error("crypto", msg) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& msg) : Error("protocol", msg) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& msg) : Error("transport", msg) {}
};

class LexiconError : public Error {
 public:
  explicit LexiconError(const std::string& msg) : Error("lexicon", msg) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error("parse", msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error("invalid", msg) {}
};

}  // namespace crosslex
