#pragma once

#include <stdexcept>
#include <string>

namespace imgreen {

/// Base class for all library errors. `stage` names the pipeline step that
/// raised it (empty when the error comes from a leaf routine).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string stage = {})
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Argument outside the mathematical domain of a function (z <= 0, r = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition of an operation failed (singular system,
/// interior resonance, violated spectral assumption, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Operators composed across incompatible spaces.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown configuration entries.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Re-throws `e` with `stage` prepended, preserving the error category.
template <typename Fn>
auto with_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PreconditionError& e) {
    throw PreconditionError(e.what(), e.stage().empty() ? stage : stage + "/" + e.stage());
  } catch (const DomainError& e) {
    throw DomainError(e.what(), e.stage().empty() ? stage : stage + "/" + e.stage());
  } catch (const SpaceMismatch& e) {
    throw SpaceMismatch(e.what(), e.stage().empty() ? stage : stage + "/" + e.stage());
  }
}

}  // namespace imgreen
