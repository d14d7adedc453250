#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinshell {

/// Invalid command line flags or config file contents. CLI exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by config parsing when help was requested; what() is the full help
/// text. The CLI prints it and exits 0.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of a library operation was violated.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shell selection found no eigenstates (or product pairs) in the requested
/// interval. Carries the nearest achievable energy so callers can recover.
/// CLI exit code 4.
class EmptyShellError : public DomainError {
 public:
  EmptyShellError(const std::string& what, double nearest_energy)
      : DomainError(what), nearest_energy_(nearest_energy) {}

  double nearest_energy() const { return nearest_energy_; }

 private:
  double nearest_energy_;
};

/// A density-of-states window with zero energy span. Degeneracies of this
/// size signal a symmetry the caller should resolve. CLI exit code 4.
class DegenerateWindowError : public DomainError {
 public:
  DegenerateWindowError(const std::string& what, std::size_t window)
      : DomainError(what), window_(window) {}

  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
};

/// Eigensolver failure (non-convergence or invariants out of tolerance).
/// Carries the magnetization sector it happened in. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int n_up)
      : std::runtime_error(what), n_up_(n_up) {}

  int n_up() const { return n_up_; }

 private:
  int n_up_;
};

}  // namespace spinshell
