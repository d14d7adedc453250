#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "spinshell/errors.hpp"
#include "spinshell/experiment.hpp"

int main(int argc, char** argv) {
  // Pin BLAS-internal threading before the first eigensolve so spectra are
  // bit-reproducible; our own worker pool provides the parallelism.
#ifndef _WIN32
  ::setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);
#endif

  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cout << spinshell::usage_text();
    return 2;
  }

  try {
    const spinshell::ParsedInvocation invocation =
        spinshell::parse_config(args);
    spinshell::run_command(invocation, std::cout);
    return 0;
  } catch (const spinshell::HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const spinshell::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const spinshell::EmptyShellError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const spinshell::DegenerateWindowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const spinshell::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const spinshell::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
