// frame_lab: max-min frame energy toolkit.
//
// Exit codes: 0 success, 1 operational failure, 2 usage error.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "framelab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const framelab::ExperimentSpec spec = framelab::parse_args(args);
    return framelab::run(spec);
  } catch (const framelab::HelpRequested& h) {
    std::cout << h.text();
    return 0;
  } catch (const framelab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n"
              << "run 'frame_lab --help' for the command list\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
