#include <csignal>

#include "sonopt/app.hpp"

int main(int argc, char** argv) {
  std::signal(SIGINT, [](int) { sonopt::interrupted() = true; });
  std::signal(SIGTERM, [](int) { sonopt::interrupted() = true; });
  return sonopt::run_cli(argc, argv);
}
