// Streams an optimizer run to a listening engine over OSC, one generation
// per interval, the way an external optimizer callback would.
//
//   sonopt listen --port 9000 --out live.wav &
//   ./demo_send_fronts [host] [port] [problem] [algo] [generations]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sonopt/harness.hpp"

int main(int argc, char** argv) {
  const std::string host = argc > 1 ? argv[1] : "127.0.0.1";
  const auto port = static_cast<std::uint16_t>(argc > 2 ? std::atoi(argv[2]) : 9000);
  const std::string problem = argc > 3 ? argv[3] : "zdt1";
  const std::string algo = argc > 4 ? argv[4] : "nsga2";
  const std::size_t generations = argc > 5 ? std::strtoul(argv[5], nullptr, 10) : 250;

  try {
    sonopt::OscSink osc(host, port);
    sonopt::PacedSink paced(osc, std::chrono::duration<double>(0.5));
    sonopt::run_algorithm(sonopt::make_problem(problem), sonopt::parse_algorithm(algo), generations, 1, &paced,
                          [](const sonopt::Population& pop) {
                            if (pop.generation_index % 10 == 0)
                              std::printf("sent generation %llu\n",
                                          static_cast<unsigned long long>(pop.generation_index));
                          });
  } catch (const std::exception& e) {
    std::fprintf(stderr, "send_fronts: %s\n", e.what());
    return 1;
  }
}
