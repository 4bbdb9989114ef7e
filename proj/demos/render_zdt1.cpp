// Runs NSGA-II on ZDT1 for 250 generations and writes the sonification to
// zdt1.wav, printing the active-partial count every 25 generations.
//
//   ./demo_render_zdt1 [seed] [out.wav]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "sonopt/engine.hpp"
#include "sonopt/harness.hpp"
#include "sonopt/wav.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 42;
  const std::string path = argc > 2 ? argv[2] : "zdt1.wav";

  const auto problem = sonopt::zdt1();
  auto log = sonopt::run_algorithm(problem, sonopt::Algorithm::Nsga2, 250, seed);
  log.header.config = sonopt::EngineConfig{};
  const auto result = sonopt::render_run(log, log.header.config);

  for (const auto& snap : result.snapshots) {
    if (snap.generation_index % 25 != 0) continue;
    std::size_t active = 0;
    for (double a : snap.partials) active += a > 0.0;
    std::printf("gen %3llu  points %3zu  recurrent %3zu  active partials %3zu\n",
                static_cast<unsigned long long>(snap.generation_index), snap.point_count, snap.recurrent_count, active);
  }

  const auto final_front = std::get<sonopt::FrontEvent>(log.events.back()).front.points;
  std::printf("IGD of final front: %.5f\n", sonopt::igd(sonopt::zdt1_pareto_front(1000), final_front));

  sonopt::write_file(path, sonopt::encode_wav(result.audio, 48000, sonopt::WavFormat::Pcm16));
  std::printf("wrote %s (%.1f s)\n", path.c_str(), static_cast<double>(result.audio.size()) / 48000.0);
}
