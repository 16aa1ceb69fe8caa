// Writes a planted-changepoint OHLC pair: make_synthetic DIR [T tau lam1 lamT seed]
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic DIR [T tau lam1 lamT seed]\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  const std::size_t T = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 300;
  const std::size_t tau = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 150;
  const double l1 = argc > 4 ? std::atof(argv[4]) : 0.5;
  const double lT = argc > 5 ? std::atof(argv[5]) : 4.0;
  const std::uint64_t seed = argc > 6 ? std::strtoull(argv[6], nullptr, 10) : 7;
  std::filesystem::create_directories(dir);
  const auto pair = synth::planted_pair(T, tau, l1, lT, seed);
  std::ofstream a(dir / "A.csv"), b(dir / "B.csv");
  synth::write_export_csv(a, pair.a);
  synth::write_export_csv(b, pair.b);
  std::cout << pair.tau << ' ' << pair.tau_date << '\n';
  return 0;
}
