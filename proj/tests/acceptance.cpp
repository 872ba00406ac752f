#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "checks.hpp"

using namespace mabdris;

// Usage: acceptance [--threads N] [--only 1,2,...]
int main(int argc, char** argv) {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string only;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--threads")) threads = std::atoi(argv[i + 1]);
    if (!std::strcmp(argv[i], "--only")) only = "," + std::string(argv[i + 1]) + ",";
  }
  auto wanted = [&](int id) { return only.empty() || only.find("," + std::to_string(id) + ",") != std::string::npos; };

  int failed = 0;
  auto report = [&](const check::CheckResult& r) {
    std::cout << check::format(r) << std::endl;
    failed += !r.pass;
  };
  if (wanted(1)) report(check::scattering_constraints());
  if (wanted(2)) report(check::fp_identity());
  if (wanted(3)) report(check::beamformer_kkt());
  if (wanted(4)) report(check::vectorization());
  if (wanted(5)) report(check::placement_equivalence());
  if (wanted(6)) report(check::gradient());
  if (wanted(7)) report(check::minorization());
  if (wanted(8)) report(check::monotone_convergence());
  if (wanted(9)) report(check::small_instance());
  if (wanted(10)) report(check::trends(threads));
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
