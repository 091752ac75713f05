// Runs every acceptance criterion at full size and prints one line per criterion.
// Options: --fast, --only 1,4,9, --seed N, --algebra NAME.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "affine/acceptance.hpp"
#include "affine/error.hpp"

int main(int argc, char** argv) {
  affine::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", a.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--fast") {
      opt.fast = true;
    } else if (a == "--only") {
      std::stringstream ss(next());
      std::string tok;
      while (std::getline(ss, tok, ',')) opt.only.push_back(std::atoi(tok.c_str()));
    } else if (a == "--seed") {
      opt.seed = std::strtoull(next().c_str(), nullptr, 10);
    } else if (a == "--algebra") {
      opt.algebra = next();
    } else {
      std::fprintf(stderr, "usage: acceptance [--fast] [--only ids] [--seed N] [--algebra NAME]\n");
      return 2;
    }
  }
  int failed = 0;
  try {
    affine::run_acceptance(opt, [&](const affine::CriterionResult& r) {
      if (!r.pass) ++failed;
      std::printf("%s\n", affine::format_result(r).c_str());
      std::fflush(stdout);
    });
  } catch (const affine::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d failed\n", failed ? "FAILED" : "ALL PASS", failed);
  return failed ? 1 : 0;
}
