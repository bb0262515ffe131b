#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "olab/verify.hpp"

// Runs acceptance criteria 1..13 (or the ids given as arguments); one line per criterion.
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  int failed = 0;
  const auto results = olab::verify::run_acceptance(ids, [&](const olab::verify::CriterionResult& r) {
    std::printf("%s\n", olab::verify::summary_line(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
