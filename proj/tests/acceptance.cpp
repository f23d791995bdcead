// Acceptance suite: runs every verification criterion at its pinned
// tolerance and prints one pass/fail line per criterion.  Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cstdio>

#include "vcross/verify.hpp"

int main() {
  vcross::VerifyContext ctx;
  bool all = true;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n : vcross::all_criteria()) {
    const auto c0 = std::chrono::steady_clock::now();
    vcross::CriterionResult r = vcross::run_criteria(ctx, {n}).front();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    std::printf("%s criterion %2d %-22s (%.1f s)\n", r.pass ? "[PASS]" : "[FAIL]",
                r.number, r.id.c_str(), secs);
    for (const auto& c : r.checks)
      std::printf("        %s %-28s measured=%-12.6g expected=%-12.6g tol=%-10.4g %s\n",
                  c.pass ? "ok  " : "FAIL", c.id.c_str(), c.measured, c.expected,
                  c.tolerance, c.detail.c_str());
    all = all && r.pass;
    std::fflush(stdout);
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s (%.1f s total)\n", all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED",
              total);
  return all ? 0 : 1;
}
