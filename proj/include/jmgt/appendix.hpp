#ifndef JMGT_APPENDIX_HPP
#define JMGT_APPENDIX_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace jmgt {

// Numeric spot checks of the auxiliary integral inequalities and the scalar
// bootstrap lemma: each suite reports the measured constant, the constant
// under range/resolution doubling, and whether the pair is stable.
struct AppendixCheck {
  std::string name;
  double measured = 0.0;
  double refined = 0.0;
  bool stable = false;
  bool pass = false;
  std::string detail;
};

struct AppendixReport {
  std::vector<AppendixCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

AppendixReport verify_appendix_inequalities(std::uint64_t seed = 7);

// Scalar bootstrap iteration M <- C1 + C2 M^kappa; returns the sup of the
// iterates (stays below C1/(1 - 1/kappa) when the smallness condition holds).
double strauss_iteration_sup(double c1, double c2, double kappa, int iterations);

}  // namespace jmgt

#endif
