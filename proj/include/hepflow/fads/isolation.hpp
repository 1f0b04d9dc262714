#pragma once

#include <string>

#include "hepflow/error.hpp"
#include "hepflow/fads/candidate.hpp"

namespace hepflow::fads {

class ZeroPt : public Error {
 public:
  explicit ZeroPt(int uid) : Error("isolation: candidate " + std::to_string(uid) + " has zero pt") {}
};

/// Relative isolation: summed pt of the other candidates within dr_max of
/// `around`, divided by its pt. Entries sharing `around`'s truth uid (or
/// its address) are the candidate itself and are skipped.
inline double isolation_value(const Candidates& others, const Candidate& around, double dr_max) {
  const double pt = around.momentum.pt();
  if (!(pt > 0)) throw ZeroPt(around.uid);
  double sum = 0;
  for (const auto& o : others) {
    if (&o == &around || (around.uid != 0 && o.uid == around.uid)) continue;
    if (delta_r(o.momentum, around.momentum) < dr_max) sum += o.momentum.pt();
  }
  return sum / pt;
}

inline bool is_isolated(const Candidates& others, const Candidate& around, double dr_max, double threshold) {
  return isolation_value(others, around, dr_max) < threshold;
}

}  // namespace hepflow::fads
