#ifndef PENCIL_PROBLEM_HPP
#define PENCIL_PROBLEM_HPP

#include <optional>

#include "pencil/cases.hpp"

namespace pencil {

// ---------------------------------------------------------------------------
// Problem files (JSON).  Either a builtin case:
//   { "case": "example3", "h": 1.0 }
// or an explicit pencil:
//   {
//     "name": "...", "r": 2, "d": 1,
//     "l": { "p0": [TERM...], "p1": [...], "q1": [...], "s1": [...] },
//     "m": { ... }, "n": { ... },
//     "excluded": [0.0], "interval": [0.0, 1.0], "period": 1.0
//   }
// where each coefficient is a list of TERMs
//   { "tpow": j, "lampow": k, "value": [[re, [re,im], ...]] }
// meaning sum_terms value * t^j * lambda^k (k may be negative).
// ---------------------------------------------------------------------------
struct Problem {
  std::string name;
  Pencil pencil;
  double a = 0.0, b = 1.0;
  bool hasInterval = false;
  double period = 1.0;
  std::optional<ReferenceCase> refCase;
};

Problem loadProblem(const std::string& path);
Problem problemFromJsonText(const std::string& text);

}  // namespace pencil

#endif  // PENCIL_PROBLEM_HPP
