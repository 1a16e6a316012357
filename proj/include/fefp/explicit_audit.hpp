#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fefp/closure.hpp"

namespace fefp::closure {

/// One compared entry. `transcribed` is NaN when the transcribed expression uses a
/// symbol with no definition.
struct AuditEntry {
  std::string block;
  std::size_t row = 0;
  std::size_t col = 0;
  double generic = 0.0;
  double transcribed = 0.0;
  std::string note;

  double abs_diff() const;
  double rel_diff() const;
  bool agrees(double rtol) const;
};

struct AuditReport {
  std::vector<AuditEntry> entries;

  std::size_t discrepancies(double rtol = 1e-9) const;
  /// Whitespace-separated table, one line per entry, with a summary footer.
  void write(std::ostream& os, double rtol = 1e-9) const;
};

/// Compares the generically assembled full-stress R, Q and b entry by entry
/// against the transcribed explicit 10x10 expressions, evaluated on the same
/// central moments. The generic values are authoritative.
AuditReport audit_explicit_matrices(const MomentSet& m, double tau, double diffusion, double c4,
                                    const ProductionTerms& production);

}  // namespace fefp::closure
