#include "fefp/explicit_audit.hpp"

#include <cmath>
#include <initializer_list>
#include <iomanip>
#include <limits>
#include <ostream>

namespace fefp::closure {

namespace {

// m~(p)_{i j ...} = <v'_i v'_j ... |v'|^p>, indices 1-based as transcribed.
struct Sym {
  const MomentSet& m;

  double operator()(int p, std::initializer_list<int> idx) const {
    Polynomial poly = Polynomial::norm2_pow(p / 2);
    for (int i : idx) poly = poly * Polynomial::component(i - 1);
    return expectation(poly, m);
  }
};

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double AuditEntry::abs_diff() const { return std::abs(generic - transcribed); }

double AuditEntry::rel_diff() const {
  const double scale = std::max(std::abs(generic), std::abs(transcribed));
  return scale > 0.0 ? abs_diff() / scale : 0.0;
}

bool AuditEntry::agrees(double rtol) const {
  if (std::isnan(transcribed)) return false;
  const double scale = std::max({std::abs(generic), std::abs(transcribed), 1e-300});
  return abs_diff() <= rtol * scale || abs_diff() < 1e-13;
}

std::size_t AuditReport::discrepancies(double rtol) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.agrees(rtol) ? 0 : 1;
  return n;
}

void AuditReport::write(std::ostream& os, double rtol) const {
  os << "block row col generic transcribed abs_diff rel_diff status note\n";
  os << std::setprecision(12);
  for (const auto& e : entries) {
    os << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.generic << ' ' << e.transcribed << ' ' << e.abs_diff()
       << ' ' << e.rel_diff() << ' ' << (e.agrees(rtol) ? "match" : "DISCREPANCY") << ' '
       << (e.note.empty() ? "-" : e.note) << '\n';
  }
  os << "# entries " << entries.size() << " discrepancies " << discrepancies(rtol) << " rtol " << rtol << '\n';
}

AuditReport audit_explicit_matrices(const MomentSet& mset, double tau, double diffusion, double c4,
                                    const ProductionTerms& production) {
  constexpr std::size_t kN = kFullStressSystem;
  const FullStressSystem sys = assemble_full_stress(mset, tau, diffusion, c4, production);
  const Sym m{mset};
  const double rho = mset.rho;
  const double m2 = m(2, {});
  const double m4 = m(4, {});
  auto m0 = [&](std::initializer_list<int> idx) { return m(0, idx); };
  auto m2v = [&](int i) { return m(2, {i}); };

  double T[kN][kN] = {};
  std::string note[kN][kN];

  // B
  const double B[6][6] = {
      {2 * m0({1, 1}), 2 * m0({1, 2}), 2 * m0({1, 3}), 0, 0, 0},
      {m0({1, 2}), m0({1, 1}) + m0({2, 2}), m0({2, 3}), m0({1, 2}), m0({1, 3}), 0},
      {m0({1, 3}), m0({2, 3}), m0({1, 1}) + m0({3, 3}), 0, m0({1, 2}), m0({1, 3})},
      {0, 2 * m0({1, 2}), 0, 2 * m0({2, 2}), 2 * m0({2, 3}), 0},
      {0, m0({1, 3}), m0({1, 2}), m0({2, 3}), m0({2, 2}) + m0({3, 3}), m0({2, 3})},
      {0, 0, 2 * m0({1, 3}), 0, m0({2, 3}), 2 * m0({3, 3})},
  };
  // C, row 2 col 2 transcribed without an operator between its two terms; read as a product
  const double C[6][3] = {
      {2 * m2v(1) + 4 * m0({1, 1, 1}), 4 * m0({1, 1, 2}), 4 * m0({1, 1, 3})},
      {m2v(1) + 4 * m0({1, 1, 2}), m2v(2) * 4 * m0({1, 2, 2}), 4 * m0({1, 2, 3})},
      {m2v(1) + 4 * m0({1, 1, 3}), 4 * m0({1, 2, 3}), m2v(3) + 4 * m0({1, 3, 3})},
      {4 * m0({1, 2, 2}), 2 * m2v(2) + 4 * m0({2, 2, 2}), 4 * m0({2, 2, 3})},
      {4 * m0({1, 2, 3}), m2v(2) + 4 * m0({2, 2, 3}), m2v(3) + 4 * m0({2, 3, 3})},
      {4 * m0({1, 3, 3}), 4 * m0({2, 3, 3}), 2 * m2v(3) + 4 * m0({3, 3, 3})},
  };
  const double E[6] = {6 * m(2, {1, 1}), 6 * m(2, {1, 2}), 6 * m(2, {1, 3}),
                       6 * m(2, {2, 2}), 6 * m(2, {2, 3}), 6 * m(2, {3, 3})};
  const double F[3][6] = {
      {2 * m0({1, 1, 1}) + m2v(1), 4 * m0({1, 1, 2}) + m2v(2), 4 * m0({1, 1, 3}) + m2v(3), 2 * m0({1, 2, 2}),
       4 * m0({1, 2, 3}), 2 * m0({1, 3, 3})},
      {2 * m0({1, 1, 2}), 4 * m0({1, 2, 2}) + m2v(1), 4 * m0({1, 2, 3}), 2 * m0({2, 2, 2}) + m2v(2),
       4 * m0({2, 2, 3}) + m2v(3), 2 * m0({2, 3, 3})},
      {2 * m0({1, 1, 3}), 4 * m0({1, 2, 3}), 4 * m0({1, 3, 3}) + m2v(1), 2 * m0({2, 2, 3}),
       4 * m0({2, 3, 3}) + m2v(2), 2 * m0({3, 3, 3}) + m2v(3)},
  };
  // J, sum of the transcribed matrices (including the asymmetric (3,2) entries)
  const double m11 = m0({1, 1}), m12 = m0({1, 2}), m13 = m0({1, 3}), m22 = m0({2, 2}), m23 = m0({2, 3}),
               m33 = m0({3, 3});
  const double Pi[3][3] = {{m11, m12, m13}, {m12, m22, m23}, {m13, m23, m33}};
  double J[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) J[i][j] = 8 * m(2, {i + 1, j + 1}) - 4 * Pi[i][j] * m2;
  J[0][0] -= 4 * (m11 * m11 + m12 * m12 + m13 * m13);
  J[1][1] -= 4 * (m12 * m12 + m22 * m22 + m23 * m23);
  J[2][2] -= 4 * (m13 * m13 + m23 * m23 + m33 * m33);
  const double J1[3][3] = {{0, m11 * m12, m11 * m13}, {m11 * m12, 0, m12 * m13}, {m11 * m13, m11 * m13, 0}};
  const double J2[3][3] = {{0, m12 * m22, m12 * m23}, {m12 * m22, 0, m22 * m23}, {m12 * m23, m12 * m23, 0}};
  const double J3[3][3] = {{0, m13 * m23, m13 * m33}, {m13 * m23, 0, m23 * m33}, {m13 * m33, m13 * m33, 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) J[i][j] -= 4 * (J1[i][j] + J2[i][j] + J3[i][j]);
  for (int i = 0; i < 3; ++i) J[i][i] += m4 - m2 * m2;
  // Z, third row transcribed with subscript 1 on the leading moment; every row ends in m~(2)_1
  const double Z[3] = {
      3 * (3 * m(4, {1}) - 2 * (m2v(1) * m11 + m2v(2) * m12 + m2v(3) * m13) - m2v(1) * m2),
      3 * (3 * m(4, {2}) - 2 * (m2v(1) * m12 + m2v(2) * m22 + m2v(3) * m23) - m2v(1) * m2),
      3 * (3 * m(4, {1}) - 2 * (m2v(1) * m13 + m2v(2) * m23 + m2v(3) * m33) - m2v(1) * m2),
  };
  const double W =
      6 * (m(4, {1, 1}) + m(4, {2, 2}) + m(4, {3, 3}) - m2v(1) * m2v(1) - m2v(2) * m2v(2) - m2v(3) * m2v(3));

  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) T[i][j] = B[i][j];
    for (int j = 0; j < 3; ++j) T[i][6 + j] = C[i][j];
    T[i][9] = E[i];
    T[9][i] = E[i];
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 6; ++j) T[6 + i][j] = F[i][j];
    for (int j = 0; j < 3; ++j) T[6 + i][6 + j] = J[i][j];
    T[6 + i][9] = Z[i];
    T[9][6 + i] = Z[i];
  }
  T[9][9] = W;
  note[1][7] = "no_operator_read_as_product";
  note[8][6] = note[8][7] = note[8][8] = "asymmetric_transcribed_entry";
  note[8][9] = note[9][8] = "repeated_subscript";

  auto block_name = [](std::size_t r, std::size_t c) -> std::string {
    const int br = r < 6 ? 0 : (r < 9 ? 1 : 2);
    const int bc = c < 6 ? 0 : (c < 9 ? 1 : 2);
    static const char* names[3][3] = {{"R.B", "R.C", "R.E"}, {"R.F", "R.J", "R.Z"}, {"R.E", "R.Z", "R.W"}};
    return names[br][bc];
  };

  AuditReport report;
  for (std::size_t r = 0; r < kN; ++r)
    for (std::size_t c = 0; c < kN; ++c)
      report.entries.push_back({block_name(r, c), r, c, sys.R[r][c], T[r][c], note[r][c]});

  const double Qt[kN] = {rho, 0, 0, rho, 0, rho, 8 * m0({1}), 8 * m0({2}), 8 * m0({3}), 5 * m2};
  for (std::size_t a = 0; a < kN; ++a)
    report.entries.push_back({a < 6 ? "Q.X" : (a < 9 ? "Q.Y" : "Q.phi"), a, 0, sys.Q[a], Qt[a], ""});

  // production of <v'_i v'_j> and of <v'_i |v'|^2>
  auto P0 = [&](int i, int j) {
    for (std::size_t k = 0; k < 6; ++k)
      if ((kStressPairs[k][0] == i - 1 && kStressPairs[k][1] == j - 1) ||
          (kStressPairs[k][0] == j - 1 && kStressPairs[k][1] == i - 1))
        return production.stress[k];
    return kUndefined;
  };
  auto P2 = [&](int i) { return 2.0 * production.heat_flux[static_cast<std::size_t>(i - 1)]; };
  const double D = diffusion;
  const double bt[kN] = {
      P0(1, 1) - D + c4 * m(4, {1, 1}),
      P0(1, 2) - 2 * c4 * m(4, {1, 2}),
      P0(1, 3) - 2 * c4 * 2 * m(4, {1, 3}),
      P0(1, 2) - D - c4 * m(4, {2, 2}),
      P0(2, 3) - 2 * c4 * m(4, {2, 3}),
      P0(3, 3) - D - c4 * m(4, {3, 3}),
      P2(1) - c4 * m(6, {1}),
      P2(2) - c4 * m(6, {2}),
      kUndefined,
      -c4 * m4,
  };
  for (std::size_t a = 0; a < kN; ++a) {
    std::string n;
    if (a == 3) n = "P12_in_P22_row";
    if (a == 8) n = "undefined_symbol_P(3)_1";
    report.entries.push_back({"b", a, 0, sys.b[a], bt[a], n});
  }
  return report;
}

}  // namespace fefp::closure
