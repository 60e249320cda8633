#include "symflow/catalog.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "symflow/errors.hpp"
#include "symflow/families.hpp"

namespace symflow {

namespace {

constexpr double kPi = std::numbers::pi;

FrameFn fixed(LagrangianFrame L) {
  return [L = std::move(L)](double) { return L; };
}

ClinicProblem clinic(ClinicKind kind, HamiltonianFamily fam, FrameFn boundary = {}) {
  ClinicProblem p;
  p.kind = kind;
  p.family = std::move(fam);
  p.boundary = std::move(boundary);
  return p;
}

CatalogEntry constant_hyperbolic() {
  CatalogEntry e;
  e.id = "constant-hyperbolic";
  e.description = "B = diag(1, -1) on the line, independent of lambda";
  e.problem = clinic(ClinicKind::Homoclinic, constant_hyperbolic_family());
  const char* why = "constant operator path and constant transversal pairs";
  e.expected = {{"ispec", 0, why}, {"igeo_w1", 0, why}, {"igeo_w0", 0, why},
                {"asymptotic_clm", 0, why}, {"irel", 0, why}};
  e.oracle = "nullity of the CLM index and of the spectral flow";
  return e;
}

CatalogEntry sech_homoclinic() {
  CatalogEntry e;
  e.id = "sech-homoclinic";
  e.description = "linearization of u'' = u - 2u^3 along u = sech t, B = B* + lambda (B(t) - B*)";
  e.problem = clinic(ClinicKind::Homoclinic, sech_family());
  const char* pt = "one negative eigenvalue of -d^2/dt^2 + 1 - 6 sech^2 t on the line";
  e.expected = {{"ispec", 1, pt}, {"igeo_w1", 1, pt}, {"irel", 1, pt},
                {"igeo_w0", 0, "B* is constant, so the pair at lambda = 0 is constant"},
                {"asymptotic_clm", 0, "the limits do not depend on lambda"}};
  e.oracle = "Poschl-Teller negative-eigenvalue count (dense Dirichlet eigensolve)";
  return e;
}

// E^s(+inf) = span(1, 1) and E^u(-inf) = span(1, -1) for every lambda.
CatalogEntry sech_future_rotating() {
  CatalogEntry e;
  e.id = "sech-future-rotating";
  e.description = "sech system on [0, inf) with L_lambda = rotation(lambda pi/3) span(e1)";
  e.problem = clinic(ClinicKind::FutureHalf, sech_family(),
                     [](double l) { return line(l * kPi / 3.0); });
  e.expected = {{"asymptotic_clm", 1,
                 "L_lambda sweeps through E^s(+inf) = span(1, 1) once, at lambda = 3/4"}};
  e.oracle = "hand count of the boundary line passing the stable line";
  return e;
}

CatalogEntry sech_past_rotating() {
  CatalogEntry e;
  e.id = "sech-past-rotating";
  e.description = "sech system on (-inf, 0] with L_lambda = rotation(5 lambda pi/6) span(e1)";
  e.problem = clinic(ClinicKind::PastHalf, sech_family(),
                     [](double l) { return line(l * 5.0 * kPi / 6.0); });
  e.expected = {{"asymptotic_clm", -1,
                 "L_lambda sweeps through E^u(-inf) = span(1, -1) once, at lambda = 9/10"}};
  e.oracle = "hand count of the boundary line passing the unstable line";
  return e;
}

CatalogEntry sech_future_fixed() {
  CatalogEntry e;
  e.id = "sech-future-fixed";
  e.description = "sech system on [0, inf) with the Neumann line L = span(e1)";
  e.problem = clinic(ClinicKind::FutureHalf, sech_family(), fixed(line(0.0)));
  const char* why = "the even Poschl-Teller bound state is the only Neumann one on [0, inf)";
  e.expected = {{"ispec", 1, why}, {"irel", 1, why}, {"asymptotic_clm", 0, "constant pair"}};
  e.oracle = "dense Neumann eigensolve of -d^2/dt^2 + 1 - 6 sech^2 t on [0, T]";
  return e;
}

CatalogEntry harmonic() {
  constexpr double K = 6.25;
  CatalogEntry e;
  e.id = "harmonic-bounded";
  e.description = "B = diag(lambda K, 1), K = 6.25, on [0, pi] with L = M = span(e2)";
  BoundedProblem p;
  p.family = harmonic_family(K);
  p.a = 0.0;
  p.b = kPi;
  p.c = 0.5 * kPi;
  p.left = p.right = fixed(line(0.5 * kPi));
  e.problem = p;
  e.expected = {
      {"ispec", 2, "floor(sqrt(K)) Dirichlet eigenvalues of -u'' - K u are negative"},
      {"igeob_w1", 3, "2 conjugate points plus the crossing at t = a"},
      {"igeob_w0", 1, "the crossing at t = a only"},
      {"boundary_clm", 0, "constant boundary pair"}};
  e.oracle = "dense Dirichlet eigensolve of -u'' - lambda K u";
  return e;
}

CatalogEntry rotating_boundary() {
  CatalogEntry e;
  e.id = "rotating-boundary";
  e.description = "B = 0 on [0, 1], L = span(e1), M_lambda = line(-pi/4 + lambda pi/2)";
  BoundedProblem p;
  p.family = zero_family(1);
  p.a = 0.0;
  p.b = 1.0;
  p.c = 0.5;
  p.left = fixed(line(0.0));
  p.right = [](double l) { return line(-0.25 * kPi + 0.5 * l * kPi); };
  e.problem = p;
  e.expected = {{"igeob_w1", 0, "B = 0 keeps both pairs constant in tau"},
                {"igeob_w0", 0, "B = 0 keeps both pairs constant in tau"},
                {"boundary_clm", -1, "M_lambda passes L once, counterclockwise"},
                {"ispec", -1, "the eigenvalue at the relative angle of M_lambda and L crosses 0"}};
  e.oracle = "spectrum of -J d/dt on [0, 1] is the relative boundary angle plus k pi";
  return e;
}

CatalogEntry random_bounded(std::uint64_t seed) {
  CatalogEntry e;
  e.id = "random-bounded-" + std::to_string(seed);
  e.description = "random smooth coefficients on [0, 1] with random constant boundary lines";
  e.problem = random_bounded_problem(seed);
  e.expected = {{"boundary_clm", 0, "constant boundary pair"}};
  e.oracle = "classical index iCLM(M, gamma(t) L) at both ends of the lambda interval";
  return e;
}

}  // namespace

const ClinicProblem& CatalogEntry::clinic() const {
  if (!is_clinic()) throw ConfigError("catalog entry " + id + " is a bounded problem");
  return std::get<ClinicProblem>(problem);
}

const BoundedProblem& CatalogEntry::bounded() const {
  if (is_clinic()) throw ConfigError("catalog entry " + id + " is an h-clinic problem");
  return std::get<BoundedProblem>(problem);
}

const ExpectedIndex* CatalogEntry::find_expected(const std::string& name) const {
  for (const auto& x : expected)
    if (x.name == name) return &x;
  return nullptr;
}

BoundedProblem random_bounded_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  const int n = 1 + static_cast<int>(seed % 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_frame = [&]() {
    Mat S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = 2.0 * u(rng);
    // graph of a symmetric matrix, rotated by a random angle
    Mat F(2 * n, n);
    F << Mat::Identity(n, n), S;
    return LagrangianFrame(rotation(n, kPi * u(rng)) * F);
  };
  BoundedProblem p;
  p.family = random_bounded_family(n, seed);
  p.a = 0.0;
  p.b = 1.0;
  p.c = 0.5;
  p.left = fixed(random_frame());
  p.right = fixed(random_frame());
  return p;
}

std::vector<CatalogEntry> catalog(std::uint64_t seed) {
  return {constant_hyperbolic(), sech_homoclinic(),   sech_future_rotating(),
          sech_past_rotating(),  sech_future_fixed(), harmonic(),
          rotating_boundary(),   random_bounded(seed)};
}

CatalogEntry find_entry(const std::string& id) {
  const std::string prefix = "random-bounded-";
  if (id.rfind(prefix, 0) == 0) {
    const std::string digits = id.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad seed in catalog id " + id);
    return random_bounded(std::stoull(digits));
  }
  for (auto& e : catalog())
    if (e.id == id) return e;
  throw ConfigError("unknown catalog id: " + id);
}

void validate_entry(const CatalogEntry& e) {
  if (e.is_clinic()) {
    const auto& p = e.clinic();
    validate_family(p.family);
    const bool half = p.kind == ClinicKind::FutureHalf || p.kind == ClinicKind::PastHalf;
    if (half && !p.boundary) throw ConfigError(e.id + ": half-clinic entry without boundary");
    if (half)
      for (double l : {0.0, 0.5, 1.0})
        if (p.boundary(l).n() != p.family.n) throw DimensionMismatch(e.id + ": boundary frame");
    return;
  }
  const auto& p = e.bounded();
  if (!(p.b > p.a) || p.c <= p.a || p.c >= p.b) throw ConfigError(e.id + ": bad interval");
  for (double l : {0.0, 0.5, 1.0}) {
    if (p.left(l).n() != p.family.n || p.right(l).n() != p.family.n)
      throw DimensionMismatch(e.id + ": boundary frame");
    const Mat B = p.family.b(l, 0.5 * (p.a + p.b));
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError(e.id + ": coefficients are not symmetric");
  }
}

}  // namespace symflow
