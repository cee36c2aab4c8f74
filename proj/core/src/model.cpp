#include "sdfp/model.hpp"

#include <cmath>

#include "sdfp/errors.hpp"
#include "sdfp/linalg.hpp"
#include "sdfp/symlin.hpp"

namespace sdfp {

const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::StronglyFeasible: return "StronglyFeasible";
    case FeasibilityStatus::WeaklyFeasible: return "WeaklyFeasible";
    case FeasibilityStatus::WeaklyInfeasible: return "WeaklyInfeasible";
    case FeasibilityStatus::StronglyInfeasible: return "StronglyInfeasible";
  }
  return "?";
}

std::optional<FeasibilityStatus> status_from_string(const std::string& s) {
  if (s == "StronglyFeasible" || s == "strongly_feasible") return FeasibilityStatus::StronglyFeasible;
  if (s == "WeaklyFeasible" || s == "weakly_feasible") return FeasibilityStatus::WeaklyFeasible;
  if (s == "WeaklyInfeasible" || s == "weakly_infeasible") return FeasibilityStatus::WeaklyInfeasible;
  if (s == "StronglyInfeasible" || s == "strongly_infeasible") return FeasibilityStatus::StronglyInfeasible;
  return std::nullopt;
}

int status_exit_code(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::StronglyFeasible: return 0;
    case FeasibilityStatus::WeaklyFeasible: return 1;
    case FeasibilityStatus::WeaklyInfeasible: return 2;
    case FeasibilityStatus::StronglyInfeasible: return 3;
  }
  return 64;
}

AffineSubspace AffineSubspace::make(int n, const std::vector<SymMatrix>& raw_basis,
                                    const SymMatrix& anchor, double prune_tol) {
  if (anchor.dim() != n) throw DimensionMismatch("anchor dimension mismatch");
  std::vector<std::vector<double>> rows;
  rows.reserve(raw_basis.size());
  for (const auto& b : raw_basis) {
    if (b.dim() != n) throw DimensionMismatch("basis element dimension mismatch");
    rows.push_back(b.svec());
  }
  AffineSubspace out;
  out.n = n;
  out.anchor = anchor;
  for (const auto& q : orthonormalize(rows, prune_tol))
    out.basis.push_back(SymMatrix::from_svec(n, q));
  return out;
}

AffineSubspace AffineSubspace::span_of(int n, const std::vector<SymMatrix>& raw_basis,
                                       double prune_tol) {
  return make(n, raw_basis, SymMatrix(n), prune_tol);
}

SymMatrix AffineSubspace::project_span(const SymMatrix& s) const {
  if (s.dim() != n) throw DimensionMismatch("project_span dimension mismatch");
  SymMatrix acc(n);
  for (const auto& b : basis) {
    const double dot = b.inner(s);
    SymMatrix t = b;
    t *= dot;
    acc += t;
  }
  return acc;
}

double AffineSubspace::off_span(const SymMatrix& s) const {
  SymMatrix r = s;
  r -= project_span(s);
  return r.frob();
}

bool AffineSubspace::contains_point(const SymMatrix& x, double tol) const {
  if (x.dim() != n) return false;
  SymMatrix d = x;
  d -= anchor;
  return off_span(d) <= tol * (1.0 + x.frob());
}

SymMatrix pi(const SymMatrix& s, int k) {
  if (k < 0 || k > s.dim()) throw IndexOutOfRange("pi: block size out of range");
  return s.block(0, k);
}

SymMatrix pibar(const SymMatrix& s, int k) {
  if (k < 0 || k > s.dim()) throw IndexOutOfRange("pibar: block size out of range");
  return s.block(k, s.dim() - k);
}

Problem project_problem(const Problem& p, ProjectKind kind, int k, double prune_tol) {
  const auto apply = [&](const SymMatrix& s) {
    return kind == ProjectKind::Upper ? pi(s, k) : pibar(s, k);
  };
  const int m = kind == ProjectKind::Upper ? k : p.n() - k;
  std::vector<SymMatrix> images;
  images.reserve(p.space.basis.size());
  for (const auto& b : p.space.basis) images.push_back(apply(b));
  return Problem{AffineSubspace::make(m, images, apply(p.space.anchor), prune_tol)};
}

AffineSubspace orthogonal_complement(const AffineSubspace& l) {
  const int n = l.n;
  const int full = tri_size(n);
  const int want = full - l.dim();

  std::vector<std::vector<double>> q;
  q.reserve(l.dim());
  for (const auto& b : l.basis) q.push_back(b.svec());

  AffineSubspace out;
  out.n = n;
  out.anchor = SymMatrix(n);
  for (int t = 0; t < full && static_cast<int>(out.basis.size()) < want; ++t) {
    std::vector<double> v(full, 0.0);
    v[t] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) {
        double dot = 0.0;
        for (int s = 0; s < full; ++s) dot += u[s] * v[s];
        for (int s = 0; s < full; ++s) v[s] -= dot * u[s];
      }
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > 1e-8) {
      for (double& x : v) x /= nrm;
      q.push_back(v);
      out.basis.push_back(SymMatrix::from_svec(n, v));
    }
  }
  if (static_cast<int>(out.basis.size()) != want)
    throw Error("orthogonal_complement: dimension count failed");
  return out;
}

Problem strong_infeasibility_system(const Problem& p, const Tolerances& tol) {
  const SymMatrix& c = p.space.anchor;
  const double cn = c.frob();
  if (cn <= tol.lin) throw ZeroAnchor("anchor is numerically zero");
  std::vector<SymMatrix> gens = p.space.basis;
  gens.push_back(c);
  const AffineSubspace joint = AffineSubspace::span_of(p.n(), gens);
  AffineSubspace si = orthogonal_complement(joint);
  SymMatrix cs = c;
  cs *= -1.0 / (cn * cn);
  si.anchor = cs;
  return Problem{si};
}

namespace {

// svec coordinates of the entries outside the upper-left m x m block.
std::vector<int> outside_coords(int n, int m) {
  std::vector<int> idx;
  int t = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++t)
      if (j >= m) idx.push_back(t);
  return idx;
}

} // namespace

std::optional<Problem> slice_upper_corner(const Problem& p, int m, const Tolerances& tol) {
  const int n = p.n();
  if (m <= 0 || m > n) throw IndexOutOfRange("slice_upper_corner: bad corner size");
  if (m == n) return p;

  const auto coords = outside_coords(n, m);
  const int d = p.space.dim();
  Matrix a(static_cast<int>(coords.size()), d);
  std::vector<double> rhs(coords.size(), 0.0);
  const auto cv = p.space.anchor.svec();
  std::vector<std::vector<double>> bv;
  bv.reserve(d);
  for (const auto& b : p.space.basis) bv.push_back(b.svec());
  for (size_t r = 0; r < coords.size(); ++r) {
    rhs[r] = -cv[coords[r]];
    for (int j = 0; j < d; ++j) a(static_cast<int>(r), j) = bv[j][coords[r]];
  }

  const auto ls = least_squares(a, rhs, tol.rank, /*with_nullspace=*/true);
  if (ls.residual > tol.lin * (1.0 + p.space.anchor.frob())) return std::nullopt;

  SymMatrix anchor = p.space.anchor;
  for (int j = 0; j < d; ++j) {
    SymMatrix t = p.space.basis[j];
    t *= ls.solution[j];
    anchor += t;
  }
  std::vector<SymMatrix> gens;
  for (const auto& nv : ls.nullspace) {
    SymMatrix g(n);
    for (int j = 0; j < d; ++j) {
      SymMatrix t = p.space.basis[j];
      t *= nv[j];
      g += t;
    }
    gens.push_back(g);
  }

  std::vector<SymMatrix> reduced;
  reduced.reserve(gens.size());
  for (const auto& g : gens) reduced.push_back(pi(g, m));
  return Problem{AffineSubspace::make(m, reduced, pi(anchor, m))};
}

Problem congruence_problem(const Matrix& p, const Problem& prob, const Tolerances& tol) {
  std::vector<SymMatrix> basis;
  basis.reserve(prob.space.basis.size());
  for (const auto& b : prob.space.basis) basis.push_back(congruence(p, b, tol));
  return Problem{AffineSubspace::make(prob.n(), basis, congruence(p, prob.space.anchor, tol))};
}

bool subspace_equal(const AffineSubspace& a, const AffineSubspace& b, double tol) {
  if (a.n != b.n || a.dim() != b.dim()) return false;
  for (const auto& v : a.basis)
    if (b.off_span(v) > tol * (1.0 + v.frob())) return false;
  return true;
}

bool affine_equal(const Problem& a, const Problem& b, double tol) {
  if (!subspace_equal(a.space, b.space, tol)) return false;
  SymMatrix d = a.space.anchor;
  d -= b.space.anchor;
  return a.space.off_span(d) <= tol * (1.0 + a.space.anchor.frob() + b.space.anchor.frob());
}

} // namespace sdfp
