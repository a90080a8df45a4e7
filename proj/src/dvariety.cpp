#include "deltaforge/dvariety.hpp"

#include <algorithm>

namespace deltaforge {

namespace {

const RatExpr& one() {
  static const RatExpr r(lift(1));
  return r;
}

AutoSet generator_set(const DiffRing& ring, const std::vector<DiffPoly>& gens, DerivMask delta) {
  if (gens.empty()) {
    AutoSetResult r = make_autoreduced(ring, {}, delta);
    return std::move(*r.set);
  }
  return require_autoreduced(ring, gens, delta);
}

void check_section_shape(const RelDVar& v) {
  if (v.section.size() != v.part.r())
    throw Error("section needs " + std::to_string(v.part.r()) + " tuples, got " + std::to_string(v.section.size()));
  for (std::size_t i = 0; i < v.section.size(); ++i)
    if (v.section[i].size() != v.xblock.size())
      throw Error("section tuple " + std::to_string(i + 1) + " has arity " + std::to_string(v.section[i].size()) +
                  ", expected " + std::to_string(v.xblock.size()));
}

DVarReport finish(const DiffRing& ring, std::vector<Residue> residues, const std::string& ok_note) {
  DVarReport rep;
  rep.residues = std::move(residues);
  for (const auto& r : rep.residues) {
    if (!r.value.is_zero()) {
      rep.verdict = Verdict::fails(r.value, r.label + ": residue " + ring.format(r.value));
      return rep;
    }
  }
  rep.verdict = Verdict::holds(ok_note);
  return rep;
}

std::string dname(unsigned d) { return "d" + std::to_string(d + 1); }

}  // namespace

DVarReport section_valid(const DiffRing& ring, const RelDVar& v) {
  check_section_shape(v);
  DiffRing tmp = ring;
  const AutoSet gens = generator_set(tmp, v.generators, v.part.delta);
  std::vector<Residue> residues;
  try {
    for (std::size_t i = 0; i < v.part.r(); ++i) {
      const unsigned d = v.part.dist[i];
      const UBlock u = ensure_u_block(tmp, d, v.xblock);
      for (std::size_t k = 0; k < v.generators.size(); ++k) {
        DiffPoly p = d_op(tmp, v.generators[k], d, v.part.delta, u);
        p = substitute_section(tmp, p, u, v.xblock, v.section[i]);
        residues.push_back({"generator " + std::to_string(k + 1) + " along " + dname(d),
                            ritt_reduce(tmp, p, gens).remainder});
      }
    }
  } catch (const LimitExceeded& e) {
    return {Verdict::unknown(e.what()), residues};
  }
  return finish(ring, std::move(residues), v.generators.empty() ? "no generators" : "every residue reduces to 0");
}

DVarReport integrability_check(const DiffRing& ring, const RelDVar& v) {
  check_section_shape(v);
  DiffRing tmp = ring;
  const AutoSet gens = generator_set(tmp, v.generators, v.part.delta);
  std::vector<UBlock> blocks;
  for (unsigned d : v.part.dist) blocks.push_back(ensure_u_block(tmp, d, v.xblock));
  std::vector<Residue> residues;
  try {
    for (std::size_t i = 0; i < v.part.r(); ++i) {
      for (std::size_t j = i + 1; j < v.part.r(); ++j) {
        const unsigned di = v.part.dist[i];
        const unsigned dj = v.part.dist[j];
        for (std::size_t k = 0; k < v.xblock.size(); ++k) {
          DiffPoly a = d_op(tmp, v.section[j][k], di, v.part.delta, blocks[i]);
          a = substitute_section(tmp, a, blocks[i], v.xblock, v.section[i]);
          DiffPoly b = d_op(tmp, v.section[i][k], dj, v.part.delta, blocks[j]);
          b = substitute_section(tmp, b, blocks[j], v.xblock, v.section[j]);
          residues.push_back({"pair (" + dname(di) + "," + dname(dj) + ") component " +
                                  ring.variables()[v.xblock[k]],
                              ritt_reduce(tmp, a - b, gens).remainder});
        }
      }
    }
  } catch (const LimitExceeded& e) {
    return {Verdict::unknown(e.what()), residues};
  }
  return finish(ring, std::move(residues), v.part.r() < 2 ? "no pairs" : "every residue reduces to 0");
}

Verdict linear_integrability(const DiffRing& ring, const Partition& part, const std::vector<BaseMatrix>& a) {
  if (a.size() != part.r())
    throw Error("linear-int needs one matrix per distinguished derivation (" + std::to_string(part.r()) + ")");
  for (const auto& m : a)
    if (!m.square() || m.rows() != a.front().rows()) throw Error("matrices must be square and of a common size");
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const unsigned di = part.dist[i];
      const unsigned dj = part.dist[j];
      auto deriv = [&](unsigned d, const BaseMatrix& m) {
        return m.map([&](const BaseElem& e) { return apply_delta_base(ring.base(), d, e); });
      };
      const BaseMatrix res = deriv(di, a[j]) - deriv(dj, a[i]) - (a[i] * a[j] - a[j] * a[i]);
      for (std::size_t r = 0; r < res.rows(); ++r)
        for (std::size_t c = 0; c < res.cols(); ++c)
          if (!res(r, c).is_zero())
            return Verdict::fails(lift(res(r, c)), "pair (" + dname(di) + "," + dname(dj) + ") entry (" +
                                                       std::to_string(r + 1) + "," + std::to_string(c + 1) +
                                                       "): " + ring.base().format(res(r, c)));
    }
  }
  return Verdict::holds(a.size() < 2 ? "no pairs" : "all integrability conditions vanish");
}

std::string GroupFactor::name() const {
  switch (kind) {
    case Kind::Ga: return "Ga";
    case Kind::Gm: return "Gm";
    case Kind::GL: return "GL(" + std::to_string(n) + ")";
  }
  return "?";
}

GroupExpr::GroupExpr(std::vector<GroupFactor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error("empty group expression");
  for (const auto& f : factors_)
    if (f.kind == GroupFactor::Kind::GL && (f.n < 1 || f.n > 3)) throw Error("GL(n) is supported for n <= 3");
}

std::size_t GroupExpr::dim() const {
  std::size_t d = 0;
  for (const auto& f : factors_) d += f.dim();
  return d;
}

std::string GroupExpr::describe() const {
  std::string s;
  for (const auto& f : factors_) s += (s.empty() ? "" : " x ") + f.name();
  return s;
}

namespace {

Matrix<RatExpr> as_matrix(const Tuple& t, std::size_t off, unsigned n) {
  Matrix<RatExpr> m(n, n);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < n; ++j) m(i, j) = t.at(off + i * n + j);
  return m;
}

void append(Tuple& out, const Matrix<RatExpr>& m) { out.insert(out.end(), m.data().begin(), m.data().end()); }

Matrix<RatExpr> matrix_inverse(const Matrix<RatExpr>& m) {
  const RatExpr inv_det = determinant(m, one()).inverse();
  return adjugate(m, one()).map([&](const RatExpr& e) { return e * inv_det; });
}

void check_arity(const GroupExpr& g, const Tuple& t) {
  if (t.size() != g.dim()) throw Error("group element has the wrong number of coordinates");
}

}  // namespace

Tuple GroupExpr::identity() const {
  Tuple out;
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Ga)
      out.emplace_back();
    else if (f.kind == GroupFactor::Kind::Gm)
      out.push_back(one());
    else
      append(out, Matrix<RatExpr>::identity(f.n, one()));
  }
  return out;
}

Tuple GroupExpr::mul(const Tuple& g, const Tuple& h) const {
  check_arity(*this, g);
  check_arity(*this, h);
  Tuple out;
  std::size_t off = 0;
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Ga)
      out.push_back(g[off] + h[off]);
    else if (f.kind == GroupFactor::Kind::Gm)
      out.push_back(g[off] * h[off]);
    else
      append(out, as_matrix(g, off, f.n) * as_matrix(h, off, f.n));
    off += f.dim();
  }
  return out;
}

Tuple GroupExpr::inverse(const Tuple& g) const {
  check_arity(*this, g);
  Tuple out;
  std::size_t off = 0;
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Ga)
      out.push_back(-g[off]);
    else if (f.kind == GroupFactor::Kind::Gm)
      out.push_back(g[off].inverse());
    else
      append(out, matrix_inverse(as_matrix(g, off, f.n)));
    off += f.dim();
  }
  return out;
}

Tuple GroupExpr::d_left(const Tuple& g, const Tuple& h, const Tuple& v) const {
  check_arity(*this, h);
  check_arity(*this, v);
  Tuple out;
  std::size_t off = 0;
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Ga)
      out.push_back(v[off]);
    else if (f.kind == GroupFactor::Kind::Gm)
      out.push_back(g[off] * v[off]);
    else
      append(out, as_matrix(g, off, f.n) * as_matrix(v, off, f.n));
    off += f.dim();
  }
  return out;
}

Tuple GroupExpr::d_right(const Tuple& g, const Tuple& h, const Tuple& u) const {
  check_arity(*this, g);
  check_arity(*this, u);
  Tuple out;
  std::size_t off = 0;
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Ga)
      out.push_back(u[off]);
    else if (f.kind == GroupFactor::Kind::Gm)
      out.push_back(u[off] * h[off]);
    else
      append(out, as_matrix(u, off, f.n) * as_matrix(h, off, f.n));
    off += f.dim();
  }
  return out;
}

Tuple GroupExpr::d_conj(const Tuple& g, const Tuple& w) const {
  check_arity(*this, g);
  check_arity(*this, w);
  Tuple out;
  std::size_t off = 0;
  for (const auto& f : factors_) {
    if (f.kind == GroupFactor::Kind::Ga) {
      out.push_back(w[off]);
    } else if (f.kind == GroupFactor::Kind::Gm) {
      const RatExpr gi = g[off].inverse();
      out.push_back(gi * w[off] * gi);
    } else {
      const Matrix<RatExpr> gi = matrix_inverse(as_matrix(g, off, f.n));
      append(out, gi * as_matrix(w, off, f.n) * gi);
    }
    off += f.dim();
  }
  return out;
}

Tuple TauPoint::flatten() const {
  Tuple out = base;
  for (const auto& b : u) out.insert(out.end(), b.begin(), b.end());
  return out;
}

namespace {

Tuple add(const Tuple& a, const Tuple& b) {
  Tuple out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

Tuple sub(const Tuple& a, const Tuple& b) {
  Tuple out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

Tuple derive(const DiffRing& ring, unsigned d, const Tuple& t) {
  Tuple out;
  for (const auto& e : t) out.push_back(apply_delta(ring, d, e));
  return out;
}

}  // namespace

TauPoint tau_identity(const GroupExpr& g, const Partition& part) {
  return {g.identity(), std::vector<Tuple>(part.r(), Tuple(g.dim()))};
}

TauPoint tau_mul(const GroupExpr& g, const TauPoint& a, const TauPoint& b) {
  if (a.u.size() != b.u.size()) throw Error("tau points over different partitions");
  TauPoint out;
  out.base = g.mul(a.base, b.base);
  // p^{D_i}(g, h) vanishes: catalog group laws have rational coefficients.
  for (std::size_t i = 0; i < a.u.size(); ++i)
    out.u.push_back(add(g.d_left(a.base, b.base, b.u[i]), g.d_right(a.base, b.base, a.u[i])));
  return out;
}

TauPoint tau_inverse(const DiffRing& ring, const GroupExpr& g, const Partition& part, const TauPoint& a) {
  TauPoint out;
  out.base = g.inverse(a.base);
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    const unsigned d = part.dist.at(i);
    out.u.push_back(add(g.d_conj(a.base, sub(derive(ring, d, a.base), a.u[i])), derive(ring, d, out.base)));
  }
  return out;
}

TauPoint nabla_point(const DiffRing& ring, const Partition& part, const Tuple& g) {
  TauPoint p{g, {}};
  for (unsigned d : part.dist) p.u.push_back(derive(ring, d, g));
  return p;
}

TauPoint section_point(const DiffRing& ring, const std::vector<std::uint32_t>& coords,
                       const std::vector<std::vector<DiffPoly>>& s, const Tuple& g) {
  if (g.size() != coords.size()) throw Error("point arity does not match the coordinates");
  std::map<std::uint32_t, RatExpr> images;
  for (std::size_t k = 0; k < coords.size(); ++k) images[coords[k]] = g[k];
  TauPoint p{g, {}};
  for (const auto& si : s) {
    Tuple t;
    for (const auto& e : si) t.push_back(substitute_rat(ring, e, images));
    p.u.push_back(std::move(t));
  }
  return p;
}

Tuple coordinate_tuple(const DiffRing& ring, const std::vector<std::uint32_t>& coords) {
  Tuple t;
  for (auto c : coords) t.emplace_back(ring.var(c));
  return t;
}

void validate(const DiffRing& ring, const GroupSection& gs) {
  if (gs.coords.size() != gs.group.dim())
    throw Error(gs.group.describe() + " needs " + std::to_string(gs.group.dim()) + " coordinates, got " +
                std::to_string(gs.coords.size()));
  if (gs.s.size() != gs.part.r())
    throw Error("section needs one tuple per distinguished derivation (" + std::to_string(gs.part.r()) + ")");
  for (const auto& si : gs.s) {
    if (si.size() != gs.coords.size()) throw Error("s is not a section of tau G: tuple arity mismatch");
    for (const auto& e : si) {
      if (!uses_only(e, gs.part.delta)) throw Error("s is not a section of tau G: " + ring.format(e) +
                                                    " involves a distinguished derivation");
      for (const auto& v : e.variables())
        if (std::find(gs.coords.begin(), gs.coords.end(), v.var) == gs.coords.end())
          throw Error("s is not a section of tau G: " + ring.format(e) + " leaves the coordinate block");
    }
  }
}

TauPoint log_derivative(const DiffRing& ring, const GroupSection& gs) {
  validate(ring, gs);
  const Tuple g = coordinate_tuple(ring, gs.coords);
  const TauPoint sg = section_point(ring, gs.coords, gs.s, g);
  return tau_mul(gs.group, nabla_point(ring, gs.part, g), tau_inverse(ring, gs.group, gs.part, sg));
}

bool equal_tuples(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != b[k]) return false;
  return true;
}

namespace {

Verdict compare_points(const DiffRing& ring, const Tuple& lhs, const Tuple& rhs, const std::string& what) {
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (lhs[k] != rhs[k]) {
      const DiffPoly diff = lhs[k].num() * rhs[k].den() - rhs[k].num() * lhs[k].den();
      return Verdict::fails(diff, what + " differs in component " + std::to_string(k + 1) + ": " +
                                      format(ring, lhs[k]) + " vs " + format(ring, rhs[k]));
    }
  }
  return Verdict::holds();
}

}  // namespace

Verdict crossed_hom_check(DiffRing ring, const GroupSection& gs) {
  validate(ring, gs);
  std::vector<std::uint32_t> hcoords;
  for (auto c : gs.coords) {
    std::string name = "h_" + ring.variables()[c];
    while (ring.find_variable(name) || ring.base().find_constant(name)) name = "h_" + name;
    hcoords.push_back(ring.add_variable(name));
  }
  const Tuple g = coordinate_tuple(ring, gs.coords);
  const Tuple h = coordinate_tuple(ring, hcoords);
  auto ell = [&](const Tuple& x) {
    const TauPoint sx = section_point(ring, gs.coords, gs.s, x);
    return tau_mul(gs.group, nabla_point(ring, gs.part, x), tau_inverse(ring, gs.group, gs.part, sx));
  };
  const TauPoint lhs = ell(gs.group.mul(g, h));
  const TauPoint u = section_point(ring, gs.coords, gs.s, g);
  const TauPoint conj =
      tau_mul(gs.group, tau_mul(gs.group, u, ell(h)), tau_inverse(ring, gs.group, gs.part, u));
  const TauPoint rhs = tau_mul(gs.group, ell(g), conj);
  Verdict v = compare_points(ring, lhs.flatten(), rhs.flatten(), "l(gh) against l(g)*(g*l(h))");
  if (v.is_holds()) v.detail = "l(gh) = l(g)*(u l(h) u^-1) on generic coordinates";
  return v;
}

Verdict kernel_law_check(const DiffRing& ring, const GroupSection& gs) {
  const TauPoint ell = log_derivative(ring, gs);
  std::map<AlgInd, DiffPoly> sharp;
  for (std::size_t i = 0; i < gs.part.r(); ++i)
    for (std::size_t k = 0; k < gs.coords.size(); ++k)
      sharp[AlgInd{gs.coords[k], DerivOp::unit(gs.part.dist[i])}] = gs.s[i][k];
  Tuple got;
  for (const auto& e : ell.flatten()) got.push_back(substitute_indeterminates(e, sharp));
  Verdict v = compare_points(ring, got, tau_identity(gs.group, gs.part).flatten(), "l_s on sharp points");
  if (v.is_holds()) v.detail = "l_s vanishes on sharp points";
  return v;
}

DVarReport group_integrability(const DiffRing& ring, const GroupSection& gs) {
  validate(ring, gs);
  return integrability_check(ring, RelDVar{{}, gs.part, gs.coords, gs.s});
}

}  // namespace deltaforge
