#include "bkvem/projectors.hpp"

#include <string>

#include <Eigen/LU>

namespace bkvem {

namespace {

double sign_pow(int sign, int j) { return (sign < 0 && j % 2 == 1) ? -1.0 : 1.0; }

// Integral of xi^p over [-1/2, 1/2].
double xi_integral(int p) { return p % 2 == 1 ? 0.0 : std::pow(0.5, p) / (p + 1); }

Eigen::MatrixXd solve_checked(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const ElementGeometry& g,
                              const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw Error(std::string("singular ") + what + " system on element " + std::to_string(g.cell));
  return lu.solve(b);
}

// Gram block of edge monomials with orientation sign: rows are the moment
// conditions int (sign xi)^j phi_i dxi.
Eigen::RowVectorXd moment_row(int degree, int j, int sign) {
  Eigen::RowVectorXd r(degree + 1);
  for (int i = 0; i <= degree; ++i) r[i] = sign_pow(sign, j) * xi_integral(i + j);
  return r;
}

Eigen::RowVectorXd point_row(int degree, double xi) { return edge_monomials(xi, degree).transpose(); }
Eigen::RowVectorXd slope_row(int degree, double xi) { return edge_monomials_derivative(xi, degree).transpose(); }

// Rows of interior moments int_K v m_a taken directly from cell DoFs.
Eigen::MatrixXd cell_moment_rows(const ElementGeometry& g, const LocalLayout& lay, int degree) {
  const int n = poly_dim(degree);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, lay.size());
  for (int a = 0; a < n; ++a) m(a, lay.cell(a)) = g.area;
  return m;
}

// Projection onto P_{m-1}(e) from m oriented moments starting at `first`.
Eigen::MatrixXd moment_trace(const LocalLayout& lay, int edge, int sign, int count, bool normal, double length) {
  const int deg = count - 1;
  Eigen::MatrixXd a(count, count), r = Eigen::MatrixXd::Zero(count, lay.size());
  for (int j = 0; j < count; ++j) {
    a.row(j) = moment_row(deg, j, sign);
    if (normal) {
      // int_e d_{n_e} v (sign xi)^j = sign * h * int d_{n_K} v (sign xi)^j dxi
      r(j, lay.edge_normal(edge, j)) = sign / length;
    } else {
      r(j, lay.edge_value(edge, j)) = 1.0;
    }
  }
  return a.partialPivLu().solve(r);
}

Eigen::MatrixXd stiffness_matrix(const ElementGeometry& g, const ScaledMonomialBasis& b) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (std::size_t q = 0; q < g.cell_rule.size(); ++q) {
    const Eigen::VectorXd dx = b.eval(g.cell_rule.points[q], 1, 0);
    const Eigen::VectorXd dy = b.eval(g.cell_rule.points[q], 0, 1);
    k += g.cell_rule.weights[q] * (dx * dx.transpose() + dy * dy.transpose());
  }
  return k;
}

// pg of the given degree: (grad P v, grad m) = -(v, lap m) + (v, d_n m)_{dK},
// constant fixed by the vertex average or by the boundary integral.
Eigen::MatrixXd ritz_projection(const ElementGeometry& g, int degree, const Eigen::MatrixXd& interior,
                                const std::vector<EdgeTrace>& traces, const LocalLayout& lay,
                                bool boundary_constant) {
  const ScaledMonomialBasis b(g.centroid, g.h, degree);
  const int nd = lay.size();
  Eigen::MatrixXd lhs = stiffness_matrix(g, b);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(b.size(), nd);
  if (degree >= 2) {
    const Eigen::MatrixXd lap = b.derivative_matrix(2, 0) + b.derivative_matrix(0, 2);
    rhs -= lap.transpose() * interior.topRows(lap.rows());
  }
  Eigen::RowVectorXd lhs0 = Eigen::RowVectorXd::Zero(b.size());
  Eigen::RowVectorXd rhs0 = Eigen::RowVectorXd::Zero(nd);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const ElementEdge& e = g.edges[i];
    const LineRule lr = line_rule(degree + traces[i].value_degree() + 1);
    for (std::size_t q = 0; q < lr.xi.size(); ++q) {
      const Point2 x = e.point(lr.xi[q]);
      const double w = e.length * lr.weights[q];
      const Eigen::RowVectorXd v = trace_row(traces[i].value, lr.xi[q]);
      const Eigen::VectorXd dn = e.n.x * b.eval(x, 1, 0) + e.n.y * b.eval(x, 0, 1);
      rhs += w * dn * v;
      if (boundary_constant) {
        lhs0 += w * b.eval(x).transpose();
        rhs0 += w * v;
      }
    }
  }
  if (!boundary_constant) {
    const int n = g.num_vertices();
    for (int i = 0; i < n; ++i) {
      lhs0 += b.eval(g.vertices[i]).transpose() / n;
      rhs0[lay.vertex(i, 0)] += 1.0 / n;
    }
  }
  lhs.row(0) = lhs0;
  rhs.row(0) = rhs0;
  return solve_checked(lhs, rhs, g, "ritz projection");
}

std::array<Eigen::MatrixXd, 2> gradient_projection(const ElementGeometry& g, int degree,
                                                   const Eigen::MatrixXd& interior,
                                                   const std::vector<EdgeTrace>& traces, int nd) {
  const ScaledMonomialBasis b(g.centroid, g.h, degree);
  const Eigen::MatrixXd mass = mass_matrix(g, degree, degree);
  std::array<Eigen::MatrixXd, 2> out;
  for (int a = 0; a < 2; ++a) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(b.size(), nd);
    if (degree >= 1) {
      const Eigen::MatrixXd d = b.derivative_matrix(a == 0 ? 1 : 0, a == 0 ? 0 : 1);
      rhs -= d.transpose() * interior.topRows(d.rows());
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const ElementEdge& e = g.edges[i];
      const double na = a == 0 ? e.n.x : e.n.y;
      const LineRule lr = line_rule(degree + traces[i].value_degree() + 1);
      for (std::size_t q = 0; q < lr.xi.size(); ++q) {
        const double w = e.length * lr.weights[q] * na;
        rhs += w * b.eval(e.point(lr.xi[q])) * trace_row(traces[i].value, lr.xi[q]);
      }
    }
    out[a] = solve_checked(mass, rhs, g, "gradient projection");
  }
  return out;
}

}  // namespace

Eigen::RowVectorXd trace_row(const Eigen::MatrixXd& coeffs, double xi) {
  return edge_monomials(xi, static_cast<int>(coeffs.rows()) - 1).transpose() * coeffs;
}

Eigen::MatrixXd mass_matrix(const ElementGeometry& g, int da, int db) {
  const ScaledMonomialBasis ba(g.centroid, g.h, std::max(da, 0)), bb(g.centroid, g.h, std::max(db, 0));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(poly_dim(da), poly_dim(db));
  if (da < 0 || db < 0) return m;
  for (std::size_t q = 0; q < g.cell_rule.size(); ++q)
    m += g.cell_rule.weights[q] * ba.eval(g.cell_rule.points[q]) * bb.eval(g.cell_rule.points[q]).transpose();
  return m;
}

Eigen::MatrixXd dofs_of_monomials(const ElementGeometry& g, SpaceKind s, int degree) {
  const LocalLayout lay(s, g.num_vertices());
  const ScaledMonomialBasis b(g.centroid, g.h, degree);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(lay.size(), b.size());
  const int n = g.num_vertices();
  for (int i = 0; i < n && lay.e.per_vertex > 0; ++i) {
    d.row(lay.vertex(i, 0)) = b.eval(g.vertices[i]).transpose();
    if (lay.e.per_vertex == 3) {
      d.row(lay.vertex(i, 1)) = g.vertex_h[i] * b.eval(g.vertices[i], 1, 0).transpose();
      d.row(lay.vertex(i, 2)) = g.vertex_h[i] * b.eval(g.vertices[i], 0, 1).transpose();
    }
  }
  const LineRule lr = line_rule(2 * degree + 2);
  for (int i = 0; i < n; ++i) {
    const ElementEdge& e = g.edges[i];
    for (std::size_t q = 0; q < lr.xi.size(); ++q) {
      const double xi = lr.xi[q], w = lr.weights[q];
      const Point2 x = e.point(xi);
      if (lay.e.edge_normal > 0) {
        const Eigen::VectorXd dn = e.n.x * b.eval(x, 1, 0) + e.n.y * b.eval(x, 0, 1);
        for (int j = 0; j < lay.e.edge_normal; ++j)
          d.row(lay.edge_normal(i, j)) +=
              (e.sign * sign_pow(e.sign, j) * e.length * w * edge_monomial(xi, j)) * dn.transpose();
      }
      if (lay.e.edge_value > 0) {
        const Eigen::VectorXd v = b.eval(x);
        for (int j = 0; j < lay.e.edge_value; ++j)
          d.row(lay.edge_value(i, j)) += (sign_pow(e.sign, j) * w * edge_monomial(xi, j)) * v.transpose();
      }
    }
  }
  if (lay.e.per_cell > 0) {
    const int cdeg = s.field == Field::Deflection ? s.degree - 4 : s.degree - 2;
    const ScaledMonomialBasis c(g.centroid, g.h, cdeg);
    for (std::size_t q = 0; q < g.cell_rule.size(); ++q) {
      const Point2 x = g.cell_rule.points[q];
      const Eigen::VectorXd cm = c.eval(x), bm = b.eval(x);
      for (int a = 0; a < c.size(); ++a)
        d.row(lay.cell(a)) += (g.cell_rule.weights[q] * cm[a] / g.area) * bm.transpose();
    }
  }
  return d;
}

DeflectionProjectors compute_deflection_projectors(const ElementGeometry& g, SpaceKind s,
                                                   const ProjectorOptions& opts) {
  if (s.field != Field::Deflection) throw Error("deflection projectors need a deflection space");
  const int k = s.degree;
  const bool conforming = s.family == Family::Conforming;
  const int n = g.num_vertices();
  const LocalLayout lay(s, n);
  const int nd = lay.size();

  DeflectionProjectors p;
  p.space = s;
  p.ndof = nd;
  p.basis = ScaledMonomialBasis(g.centroid, g.h, k);
  p.dof_matrix = dofs_of_monomials(g, s, k);
  const int nk = p.basis.size();
  const Eigen::MatrixXd cells = cell_moment_rows(g, lay, k - 4);

  // Boundary data for the energy projection. The nonconforming value trace
  // needed there is the projection onto P_{k-3}(e) given by the moments.
  p.traces.resize(n);
  std::vector<Eigen::MatrixXd> low_value(n);
  for (int i = 0; i < n; ++i) {
    const ElementEdge& e = g.edges[i];
    EdgeTrace& tr = p.traces[i];
    if (conforming) {
      const int r = std::max(k, 3);
      const int ip = (i + 1) % n;
      Eigen::MatrixXd a(r + 1, r + 1), rhs = Eigen::MatrixXd::Zero(r + 1, nd);
      a.row(0) = point_row(r, -0.5);
      rhs(0, lay.vertex(i, 0)) = 1.0;
      a.row(1) = point_row(r, 0.5);
      rhs(1, lay.vertex(ip, 0)) = 1.0;
      a.row(2) = slope_row(r, -0.5) / e.length;
      rhs(2, lay.vertex(i, 1)) = e.t.x / g.vertex_h[i];
      rhs(2, lay.vertex(i, 2)) = e.t.y / g.vertex_h[i];
      a.row(3) = slope_row(r, 0.5) / e.length;
      rhs(3, lay.vertex(ip, 1)) = e.t.x / g.vertex_h[ip];
      rhs(3, lay.vertex(ip, 2)) = e.t.y / g.vertex_h[ip];
      for (int j = 0; j < lay.e.edge_value; ++j) {
        a.row(4 + j) = moment_row(r, j, e.sign);
        rhs(4 + j, lay.edge_value(i, j)) = 1.0;
      }
      tr.value = a.partialPivLu().solve(rhs);

      Eigen::MatrixXd an(k, k), rn = Eigen::MatrixXd::Zero(k, nd);
      an.row(0) = point_row(k - 1, -0.5);
      rn(0, lay.vertex(i, 1)) = e.n.x / g.vertex_h[i];
      rn(0, lay.vertex(i, 2)) = e.n.y / g.vertex_h[i];
      an.row(1) = point_row(k - 1, 0.5);
      rn(1, lay.vertex(ip, 1)) = e.n.x / g.vertex_h[ip];
      rn(1, lay.vertex(ip, 2)) = e.n.y / g.vertex_h[ip];
      for (int j = 0; j < lay.e.edge_normal; ++j) {
        an.row(2 + j) = moment_row(k - 1, j, e.sign);
        rn(2 + j, lay.edge_normal(i, j)) = e.sign / e.length;
      }
      tr.normal = an.partialPivLu().solve(rn);
      low_value[i] = tr.value;
    } else {
      tr.normal = moment_trace(lay, i, e.sign, k - 1, true, e.length);
      low_value[i] = k >= 3 ? moment_trace(lay, i, e.sign, k - 2, false, e.length)
                            : Eigen::MatrixXd::Zero(1, nd);
    }
  }

  // Energy projection.
  {
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(nk, nk);
    for (std::size_t q = 0; q < g.cell_rule.size(); ++q) {
      const Point2 x = g.cell_rule.points[q];
      const Eigen::VectorXd hxx = p.basis.eval(x, 2, 0), hxy = p.basis.eval(x, 1, 1), hyy = p.basis.eval(x, 0, 2);
      lhs += g.cell_rule.weights[q] *
             (hxx * hxx.transpose() + 2.0 * hxy * hxy.transpose() + hyy * hyy.transpose());
    }
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, nd);
    if (k >= 4) {
      const Eigen::MatrixXd b4 = p.basis.derivative_matrix(4, 0) + 2.0 * p.basis.derivative_matrix(2, 2) +
                                 p.basis.derivative_matrix(0, 4);
      rhs += b4.transpose() * cells;
    }
    for (int i = 0; i < n; ++i) {
      const ElementEdge& e = g.edges[i];
      const LineRule lr = line_rule(2 * k + 2);
      for (std::size_t q = 0; q < lr.xi.size(); ++q) {
        const Point2 x = e.point(lr.xi[q]);
        const double w = e.length * lr.weights[q];
        const Eigen::VectorXd nn = p.basis.mixed_second(x, e.n, e.n);
        rhs += w * nn * trace_row(p.traces[i].normal, lr.xi[q]);
        if (k >= 3) rhs -= w * p.basis.edge_operator_t(x, e.n, e.t) * trace_row(low_value[i], lr.xi[q]);
      }
    }
    for (int c : g.sides.corners) {
      const ElementEdge& prev = g.edges[(c + n - 1) % n];
      const ElementEdge& next = g.edges[c];
      const Point2 z = g.vertices[c];
      rhs.col(lay.vertex(c, 0)) += p.basis.mixed_second(z, prev.n, prev.t) - p.basis.mixed_second(z, next.n, next.t);
    }
    // Affine part.
    lhs.topRows(3).setZero();
    rhs.topRows(3).setZero();
    for (int i = 0; i < n; ++i) {
      lhs.row(0) += p.basis.eval(g.vertices[i]).transpose() / n;
      rhs(0, lay.vertex(i, 0)) += 1.0 / n;
    }
    if (conforming) {
      for (int i = 0; i < n; ++i) {
        lhs.row(1) += p.basis.eval(g.vertices[i], 1, 0).transpose() / n;
        lhs.row(2) += p.basis.eval(g.vertices[i], 0, 1).transpose() / n;
        rhs(1, lay.vertex(i, 1)) += 1.0 / (n * g.vertex_h[i]);
        rhs(2, lay.vertex(i, 2)) += 1.0 / (n * g.vertex_h[i]);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const ElementEdge& e = g.edges[i];
        const LineRule lr = line_rule(k);
        for (std::size_t q = 0; q < lr.xi.size(); ++q) {
          const Point2 x = e.point(lr.xi[q]);
          const double w = e.length * lr.weights[q];
          lhs.row(1) += w * p.basis.eval(x, 1, 0).transpose();
          lhs.row(2) += w * p.basis.eval(x, 0, 1).transpose();
        }
        // int_e grad v = n int_e d_n v + t (v(b) - v(a))
        const int ip = (i + 1) % n;
        rhs(1, lay.edge_normal(i, 0)) += e.n.x * e.sign;
        rhs(2, lay.edge_normal(i, 0)) += e.n.y * e.sign;
        rhs(1, lay.vertex(ip, 0)) += e.t.x;
        rhs(1, lay.vertex(i, 0)) -= e.t.x;
        rhs(2, lay.vertex(ip, 0)) += e.t.y;
        rhs(2, lay.vertex(i, 0)) -= e.t.y;
      }
    }
    p.energy = solve_checked(lhs, rhs, g, "energy projection");
  }

  // Nonconforming value traces, side by side.
  if (!conforming) {
    for (std::size_t side = 0; side < g.sides.corners.size(); ++side) {
      const int start = g.sides.side_start[side];
      for (int m = 0; m < g.sides.side_edges[side]; ++m) {
        const int i = (start + m) % n;
        const int ip = (i + 1) % n;
        const ElementEdge& e = g.edges[i];
        Eigen::MatrixXd a(k + 1, k + 1), rhs = Eigen::MatrixXd::Zero(k + 1, nd);
        a.row(0) = point_row(k, -0.5);
        rhs(0, lay.vertex(i, 0)) = 1.0;
        a.row(1) = point_row(k, 0.5);
        rhs(1, lay.vertex(ip, 0)) = 1.0;
        for (int j = 0; j < k - 2; ++j) {
          a.row(2 + j) = moment_row(k, j, e.sign);
          rhs(2 + j, lay.edge_value(i, j)) = 1.0;
        }
        if (m == 0) {
          // top moment from the enhancement: int v xi^{k-2} = int pd_k v xi^{k-2}
          a.row(k) = moment_row(k, k - 2, 1);
          const LineRule lr = line_rule(2 * k);
          Eigen::RowVectorXd mom = Eigen::RowVectorXd::Zero(nk);
          for (std::size_t q = 0; q < lr.xi.size(); ++q)
            mom += lr.weights[q] * edge_monomial(lr.xi[q], k - 2) * p.basis.eval(e.point(lr.xi[q])).transpose();
          rhs.row(k) = mom * p.energy;
        } else {
          // C1 along the side at the shared hanging node
          const int iprev = (i + n - 1) % n;
          const ElementEdge& ep = g.edges[iprev];
          a.row(k) = slope_row(k, -0.5) / e.length;
          rhs.row(k) = slope_row(k, 0.5) * p.traces[iprev].value / ep.length;
        }
        p.traces[i].value = solve_checked(a, rhs, g, "trace reconstruction");
      }
    }
  }

  // L2 projection with the enhancement for the high-degree block.
  const Eigen::MatrixXd mass = mass_matrix(g, k, k);
  {
    Eigen::MatrixXd c(nk, nd);
    const int low = poly_dim(k - 4);
    if (low > 0) c.topRows(low) = cells;
    c.bottomRows(nk - low) = mass.bottomRows(nk - low) * p.energy;
    p.l2 = solve_checked(mass, c, g, "L2 projection");
  }
  const Eigen::MatrixXd interior = mass * p.l2;

  p.gradient_degree = opts.gradient_degree < 0 ? k - 2 : opts.gradient_degree;
  if (p.gradient_degree > k - 1) throw Error("gradient projection degree must be <= k-1");
  p.gradient = gradient_projection(g, p.gradient_degree, interior, p.traces, nd);
  p.gradient_top = p.gradient_degree == k - 1 ? p.gradient : gradient_projection(g, k - 1, interior, p.traces, nd);

  // Hessian projection of degree k-2.
  {
    const ScaledMonomialBasis b(g.centroid, g.h, k - 2);
    const Eigen::MatrixXd m2 = mass_matrix(g, k - 2, k - 2);
    for (int comp = 0; comp < 3; ++comp) {
      const int ax = comp == 0 ? 2 : (comp == 1 ? 1 : 0);
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(b.size(), nd);
      if (k >= 4) {
        const Eigen::MatrixXd dd = b.derivative_matrix(ax, 2 - ax);
        rhs += dd.transpose() * interior.topRows(dd.rows());
      }
      for (int i = 0; i < n; ++i) {
        const ElementEdge& e = g.edges[i];
        const Point2 nv = e.n, tv = e.t;
        double c_nn, c_tn;
        if (comp == 0) {
          c_nn = nv.x * nv.x;
          c_tn = tv.x * nv.x;
        } else if (comp == 1) {
          c_nn = nv.x * nv.y;
          c_tn = 0.5 * (tv.x * nv.y + tv.y * nv.x);
        } else {
          c_nn = nv.y * nv.y;
          c_tn = tv.y * nv.y;
        }
        const LineRule lr = line_rule(2 * k + 2);
        for (std::size_t q = 0; q < lr.xi.size(); ++q) {
          const Point2 x = e.point(lr.xi[q]);
          const double w = e.length * lr.weights[q];
          const Eigen::VectorXd m = b.eval(x), mx = b.eval(x, 1, 0), my = b.eval(x, 0, 1);
          Eigen::VectorXd div_n;
          if (comp == 0) div_n = mx * nv.x;
          else if (comp == 1) div_n = 0.5 * (my * nv.x + mx * nv.y);
          else div_n = my * nv.y;
          const Eigen::VectorXd dt = tv.x * mx + tv.y * my;
          rhs += (w * c_nn) * m * trace_row(p.traces[i].normal, lr.xi[q]);
          rhs -= w * (div_n + c_tn * dt) * trace_row(p.traces[i].value, lr.xi[q]);
        }
        const int ip = (i + 1) % n;
        rhs.col(lay.vertex(ip, 0)) += c_tn * b.eval(e.b);
        rhs.col(lay.vertex(i, 0)) -= c_tn * b.eval(e.a);
      }
      p.hessian[comp] = solve_checked(m2, rhs, g, "hessian projection");
    }
  }

  p.ritz_degree = opts.ritz_degree < 0 ? k - 1 : opts.ritz_degree;
  if (p.ritz_degree > k) throw Error("ritz degree for deflection must be <= k");
  p.ritz = ritz_projection(g, p.ritz_degree, interior, p.traces, lay, !conforming);
  return p;
}

PressureProjectors compute_pressure_projectors(const ElementGeometry& g, SpaceKind s,
                                               const ProjectorOptions& opts) {
  if (s.field != Field::Pressure) throw Error("pressure projectors need a pressure space");
  const int l = s.degree;
  const bool conforming = s.family == Family::Conforming;
  const int n = g.num_vertices();
  const LocalLayout lay(s, n);
  const int nd = lay.size();

  PressureProjectors p;
  p.space = s;
  p.ndof = nd;
  p.basis = ScaledMonomialBasis(g.centroid, g.h, l);
  p.dof_matrix = dofs_of_monomials(g, s, l);
  const int nl = p.basis.size();
  const Eigen::MatrixXd cells = cell_moment_rows(g, lay, l - 2);

  p.traces.resize(n);
  for (int i = 0; i < n; ++i) {
    const ElementEdge& e = g.edges[i];
    if (conforming) {
      Eigen::MatrixXd a(l + 1, l + 1), rhs = Eigen::MatrixXd::Zero(l + 1, nd);
      a.row(0) = point_row(l, -0.5);
      rhs(0, lay.vertex(i, 0)) = 1.0;
      a.row(1) = point_row(l, 0.5);
      rhs(1, lay.vertex((i + 1) % n, 0)) = 1.0;
      for (int j = 0; j < l - 1; ++j) {
        a.row(2 + j) = moment_row(l, j, e.sign);
        rhs(2 + j, lay.edge_value(i, j)) = 1.0;
      }
      p.traces[i].value = a.partialPivLu().solve(rhs);
    } else {
      p.traces[i].value = moment_trace(lay, i, e.sign, l, false, e.length);
    }
  }

  p.ritz = ritz_projection(g, l, cells, p.traces, lay, !conforming);

  const Eigen::MatrixXd mass = mass_matrix(g, l, l);
  {
    Eigen::MatrixXd c(nl, nd);
    const int low = poly_dim(l - 2);
    if (low > 0) c.topRows(low) = cells;
    c.bottomRows(nl - low) = mass.bottomRows(nl - low) * p.ritz;
    p.l2 = solve_checked(mass, c, g, "L2 projection");
  }
  const Eigen::MatrixXd interior = mass * p.l2;
  p.gradient = gradient_projection(g, l - 1, interior, p.traces, nd);

  if (opts.low_ritz_degree >= 0) {
    if (opts.low_ritz_degree > l) throw Error("low ritz degree must be <= l");
    p.low_ritz_degree = opts.low_ritz_degree;
    p.low_ritz = ritz_projection(g, opts.low_ritz_degree, cells, p.traces, lay, !conforming);
  }
  return p;
}

}  // namespace bkvem
