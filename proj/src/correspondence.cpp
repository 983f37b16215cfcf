#include "algebroid/correspondence.hpp"

#include <algorithm>
#include <string>

namespace algebroid {

namespace {

double rel_aut_residual(const LieAlgebra& g, const Mat& a) {
  return automorphism_residual(g, a) / std::max(1.0, a.squaredNorm());
}

Tolerances transported(Tolerances tol) {
  tol.alg = std::max(tol.alg, tol.trans);
  return tol;
}

void add_counts(VerdictCounts& into, const VerdictCounts& c) {
  into.inner += c.inner;
  into.outer += c.outer;
  into.undecided += c.undecided;
}

}  // namespace

TransportResult parallel_transport(const ConnectionForm& c, const Path& p) {
  check_connection_shape(c);
  if (p.points.size() < 2 || p.points.size() != p.velocities.size()) throw InputError("malformed path");
  const Chart& ch = c.bundle.manifold.chart(p.chart);
  for (const auto& q : p.points)
    if (!ch.contains(q)) throw InputError("path leaves chart " + std::to_string(p.chart));
  const int n = c.bundle.algebra.dim();
  const double dt = p.dt;
  Mat t = Mat::Identity(n, n);
  for (std::size_t k = 0; k + 1 < p.points.size(); ++k) {
    const Vec mid = 0.5 * (p.points[k] + p.points[k + 1]);
    const Vec vmid = 0.5 * (p.velocities[k] + p.velocities[k + 1]);
    const Mat a0 = -omega_at(c, p.chart, p.points[k], p.velocities[k]);
    const Mat am = -omega_at(c, p.chart, mid, vmid);
    const Mat a1 = -omega_at(c, p.chart, p.points[k + 1], p.velocities[k + 1]);
    const Mat k1 = a0 * t;
    const Mat k2 = am * (t + 0.5 * dt * k1);
    const Mat k3 = am * (t + 0.5 * dt * k2);
    const Mat k4 = a1 * (t + dt * k3);
    t += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {t, rel_aut_residual(c.bundle.algebra, t), static_cast<int>(p.points.size()) - 1};
}

TransportResult chain_transport(const ConnectionForm& c, const std::vector<PathLeg>& legs) {
  if (legs.empty()) throw InputError("empty path");
  const auto& m = c.bundle.manifold;
  const int n = c.bundle.algebra.dim();
  Mat total = Mat::Identity(n, n);
  int steps = 0;
  for (std::size_t k = 0; k < legs.size(); ++k) {
    const auto& leg = legs[k];
    if (k > 0) {
      const auto& prev = legs[k - 1];
      if (prev.chart == leg.chart) {
        if ((prev.to - leg.from).cwiseAbs().maxCoeff() > 1e-9) throw InputError("path legs do not join");
      } else {
        bool found = false;
        for (int o : m.overlaps_containing(prev.chart, prev.to)) {
          const auto& ov = m.overlap(o);
          if (ov.beta != leg.chart || (ov.map.apply(prev.to) - leg.from).cwiseAbs().maxCoeff() > 1e-9) continue;
          const Mat fa = frame_at(c.bundle, prev.chart, prev.to);
          const Mat fb = frame_at(c.bundle, leg.chart, leg.from);
          total = fb.partialPivLu().solve(fa) * total;
          found = true;
          break;
        }
        if (!found) throw InputError("path legs do not join through an overlap");
      }
    }
    const auto r = parallel_transport(c, segment_path(m, leg.chart, leg.from, leg.to, leg.steps));
    total = r.matrix * total;
    steps += r.ode_steps;
  }
  return {total, rel_aut_residual(c.bundle.algebra, total), steps};
}

FMapResult f_map(const ConnectionForm& c, const FMapOptions& opt) {
  const auto valid = validate_connection(c, opt.tol);
  if (!valid.passed) throw PreconditionError("f_map: connection does not validate: " + valid.worst);
  const auto acc = accordance(c, opt.tol);
  if (!acc.passed) throw PreconditionError("f_map: not a coupling (accordance residual " + std::to_string(acc.max_residual) + ")");
  const auto& m = c.bundle.manifold;
  if (!opt.centers.empty() && static_cast<int>(opt.centers.size()) != m.chart_count())
    throw InputError("f_map: one center per chart required");

  FMapResult out{c.bundle, {}, {}, false, acc.max_residual};
  for (int a = 0; a < m.chart_count(); ++a) {
    const Chart& ch = m.chart(a);
    const Vec origin = opt.centers.empty() ? ch.center_point() : ch.node_point(ch.flat_index(opt.centers[a]));
    for (int node = 0; node < ch.node_count(); ++node) {
      const auto r = parallel_transport(c, segment_path(m, a, origin, ch.node_point(node), opt.steps));
      out.bundle.frames.mat(a, node) = c.bundle.frames.mat(a, node) * r.matrix;
    }
  }
  out.automorphism = validate_lab(out.bundle, transported(opt.tol));
  out.delta = check_delta_continuity(out.bundle, opt.tol);
  out.theorem_holds = out.automorphism.passed && out.delta.passed;
  return out;
}

ConnectionForm g_map(const Trivialization& t, const PartitionOfUnity& h, const Tolerances& tol) {
  const auto valid = validate_lab(t, transported(tol));
  if (!valid.passed) throw PreconditionError("g_map: bundle does not validate: " + valid.worst);
  const auto delta = check_delta_continuity(t, tol);
  if (!delta.passed)
    throw PreconditionError(delta.undecided ? "g_map: delta continuity undecided" : "g_map: transitions are not delta-continuous");

  const auto& m = t.manifold;
  ConnectionForm out = zero_connection(t);
  for (const auto& tr : transitions(t)) {
    const auto& ov = m.overlap(tr.overlap);
    const auto& nodes = m.overlap_nodes(tr.overlap);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double w = h.value(ov.beta, nodes[k].beta_point);
      if (w == 0.0) continue;
      for (int i = 0; i < m.dim(); ++i)
        out.omega[i].mat(ov.alpha, nodes[k].alpha_node) +=
            w * transition_log_derivative(m, tr, static_cast<int>(k), i, LogSide::Left);
    }
  }
  const auto der = derivations_basis(t.algebra, tol.alg);
  for (auto& w : out.omega)
    for (int ch = 0; ch < m.chart_count(); ++ch)
      for (int node = 0; node < m.chart(ch).node_count(); ++node) {
        const Mat d = w.mat(ch, node);
        w.mat(ch, node) = project_onto(der, d);
      }
  return out;
}

CheckReport verify_g_well_defined(const Trivialization& t, const Trivialization& t2, const PartitionOfUnity& h,
                                  const PartitionOfUnity& h2, const Tolerances& tol) {
  CheckReport r;
  const auto eq = trivializations_equivalent(t, t2, tol);
  r.verdicts = eq.totals();
  if (!eq.passed) {
    r.inconclusive = eq.undecided && r.verdicts.outer == 0;
    r.note = r.inconclusive ? "equivalence of trivializations undecided" : "trivializations are not equivalent";
    return r;
  }
  const auto ce = coupling_equivalent(g_map(t, h, tol), g_map(t2, h2, tol), tol);
  r.residuals["coupling"] = ce.max_residual;
  r.passed = ce.passed;
  return r;
}

namespace {

CheckReport coupling_direction(const ConnectionForm& c, const FMapResult& f, const PartitionOfUnity& h,
                               const Tolerances& tol) {
  CheckReport r;
  add_counts(r.verdicts, f.delta.totals());
  r.residuals["f_automorphism"] = f.automorphism.residuals.at("automorphism");
  if (!f.theorem_holds) {
    r.inconclusive = f.delta.undecided && r.verdicts.outer == 0 && f.automorphism.passed;
    r.note = "f(C) failed its theorem check";
    return r;
  }
  const auto back = g_map(f.bundle, h, tol);
  const auto acc = accordance(back, tol);
  const auto ce = coupling_equivalent(c, back, tol);
  r.residuals["accordance"] = acc.max_residual;
  r.residuals["coupling"] = ce.max_residual;
  r.passed = acc.passed && ce.passed;
  return r;
}

CheckReport trivialization_direction(const Trivialization& t, const PartitionOfUnity& h, const Tolerances& tol) {
  CheckReport r;
  const auto delta = check_delta_continuity(t, tol);
  add_counts(r.verdicts, delta.totals());
  if (!delta.passed) {
    r.inconclusive = delta.undecided && r.verdicts.outer == 0;
    r.note = "bundle is not delta-continuous";
    return r;
  }
  const auto c = g_map(t, h, tol);
  const auto acc = accordance(c, tol);
  r.residuals["accordance"] = acc.max_residual;
  const auto f = f_map(c, FMapOptions{64, {}, tol});
  add_counts(r.verdicts, f.delta.totals());
  const auto eq = trivializations_equivalent(f.bundle, t, tol);
  add_counts(r.verdicts, eq.totals());
  double inner = 0.0, aut = 0.0;
  for (const auto& e : eq.entries) {
    inner = std::max(inner, e.max_inner_residual);
    aut = std::max(aut, e.max_aut_residual);
  }
  r.residuals["equivalence_inner"] = inner;
  r.residuals["equivalence_automorphism"] = aut;
  r.passed = acc.passed && f.theorem_holds && eq.passed;
  r.inconclusive = !r.passed && (eq.undecided || f.delta.undecided) && r.verdicts.outer == 0;
  return r;
}

RoundTripReport combine(std::string direction, CheckReport a, CheckReport b) {
  RoundTripReport r;
  r.direction = std::move(direction);
  r.couplings = std::move(a);
  r.trivializations = std::move(b);
  r.passed = r.couplings.passed && r.trivializations.passed;
  const bool definite_fail = (!r.couplings.passed && !r.couplings.inconclusive) ||
                             (!r.trivializations.passed && !r.trivializations.inconclusive);
  r.inconclusive = !r.passed && !definite_fail;
  return r;
}

}  // namespace

RoundTripReport verify_inverse(const ConnectionForm& c, const PartitionOfUnity& h, const Tolerances& tol) {
  const auto acc = accordance(c, tol);
  if (!acc.passed) {
    RoundTripReport r;
    r.direction = "connection";
    r.note = "not a coupling";
    r.couplings.residuals["accordance"] = acc.max_residual;
    return r;
  }
  const auto f = f_map(c, FMapOptions{64, {}, tol});
  auto first = coupling_direction(c, f, h, tol);
  auto second = f.theorem_holds ? trivialization_direction(f.bundle, h, tol) : CheckReport{};
  if (!f.theorem_holds) second.note = "f(C) failed its theorem check";
  return combine("connection", std::move(first), std::move(second));
}

RoundTripReport verify_inverse(const Trivialization& t, const PartitionOfUnity& h, const Tolerances& tol) {
  auto second = trivialization_direction(t, h, tol);
  CheckReport first;
  if (second.passed || second.inconclusive) {
    const auto c = g_map(t, h, tol);
    first = coupling_direction(c, f_map(c, FMapOptions{64, {}, tol}), h, tol);
  } else {
    first.note = "skipped: bundle direction failed";
  }
  const std::string note = second.note;
  auto r = combine("bundle", std::move(first), std::move(second));
  r.note = note;
  return r;
}

}  // namespace algebroid
