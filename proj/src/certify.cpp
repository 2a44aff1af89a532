#include "cantor/certify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

#include "cantor/errors.hpp"

namespace cantor {

std::string to_string(PointCase c) {
  switch (c) {
    case PointCase::XDominant: return "x-dominant";
    case PointCase::YDominant: return "y-dominant";
    case PointCase::Boundary: return "boundary";
    case PointCase::Fail: return "fail";
  }
  return "fail";
}

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::SignAmbiguous: return "SignAmbiguous";
    case FailureReason::DominanceFails: return "DominanceFails";
    case FailureReason::RatioFails: return "RatioFails";
    case FailureReason::DomainError: return "DomainError";
    case FailureReason::DegenerateImage: return "DegenerateImage";
  }
  return "Unknown";
}

PointReport point_condition(const GradTriple& g, const Rational& x0, const Rational& y0) {
  PointReport rep;
  rep.x0 = x0;
  rep.y0 = y0;
  const double x = x0.convert_to<double>();
  const double y = y0.convert_to<double>();
  rep.fx = eval_point(g.fx, x, y);
  rep.fy = eval_point(g.fy, x, y);
  rep.sx = (rep.fx > 0) - (rep.fx < 0);
  rep.sy = (rep.fy > 0) - (rep.fy < 0);
  if (rep.fx == 0.0 || rep.fy == 0.0) {
    rep.ratio = rep.fy == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.kind = PointCase::Fail;
    return rep;
  }
  const double r = std::fabs(rep.fx / rep.fy);
  const double inv = 1.0 / r;
  rep.ratio = r;
  auto near = [](double a, double b) { return std::fabs(a - b) <= kBoundaryTolerance; };
  if (near(r, 1.0) || near(r, 3.0) || near(inv, 3.0)) rep.kind = PointCase::Boundary;
  else if (r > 1.0 && r < 3.0) rep.kind = PointCase::XDominant;
  else if (inv > 1.0 && inv < 3.0) rep.kind = PointCase::YDominant;
  else rep.kind = PointCase::Fail;
  return rep;
}

namespace {

Interval abs_range(const Interval& v) { return Interval(v.mig(), v.mag()); }

std::string describe(const char* what, const Interval& fx, const Interval& fy) {
  std::ostringstream os;
  os << what << "; fx in " << fx << ", fy in " << fy;
  return os.str();
}

Box corner_box(const Corner& c) { return Box{c.first.enclosure(), c.second.enclosure()}; }

}  // namespace

CertifyResult certify_square(const GradTriple& g, const BasicSquare& sq) {
  const Box box = sq.enclosure();
  Interval ex;
  Interval ey;
  try {
    ex = eval_interval(g.fx, box);
    ey = eval_interval(g.fy, box);
  } catch (const DomainError& e) {
    return Failure{FailureReason::DomainError, e.what()};
  } catch (const OverflowError& e) {
    return Failure{FailureReason::DomainError, e.what()};
  }

  if (ex.contains_zero() || ey.contains_zero())
    return Failure{FailureReason::SignAmbiguous, describe("a partial derivative enclosure contains 0", ex, ey)};

  Signature sig;
  sig.sx = ex.lo() > 0.0 ? 1 : -1;
  sig.sy = ey.lo() > 0.0 ? 1 : -1;
  const Interval ax = abs_range(ex);
  const Interval ay = abs_range(ey);
  sig.swap = ay.lo() > ax.lo();
  sig.dominant = sig.swap ? Axis::Y : Axis::X;
  const Interval& dom = sig.swap ? ay : ax;
  const Interval& sub = sig.swap ? ax : ay;

  Margins m;
  m.m1 = rounding::add_down(dom.lo(), -sub.hi());
  m.m2 = rounding::add_down(rounding::mul_down(3.0, sub.lo()), -dom.hi());
  m.m3 = dom.lo();
  m.m4 = sub.lo();
  if (m.m1 < 0.0)
    return Failure{FailureReason::DominanceFails, describe("inf|D| < sup|d|", ex, ey)};
  if (m.m2 < 0.0)
    return Failure{FailureReason::RatioFails, describe("3 inf|d| < sup|D|", ex, ey)};

  // f increases along an axis with positive partial, so its minimum sits at
  // the left endpoint of that axis and its maximum at the right one.
  const BasicInterval& ix = sq.x();
  const BasicInterval& iy = sq.y();
  Corner lo_corner{sig.sx > 0 ? ix.left() : ix.right(), sig.sy > 0 ? iy.left() : iy.right()};
  Corner hi_corner{sig.sx > 0 ? ix.right() : ix.left(), sig.sy > 0 ? iy.right() : iy.left()};

  Interval fmin;
  Interval fmax;
  try {
    fmin = eval_interval(g.f, corner_box(lo_corner));
    fmax = eval_interval(g.f, corner_box(hi_corner));
  } catch (const DomainError& e) {
    return Failure{FailureReason::DomainError, e.what()};
  } catch (const OverflowError& e) {
    return Failure{FailureReason::DomainError, e.what()};
  }
  if (!(fmin.hi() < fmax.lo()))
    return Failure{FailureReason::DegenerateImage, "corner enclosures overlap after inward rounding"};

  Certificate cert;
  cert.square = sq;
  cert.signature = sig;
  cert.margins = m;
  cert.fx_enclosure = ex;
  cert.fy_enclosure = ey;
  cert.min_corner = std::move(lo_corner);
  cert.max_corner = std::move(hi_corner);
  cert.min_value = fmin;
  cert.max_value = fmax;
  cert.image = Interval(fmin.hi(), fmax.lo());
  return cert;
}

bool ratio_impossible(const Interval& fx, const Interval& fy) {
  const Interval ax = abs_range(fx);
  const Interval ay = abs_range(fy);
  return ax.lo() > rounding::mul_up(3.0, ay.hi()) || ay.lo() > rounding::mul_up(3.0, ax.hi());
}

namespace {

struct Node {
  BasicSquare square;
  double score;
  std::string xw;
  std::string yw;
};

struct NodeOrder {
  // priority_queue pops the largest, so "greater" means lower priority.
  bool operator()(const Node& a, const Node& b) const {
    if (a.score != b.score) return a.score > b.score;
    if (a.xw != b.xw) return a.xw > b.xw;
    return a.yw > b.yw;
  }
};

// Heuristic: distance of the centre ratio max(|fx/fy|, |fy/fx|) from 2.
double score_of(const GradTriple& g, const BasicSquare& sq) {
  try {
    const Rational two(2);
    const double cx = ((sq.x().left().to_rational() + sq.x().right().to_rational()) / two).convert_to<double>();
    const double cy = ((sq.y().left().to_rational() + sq.y().right().to_rational()) / two).convert_to<double>();
    const double fx = std::fabs(eval_point(g.fx, cx, cy));
    const double fy = std::fabs(eval_point(g.fy, cx, cy));
    if (fx == 0.0 || fy == 0.0) return std::numeric_limits<double>::infinity();
    const double rho = std::max(fx / fy, fy / fx);
    return std::isfinite(rho) ? std::fabs(rho - 2.0) : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

Node make_node(const GradTriple& g, BasicSquare sq) {
  Node n{std::move(sq), 0.0, {}, {}};
  n.score = score_of(g, n.square);
  n.xw = n.square.x().word().str();
  n.yw = n.square.y().word().str();
  return n;
}

struct Evaluation {
  std::optional<Certificate> cert;
  bool prunable = false;
};

Evaluation evaluate(const GradTriple& g, const BasicSquare& sq, const Box& region) {
  Evaluation ev;
  if (sq.inside(region)) {
    CertifyResult r = certify_square(g, sq);
    if (auto* c = std::get_if<Certificate>(&r)) {
      ev.cert = std::move(*c);
      return ev;
    }
  }
  try {
    const Box box = sq.enclosure();
    ev.prunable = ratio_impossible(eval_interval(g.fx, box), eval_interval(g.fy, box));
  } catch (const Error&) {
    ev.prunable = false;
  }
  return ev;
}

std::vector<Evaluation> evaluate_batch(const GradTriple& g, const std::vector<Node>& batch, const Box& region,
                                       unsigned workers) {
  std::vector<Evaluation> out(batch.size());
  const std::size_t nthreads = std::min<std::size_t>(std::max(1u, workers), batch.size());
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = evaluate(g, batch[i].square, region);
    return out;
  }
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < batch.size(); i += nthreads) out[i] = evaluate(g, batch[i].square, region);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Certificate> run_search(const GradTriple& g, const SearchOptions& opts, std::size_t max_certs,
                                    SearchStats& stats) {
  check_rank(opts.max_rank);
  std::vector<Certificate> found;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> frontier;
  const BasicSquare root(BasicInterval{}, BasicInterval{});
  if (root.intersects(opts.region)) frontier.push(make_node(g, root));

  while (!frontier.empty() && stats.nodes_expanded < opts.budget && found.size() < max_certs) {
    std::vector<Node> batch;
    const std::size_t room = opts.budget - stats.nodes_expanded;
    while (!frontier.empty() && batch.size() < std::min(kSearchBatch, room)) {
      batch.push_back(frontier.top());
      frontier.pop();
    }
    const auto evals = evaluate_batch(g, batch, opts.region, opts.workers);

    // Results are consumed in priority order regardless of which worker
    // finished first.
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Node& node = batch[i];
      ++stats.nodes_expanded;
      stats.deepest_rank = std::max(stats.deepest_rank, node.square.rank());
      if (evals[i].cert) {
        found.push_back(*evals[i].cert);
        if (found.size() >= max_certs) return found;
        continue;
      }
      if (evals[i].prunable) {
        ++stats.pruned;
        continue;
      }
      if (node.square.rank() >= opts.max_rank) continue;
      for (BasicSquare& child : node.square.children())
        if (child.intersects(opts.region)) frontier.push(make_node(g, std::move(child)));
    }
  }
  return found;
}

}  // namespace

SearchOutcome search(const GradTriple& g, const SearchOptions& opts) {
  SearchStats stats;
  auto found = run_search(g, opts, 1, stats);
  if (found.empty()) return SearchOutcome{NoCertificate{stats}, stats};
  return SearchOutcome{std::move(found.front()), stats};
}

std::vector<Certificate> multi_search(const GradTriple& g, const SearchOptions& opts, std::size_t max_certs,
                                      SearchStats* stats) {
  SearchStats local;
  auto found = max_certs == 0 ? std::vector<Certificate>{} : run_search(g, opts, max_certs, local);
  if (stats) *stats = local;
  return found;
}

}  // namespace cantor
