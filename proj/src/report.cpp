#include "cantor/report.hpp"

#include <cmath>
#include <sstream>

namespace cantor {

namespace {

Json corner_json(const Corner& c) { return Json::array({c.first.str(), c.second.str()}); }

Json side_json(const BasicInterval& iv) {
  return Json{{"lo", iv.left().str()}, {"hi", iv.right().str()}};
}

}  // namespace

Json to_json(const Interval& v) { return Json{{"lo", v.lo()}, {"hi", v.hi()}}; }

Json to_json(const Certificate& cert) {
  const auto& sq = cert.square;
  const auto& sig = cert.signature;
  Json j;
  j["square"] = Json{{"rank", sq.rank()},
                     {"x_word", sq.x().word().str()},
                     {"y_word", sq.y().word().str()},
                     {"x", side_json(sq.x())},
                     {"y", side_json(sq.y())},
                     {"corners", Json{{"min", corner_json(cert.min_corner)}, {"max", corner_json(cert.max_corner)}}}};
  j["signature"] = Json{{"sx", sig.sx},
                        {"sy", sig.sy},
                        {"dominant", sig.dominant == Axis::X ? "x" : "y"},
                        {"swap", sig.swap}};
  j["margins"] = Json{{"m1", cert.margins.m1}, {"m2", cert.margins.m2}, {"m3", cert.margins.m3}, {"m4", cert.margins.m4}};
  j["enclosures"] = Json{{"fx", to_json(cert.fx_enclosure)},
                         {"fy", to_json(cert.fy_enclosure)},
                         {"f_min_corner", to_json(cert.min_value)},
                         {"f_max_corner", to_json(cert.max_value)}};
  j["image"] = to_json(cert.image);
  return j;
}

Json to_json(const PointReport& rep) {
  Json j{{"x", rational_str(rep.x0)}, {"y", rational_str(rep.y0)}, {"fx", rep.fx}, {"fy", rep.fy}};
  // Infinite ratios are not representable in JSON.
  j["ratio"] = std::isfinite(rep.ratio) ? Json(rep.ratio) : Json(nullptr);
  j["case"] = to_string(rep.kind);
  j["signs"] = Json::array({rep.sx, rep.sy});
  return j;
}

Json to_json(const SearchStats& stats) {
  return Json{{"nodes_expanded", stats.nodes_expanded},
              {"deepest_rank", stats.deepest_rank},
              {"pruned", stats.pruned}};
}

Json to_json(const CoverReport& rep) {
  Json parts = Json::array();
  for (const auto& p : rep.cover.parts()) parts.push_back(Json::array({p.lo(), p.hi()}));
  return Json{{"depth", rep.depth},
              {"measure", rep.measure},
              {"squares_visited", rep.squares_visited},
              {"parts", std::move(parts)}};
}

std::string cover_csv(const CoverReport& rep) {
  std::ostringstream os;
  os << "lo,hi\n";
  for (const auto& p : rep.cover.parts()) os << format_double(p.lo()) << ',' << format_double(p.hi()) << '\n';
  return os.str();
}

}  // namespace cantor
