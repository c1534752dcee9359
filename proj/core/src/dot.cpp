#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bnrefine/io.hpp"

namespace bnrefine::io {

double grey_intensity(double p, const DotOptions& options) {
  if (options.mapping == GreyMapping::Linear) return std::clamp(p, 0.0, 1.0);
  if (p <= 0.0) return 0.0;
  const double floor = std::log(options.log_floor);
  return std::clamp((std::log(p) - floor) / -floor, 0.0, 1.0);
}

namespace {

std::string edge_line(const std::string& from, const std::string& to, double p,
                      const DotOptions& options) {
  // DOT greys run from gray0 (black) to gray100 (white).
  const int level = static_cast<int>(std::lround(100.0 * (1.0 - grey_intensity(p, options))));
  char buf[128];
  std::snprintf(buf, sizeof buf, " [color=\"gray%d\", fontcolor=\"gray%d\", label=\"%.3f\"];\n", level,
                level, p);
  return "  \"" + from + "\" -> \"" + to + "\"" + buf;
}

std::string nodes_block(const DomainSchema& schema) {
  std::string out;
  for (const auto& v : schema.variables()) out += "  \"" + v.name + "\";\n";
  return out;
}

}  // namespace

std::string export_dot(const ArcPosteriorMatrix& arcs, const DomainSchema& schema,
                       const DotOptions& options) {
  std::string out = "digraph arc_posteriors {\n  rankdir=LR;\n";
  out += nodes_block(schema);
  for (const auto& [key, p] : arcs.entries) {
    if (p < options.threshold) continue;
    out += edge_line(schema.variable(key.first).name, schema.variable(key.second).name, p, options);
  }
  out += "}\n";
  return out;
}

std::string export_dot(const SmoothedNetwork& smoothed, const DotOptions& options) {
  std::string out = "digraph smoothed_network {\n  rankdir=LR;\n";
  out += nodes_block(smoothed.schema);
  for (const auto& f : smoothed.families) {
    for (const auto& [p, prob] : f.arc_probabilities) {
      if (prob < options.threshold) continue;
      out += edge_line(smoothed.schema.variable(p).name, smoothed.schema.variable(f.variable).name,
                       prob, options);
    }
  }
  out += "}\n";
  return out;
}

}  // namespace bnrefine::io
