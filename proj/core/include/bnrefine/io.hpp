#ifndef BNREFINE_IO_HPP
#define BNREFINE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnrefine/engine.hpp"
#include "bnrefine/network.hpp"
#include "bnrefine/query.hpp"
#include "bnrefine/schema.hpp"

namespace bnrefine::io {

/// The expert's partial network: ordering, value labels, arc beliefs and
/// the Dirichlet concentration.
struct NetworkSpec {
  DomainSchema schema;
  ArcPriorMatrix priors;
  PriorConfig config;

  bool operator==(const NetworkSpec&) const = default;
};

inline constexpr int kSpecVersion = 1;
inline constexpr int kNetworkVersion = 1;
inline constexpr int kSessionVersion = 1;

/// JSON document:
///   {"format": "bnrefine-spec", "version": 1, "alpha": 1.0,
///    "default_prior": 0.5,
///    "variables": [{"name": "a", "values": ["no", "yes"]}, ...],
///    "arcs": [{"from": "a", "to": "b", "prior": 0.9}, ...]}
/// Only "variables" is required. Throws ParseError with a JSON-pointer-like
/// location on any problem.
NetworkSpec parse_spec(std::string_view text);
std::string print_spec(const NetworkSpec& spec);

/// Labels and names must match [A-Za-z0-9_.-]+ so CSV needs no quoting.
bool is_identifier(std::string_view s);

/// Header row of variable names in any order, then one row per example of
/// value labels. Strict: any unknown label, empty cell or header mismatch
/// rejects the whole input with row/column diagnostics.
std::vector<Example> parse_csv(std::istream& in, const DomainSchema& schema);
std::vector<Example> load_csv(const std::filesystem::path& path, const DomainSchema& schema);
void write_csv(std::ostream& out, const DomainSchema& schema, std::span<const Example> data);

std::string network_to_json(const ConcreteNetwork& network);
ConcreteNetwork network_from_json(std::string_view text);
std::string smoothed_to_json(const SmoothedNetwork& smoothed);
std::string arcs_to_text(const ArcPosteriorMatrix& arcs, const DomainSchema& schema);

enum class GreyMapping { Linear, Log };

struct DotOptions {
  GreyMapping mapping = GreyMapping::Linear;
  double threshold = 0.01;  // arcs below this probability are omitted
  double log_floor = 1e-3;  // p_min of the log mapping
};

/// Intensity in [0,1] for an arc probability (1 = black).
double grey_intensity(double p, const DotOptions& options);

std::string export_dot(const ArcPosteriorMatrix& arcs, const DomainSchema& schema,
                       const DotOptions& options = {});
std::string export_dot(const SmoothedNetwork& smoothed, const DotOptions& options = {});

/// Full engine state as versioned JSON; load(save(net)) == net.
std::string session_to_json(const CombinedNetwork& net);
CombinedNetwork session_from_json(std::string_view text);
void save_session(const std::filesystem::path& path, const CombinedNetwork& net);
CombinedNetwork load_session(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace bnrefine::io

#endif  // BNREFINE_IO_HPP
