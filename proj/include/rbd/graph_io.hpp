#pragma once

#include <iosfwd>
#include <string>

#include "rbd/graph.hpp"

namespace rbd {

// Self-describing text form:
//   n=<int>
//   alphabet=<comma-separated symbols, null first>
//   seed=<int>
//   <i> <j> <label>   (one line per non-null cell, i < j)
// Round-trips exactly.
void write_graph(std::ostream& out, const WorldGraph& g);
void write_graph_file(const std::string& path, const WorldGraph& g);

WorldGraph read_graph(std::istream& in);          // throws ParseError
WorldGraph read_graph_file(const std::string& path);

}  // namespace rbd
