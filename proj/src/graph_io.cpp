#include "rbd/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "rbd/errors.hpp"

namespace rbd {

void write_graph(std::ostream& out, const WorldGraph& g) {
  out << "n=" << g.n << '\n';
  out << "alphabet=";
  for (std::size_t i = 0; i < g.alphabet.symbols.size(); ++i) {
    if (i > 0) out << ',';
    out << g.alphabet.symbols[i];
  }
  out << '\n';
  out << "seed=" << g.seed << '\n';
  for (int i = 0; i < g.n; ++i) {
    for (int j = i + 1; j < g.n; ++j) {
      const Label l = g.at(i, j);
      if (l != kNullLabel) {
        out << i << ' ' << j << ' ' << g.alphabet.name(l) << '\n';
      }
    }
  }
}

void write_graph_file(const std::string& path, const WorldGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_graph(out, g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string expect_header(const std::string& line, const std::string& key,
                          std::size_t line_no) {
  if (line.rfind(key + "=", 0) != 0) {
    throw ParseError("expected '" + key + "=' header", line_no);
  }
  return line.substr(key.size() + 1);
}

}  // namespace

WorldGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", line_no);
    ++line_no;
  };

  next_line();
  int n = 0;
  try {
    n = std::stoi(expect_header(line, "n", line_no));
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    throw ParseError("bad n header", line_no);
  }

  next_line();
  const std::string alpha = expect_header(line, "alphabet", line_no);
  std::vector<std::string> symbols;
  std::size_t pos = 0;
  while (pos <= alpha.size()) {
    std::size_t end = alpha.find(',', pos);
    if (end == std::string::npos) end = alpha.size();
    symbols.push_back(alpha.substr(pos, end - pos));
    pos = end + 1;
  }
  if (symbols.empty() || symbols[0] != kNullSymbol) {
    throw ParseError("alphabet must start with the null symbol", line_no);
  }

  next_line();
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(expect_header(line, "seed", line_no));
  } catch (const ParseError&) {
    throw;
  } catch (...) {
    throw ParseError("bad seed header", line_no);
  }

  WorldGraph g;
  try {
    LabelAlphabet a;
    a.symbols = std::move(symbols);
    g = WorldGraph(n, std::move(a), seed);
  } catch (const std::exception& e) {
    throw ParseError(e.what(), line_no);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream cell(line);
    int i = 0, j = 0;
    std::string symbol;
    if (!(cell >> i >> j >> symbol)) {
      throw ParseError("bad cell line", line_no);
    }
    try {
      g.set_arc(i, j, g.alphabet.index_of(symbol));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return g;
}

WorldGraph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_graph(in);
}

}  // namespace rbd
