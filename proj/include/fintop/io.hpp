#pragma once

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fintop/sweep.hpp"
#include "fintop/two_space.hpp"

namespace fintop {

using Json = nlohmann::ordered_json;

/// Parse failure with position. Line 0 marks file-level problems (unreadable
/// file, missing section).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

struct ParseOptions {
  // reject rel sets whose transitive closure adds pairs (reflexivity stays implicit)
  bool strict_relations = false;
};

struct NamedSpace {
  std::string name;
  FiniteSpace space;

  bool operator==(const NamedSpace&) const = default;
};

struct SubsetDecl {
  std::string name;
  std::vector<std::pair<PointIndex, PointIndex>> pairs;  // sorted, deduplicated

  bool operator==(const SubsetDecl&) const = default;
};

struct SpaceFile {
  std::vector<NamedSpace> spaces;
  std::vector<SubsetDecl> subsets;

  bool operator==(const SpaceFile&) const = default;
};

namespace detail {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    ++number;
    if (std::size_t hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.emplace_back(raw.substr(start, i - start));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return lines;
}

inline int parse_int(const std::string& token, const std::string& file, int line, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(file, line, std::string("expected ") + what + ", got '" + token + "'");
  return value;
}

inline std::uint64_t parse_u64(const std::string& token, const std::string& file, int line,
                               const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(file, line, std::string("expected ") + what + ", got '" + token + "'");
  return value;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class LineCursor {
 public:
  LineCursor(std::vector<Line> lines, std::string file)
      : lines_(std::move(lines)), file_(std::move(file)) {}

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const { return lines_[pos_]; }
  Line next() { return lines_[pos_++]; }
  int eof_line() const { return lines_.empty() ? 1 : lines_.back().number + 1; }
  const std::string& file() const { return file_; }

 private:
  std::vector<Line> lines_;
  std::string file_;
  std::size_t pos_ = 0;
};

// Shared by base/uspace/vspace blocks: points + rel lines closed by `end`.
// The opening keyword has already been consumed.
inline FiniteSpace parse_inner_space(LineCursor& cur, ParseOptions opts, int header_line,
                                     const char* what) {
  const std::string& file = cur.file();
  int points = -1;
  std::vector<std::pair<PointIndex, PointIndex>> rels;
  while (!cur.done()) {
    Line ln = cur.next();
    const std::vector<std::string>& t = ln.tokens;
    if (t[0] == "points") {
      if (t.size() != 2) throw ParseError(file, ln.number, "usage: points <n>");
      if (points >= 0) throw ParseError(file, ln.number, "duplicate points directive");
      points = parse_int(t[1], file, ln.number, "a point count");
      if (points < 0 || points > kMaxPoints)
        throw ParseError(file, ln.number, "point count out of range");
    } else if (t[0] == "rel") {
      if (t.size() != 3) throw ParseError(file, ln.number, "usage: rel <i> <j>");
      if (points < 0) throw ParseError(file, ln.number, "rel before points");
      int i = parse_int(t[1], file, ln.number, "a point");
      int j = parse_int(t[2], file, ln.number, "a point");
      if (i < 0 || i >= points || j < 0 || j >= points)
        throw ParseError(file, ln.number, "rel point out of range");
      rels.emplace_back(i, j);
    } else if (t[0] == "end") {
      if (t.size() != 1) throw ParseError(file, ln.number, "usage: end");
      if (points < 0)
        throw ParseError(file, header_line, std::string(what) + " block has no points directive");
      try {
        return FiniteSpace::from_relation(points, rels, opts.strict_relations);
      } catch (const std::invalid_argument& e) {
        throw ParseError(file, header_line, std::string(what) + ": " + e.what());
      }
    } else {
      throw ParseError(file, ln.number,
                       "unexpected directive '" + t[0] + "' in a " + what + " block");
    }
  }
  throw ParseError(file, cur.eof_line(), std::string(what) + " block not closed with 'end'");
}

inline Chart parse_chart(LineCursor& cur, ParseOptions opts, int header_line,
                         const FiniteSpace& base) {
  const std::string& file = cur.file();
  Chart chart;
  bool have_u = false, have_v = false;
  struct MapEntry {
    int w, u, v, line;
  };
  std::vector<MapEntry> entries;
  while (!cur.done()) {
    Line ln = cur.next();
    const std::vector<std::string>& t = ln.tokens;
    if (t[0] == "domain") {
      if (t.size() < 2) throw ParseError(file, ln.number, "usage: domain <p> [<p> ...]");
      for (std::size_t i = 1; i < t.size(); ++i) {
        int p = parse_int(t[i], file, ln.number, "a domain point");
        if (p < 0 || p >= base.size())
          throw ParseError(file, ln.number, "domain point out of range");
        chart.domain |= point_bit(p);
      }
    } else if (t[0] == "uspace") {
      if (t.size() != 1) throw ParseError(file, ln.number, "usage: uspace");
      if (have_u) throw ParseError(file, ln.number, "duplicate uspace block");
      chart.u_space = parse_inner_space(cur, opts, ln.number, "uspace");
      have_u = true;
    } else if (t[0] == "vspace") {
      if (t.size() != 1) throw ParseError(file, ln.number, "usage: vspace");
      if (have_v) throw ParseError(file, ln.number, "duplicate vspace block");
      chart.v_space = parse_inner_space(cur, opts, ln.number, "vspace");
      have_v = true;
    } else if (t[0] == "map") {
      if (t.size() != 4) throw ParseError(file, ln.number, "usage: map <w> <u> <v>");
      entries.push_back({parse_int(t[1], file, ln.number, "a base point"),
                         parse_int(t[2], file, ln.number, "a u point"),
                         parse_int(t[3], file, ln.number, "a v point"), ln.number});
    } else if (t[0] == "end") {
      if (t.size() != 1) throw ParseError(file, ln.number, "usage: end");
      if (!have_u || !have_v)
        throw ParseError(file, header_line, "chart needs uspace and vspace blocks");
      chart.forward.assign(static_cast<std::size_t>(base.size()), -1);
      chart.inverse.assign(static_cast<std::size_t>(chart.flat_size()), -1);
      for (const MapEntry& e : entries) {
        if (e.w < 0 || e.w >= base.size())
          throw ParseError(file, e.line, "map base point out of range");
        if (e.u < 0 || e.u >= chart.u_space.size() || e.v < 0 || e.v >= chart.v_space.size())
          throw ParseError(file, e.line, "map image out of range");
        if (chart.forward[static_cast<std::size_t>(e.w)] != -1)
          throw ParseError(file, e.line, "duplicate map entry for point " + std::to_string(e.w));
        PointIndex uv = chart.flat(e.u, e.v);
        chart.forward[static_cast<std::size_t>(e.w)] = uv;
        // first entry wins on collision; check_chart reports not-bijective
        if (chart.inverse[static_cast<std::size_t>(uv)] == -1)
          chart.inverse[static_cast<std::size_t>(uv)] = e.w;
      }
      return chart;
    } else {
      throw ParseError(file, ln.number, "unexpected directive '" + t[0] + "' in a chart block");
    }
  }
  throw ParseError(file, cur.eof_line(), "chart block not closed with 'end'");
}

inline void emit_points_rels(std::ostream& os, const FiniteSpace& s) {
  os << "points " << s.size() << "\n";
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j)
      if (i != j && s.leq(i, j)) os << "rel " << i << " " << j << "\n";
}

}  // namespace detail

inline SpaceFile parse_space_file(std::string_view text, const std::string& file,
                                  ParseOptions opts = {}) {
  SpaceFile out;
  std::string name;
  int header_line = 0;
  int points = -1;
  std::vector<std::pair<PointIndex, PointIndex>> rels;
  bool in_space = false;
  int open_subset = -1;

  auto close_space = [&] {
    if (!in_space) return;
    if (points < 0)
      throw ParseError(file, header_line, "space '" + name + "' has no points directive");
    try {
      out.spaces.push_back({name, FiniteSpace::from_relation(points, rels, opts.strict_relations)});
    } catch (const std::invalid_argument& e) {
      throw ParseError(file, header_line, "space '" + name + "': " + e.what());
    }
    in_space = false;
    points = -1;
    rels.clear();
  };
  auto close_subset = [&] {
    if (open_subset < 0) return;
    auto& pairs = out.subsets[static_cast<std::size_t>(open_subset)].pairs;
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    open_subset = -1;
  };

  for (const detail::Line& ln : detail::tokenize(text)) {
    const std::vector<std::string>& t = ln.tokens;
    if (t[0] == "space") {
      if (open_subset >= 0)
        throw ParseError(file, ln.number, "space block after a subset block");
      close_space();
      if (t.size() != 2) throw ParseError(file, ln.number, "usage: space <name>");
      name = t[1];
      header_line = ln.number;
      in_space = true;
    } else if (t[0] == "points") {
      if (!in_space) throw ParseError(file, ln.number, "points directive outside a space block");
      if (t.size() != 2) throw ParseError(file, ln.number, "usage: points <n>");
      if (points >= 0) throw ParseError(file, ln.number, "duplicate points directive");
      points = detail::parse_int(t[1], file, ln.number, "a point count");
      if (points < 0 || points > kMaxPoints)
        throw ParseError(file, ln.number, "point count out of range");
    } else if (t[0] == "rel") {
      if (!in_space) throw ParseError(file, ln.number, "rel directive outside a space block");
      if (t.size() != 3) throw ParseError(file, ln.number, "usage: rel <i> <j>");
      if (points < 0) throw ParseError(file, ln.number, "rel before points");
      int i = detail::parse_int(t[1], file, ln.number, "a point");
      int j = detail::parse_int(t[2], file, ln.number, "a point");
      if (i < 0 || i >= points || j < 0 || j >= points)
        throw ParseError(file, ln.number, "rel point out of range");
      rels.emplace_back(i, j);
    } else if (t[0] == "subset") {
      close_space();
      close_subset();
      if (t.size() != 2) throw ParseError(file, ln.number, "usage: subset <name>");
      if (out.spaces.size() != 2)
        throw ParseError(file, ln.number, "a subset needs exactly two preceding spaces");
      out.subsets.push_back({t[1], {}});
      open_subset = static_cast<int>(out.subsets.size()) - 1;
    } else if (t[0] == "pair") {
      if (open_subset < 0) throw ParseError(file, ln.number, "pair directive outside a subset block");
      if (t.size() != 3) throw ParseError(file, ln.number, "usage: pair <a> <b>");
      int a = detail::parse_int(t[1], file, ln.number, "a point");
      int b = detail::parse_int(t[2], file, ln.number, "a point");
      if (a < 0 || a >= out.spaces[0].space.size())
        throw ParseError(file, ln.number, "pair's first point out of range for the first space");
      if (b < 0 || b >= out.spaces[1].space.size())
        throw ParseError(file, ln.number, "pair's second point out of range for the second space");
      out.subsets[static_cast<std::size_t>(open_subset)].pairs.emplace_back(a, b);
    } else {
      throw ParseError(file, ln.number, "unknown directive '" + t[0] + "'");
    }
  }
  close_space();
  close_subset();
  return out;
}

inline SpaceFile load_space_file(const std::string& path, ParseOptions opts = {}) {
  return parse_space_file(detail::read_file(path), path, opts);
}

/// Normalized emission: the full non-reflexive leq relation sorted, subset
/// pairs sorted and deduplicated. parse(emit(f)) == f for any f produced by
/// the parser.
inline std::string emit_space_file(const SpaceFile& f) {
  std::ostringstream os;
  bool first = true;
  for (const NamedSpace& ns : f.spaces) {
    if (!first) os << "\n";
    first = false;
    os << "space " << ns.name << "\n";
    detail::emit_points_rels(os, ns.space);
  }
  for (const SubsetDecl& sd : f.subsets) {
    if (!first) os << "\n";
    first = false;
    os << "subset " << sd.name << "\n";
    std::vector<std::pair<PointIndex, PointIndex>> pairs = sd.pairs;
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& [a, b] : pairs) os << "pair " << a << " " << b << "\n";
  }
  return os.str();
}

/// Two spaces plus one subset, ready to analyze.
struct AnalysisInput {
  NamedSpace x;
  NamedSpace y;
  SubsetDecl subset;
};

inline AnalysisInput to_analysis_input(const SpaceFile& f) {
  if (f.spaces.size() != 2)
    throw std::invalid_argument("analysis input needs exactly two spaces, found " +
                                std::to_string(f.spaces.size()));
  if (f.subsets.size() != 1)
    throw std::invalid_argument("analysis input needs exactly one subset, found " +
                                std::to_string(f.subsets.size()));
  return {f.spaces[0], f.spaces[1], f.subsets[0]};
}

inline TwoSpace parse_two_space(std::string_view text, const std::string& file,
                                ParseOptions opts = {}) {
  detail::LineCursor cur(detail::tokenize(text), file);
  if (cur.done()) throw ParseError(file, 1, "empty model file; expected '2space'");
  {
    detail::Line ln = cur.next();
    if (ln.tokens[0] != "2space" || ln.tokens.size() != 1)
      throw ParseError(file, ln.number, "model files start with a '2space' line");
  }
  TwoSpace model;
  bool have_base = false;
  while (!cur.done()) {
    detail::Line ln = cur.next();
    const std::vector<std::string>& t = ln.tokens;
    if (t[0] == "base") {
      if (t.size() != 1) throw ParseError(file, ln.number, "usage: base");
      if (have_base) throw ParseError(file, ln.number, "duplicate base block");
      model.base = detail::parse_inner_space(cur, opts, ln.number, "base");
      have_base = true;
    } else if (t[0] == "chart") {
      if (t.size() != 1) throw ParseError(file, ln.number, "usage: chart");
      if (!have_base) throw ParseError(file, ln.number, "chart block before the base block");
      model.charts.push_back(detail::parse_chart(cur, opts, ln.number, model.base));
    } else {
      throw ParseError(file, ln.number,
                       "unknown directive '" + t[0] + "' (expected base or chart)");
    }
  }
  if (!have_base) throw ParseError(file, cur.eof_line(), "model file has no base block");
  return model;
}

inline TwoSpace load_two_space(const std::string& path, ParseOptions opts = {}) {
  return parse_two_space(detail::read_file(path), path, opts);
}

/// Normalized emission; forward entries outside the domain are dropped, the
/// inverse is left implicit. parse(emit(m)) == m whenever m's charts keep
/// forward = -1 off the domain (all charts built by this library do).
inline std::string emit_two_space(const TwoSpace& model) {
  std::ostringstream os;
  os << "2space\n\nbase\n";
  detail::emit_points_rels(os, model.base);
  os << "end\n";
  for (const Chart& chart : model.charts) {
    os << "\nchart\n";
    std::vector<PointIndex> dom = mask_points(chart.domain);
    if (!dom.empty()) {
      os << "domain";
      for (PointIndex p : dom) os << " " << p;
      os << "\n";
    }
    os << "uspace\n";
    detail::emit_points_rels(os, chart.u_space);
    os << "end\n";
    os << "vspace\n";
    detail::emit_points_rels(os, chart.v_space);
    os << "end\n";
    for (PointIndex w : dom)
      if (chart.forward[static_cast<std::size_t>(w)] != -1) {
        auto [u, v] = chart.unflat(chart.forward[static_cast<std::size_t>(w)]);
        os << "map " << w << " " << u << " " << v << "\n";
      }
    os << "end\n";
  }
  return os.str();
}

struct TwoMapFile {
  std::string source_path;  // as written in the file
  std::string target_path;
  TwoSpace source;
  TwoSpace target;
  std::vector<PointIndex> h;
};

/// 2-map files reference the two model files (paths relative to the 2map
/// file's directory; no whitespace in paths) and give the point map as
/// `map <w> <w'>` lines, one per source base point.
inline TwoMapFile load_two_map(const std::string& path, ParseOptions opts = {}) {
  detail::LineCursor cur(detail::tokenize(detail::read_file(path)), path);
  if (cur.done()) throw ParseError(path, 1, "empty 2map file; expected '2map'");
  {
    detail::Line ln = cur.next();
    if (ln.tokens[0] != "2map" || ln.tokens.size() != 1)
      throw ParseError(path, ln.number, "2map files start with a '2map' line");
  }
  TwoMapFile out;
  struct MapEntry {
    int w, w2, line;
  };
  std::vector<MapEntry> entries;
  while (!cur.done()) {
    detail::Line ln = cur.next();
    const std::vector<std::string>& t = ln.tokens;
    if (t[0] == "source") {
      if (t.size() != 2) throw ParseError(path, ln.number, "usage: source <model-file>");
      if (!out.source_path.empty()) throw ParseError(path, ln.number, "duplicate source line");
      out.source_path = t[1];
    } else if (t[0] == "target") {
      if (t.size() != 2) throw ParseError(path, ln.number, "usage: target <model-file>");
      if (!out.target_path.empty()) throw ParseError(path, ln.number, "duplicate target line");
      out.target_path = t[1];
    } else if (t[0] == "map") {
      if (t.size() != 3) throw ParseError(path, ln.number, "usage: map <w> <w'>");
      entries.push_back({detail::parse_int(t[1], path, ln.number, "a source point"),
                         detail::parse_int(t[2], path, ln.number, "a target point"), ln.number});
    } else {
      throw ParseError(path, ln.number, "unknown directive '" + t[0] + "' in a 2map file");
    }
  }
  if (out.source_path.empty()) throw ParseError(path, cur.eof_line(), "2map file has no source line");
  if (out.target_path.empty()) throw ParseError(path, cur.eof_line(), "2map file has no target line");
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  out.source = load_two_space((dir / out.source_path).string(), opts);
  out.target = load_two_space((dir / out.target_path).string(), opts);
  out.h.assign(static_cast<std::size_t>(out.source.base.size()), -1);
  for (const MapEntry& e : entries) {
    if (e.w < 0 || e.w >= out.source.base.size())
      throw ParseError(path, e.line, "map source point out of range");
    if (e.w2 < 0 || e.w2 >= out.target.base.size())
      throw ParseError(path, e.line, "map target point out of range");
    if (out.h[static_cast<std::size_t>(e.w)] != -1)
      throw ParseError(path, e.line, "duplicate map entry for point " + std::to_string(e.w));
    out.h[static_cast<std::size_t>(e.w)] = e.w2;
  }
  for (int w = 0; w < out.source.base.size(); ++w)
    if (out.h[static_cast<std::size_t>(w)] == -1)
      throw ParseError(path, cur.eof_line(),
                       "no map entry for source point " + std::to_string(w));
  return out;
}

// ---------------------------------------------------------------------------
// report building: one self-describing document per run, stable key order

inline Json make_document(const std::string& command) {
  Json doc;
  doc["schema"] = "fintop.report";
  doc["schema_version"] = 1;
  doc["command"] = command;
  return doc;
}

inline std::string render_structured(const Json& doc) { return doc.dump(2) + "\n"; }

inline Json rel_pairs_json(const std::vector<PointMask>& up) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < up.size(); ++i)
    for (std::size_t j = 0; j < up.size(); ++j)
      if (i != j && mask_contains(up[i], static_cast<PointIndex>(j)))
        arr.push_back(Json::array({i, j}));
  return arr;
}

inline std::vector<PointMask> up_masks(const FiniteSpace& s) {
  std::vector<PointMask> up;
  up.reserve(static_cast<std::size_t>(s.size()));
  for (int p = 0; p < s.size(); ++p) up.push_back(s.minimal_open(p));
  return up;
}

inline Json space_json(const FiniteSpace& s) {
  Json o;
  o["points"] = s.size();
  o["rel"] = rel_pairs_json(up_masks(s));
  return o;
}

inline Json named_space_json(const NamedSpace& ns) {
  Json o;
  o["name"] = ns.name;
  o["points"] = ns.space.size();
  o["rel"] = rel_pairs_json(up_masks(ns.space));
  return o;
}

inline Json mask_json(PointMask m) {
  Json arr = Json::array();
  for (PointIndex p : mask_points(m)) arr.push_back(p);
  return arr;
}

inline Json product_pairs_json(PointMask c, int ny) {
  Json arr = Json::array();
  for (PointIndex p : mask_points(c)) arr.push_back(Json::array({p / ny, p % ny}));
  return arr;
}

inline Json hypothesis_names_json(unsigned mask) {
  Json arr = Json::array();
  for (unsigned bit : {kClosed, kPathConnected, kLocallyProduct})
    if (mask & bit) arr.push_back(hypothesis_name(bit));
  return arr;
}

inline Json analyze_json(const NamedSpace& x, const NamedSpace& y, const std::string& subset_name,
                         const ProductSpace& ps, PointMask c, const TheoremVerdict& v) {
  Json doc = make_document("analyze");
  doc["x"] = named_space_json(x);
  doc["y"] = named_space_json(y);
  doc["subset"] = Json{{"name", subset_name}, {"pairs", product_pairs_json(c, ps.y().size())}};
  Json result;
  result["hypotheses"] = Json{{"closed", v.closed},
                              {"path_connected", v.path_connected},
                              {"locally_product", v.locally_product}};
  result["a"] = mask_json(v.decomposition.a_set);
  result["b"] = mask_json(v.decomposition.b_set);
  result["exact"] = v.decomposition.exact;
  if (v.certificate.ok) {
    result["failing_point"] = nullptr;
  } else {
    auto [a, b] = ps.unflat(v.certificate.failing_point);
    result["failing_point"] = Json::array({a, b});
  }
  doc["result"] = std::move(result);
  return doc;
}

inline std::string yesno(bool b) { return b ? "yes" : "no"; }

inline std::string mask_set_string(PointMask m) {
  std::string s = "{";
  bool first = true;
  for (PointIndex p : mask_points(m)) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(p);
  }
  return s + "}";
}

inline std::string pair_set_string(PointMask c, int ny) {
  std::string s = "{";
  bool first = true;
  for (PointIndex p : mask_points(c)) {
    if (!first) s += ", ";
    first = false;
    s += "(" + std::to_string(p / ny) + "," + std::to_string(p % ny) + ")";
  }
  return s + "}";
}

inline std::string rel_pairs_string(const std::vector<PointMask>& up) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < up.size(); ++i)
    for (std::size_t j = 0; j < up.size(); ++j)
      if (i != j && mask_contains(up[i], static_cast<PointIndex>(j))) {
        if (!first) s += ", ";
        first = false;
        s += "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
  return s + "}";
}

inline std::string hypothesis_names_string(unsigned mask) {
  std::string s;
  for (unsigned bit : {kClosed, kPathConnected, kLocallyProduct})
    if (mask & bit) {
      if (!s.empty()) s += " ";
      s += hypothesis_name(bit);
    }
  return s.empty() ? "(none)" : s;
}

inline std::string analyze_text(const NamedSpace& x, const NamedSpace& y,
                                const std::string& subset_name, const ProductSpace& ps,
                                PointMask c, const TheoremVerdict& v) {
  std::ostringstream os;
  os << "x: " << x.name << " (" << x.space.size() << " points)\n";
  os << "y: " << y.name << " (" << y.space.size() << " points)\n";
  os << "subset " << subset_name << ": " << pair_set_string(c, ps.y().size()) << "\n";
  os << "closed: " << yesno(v.closed) << "\n";
  os << "path-connected: " << yesno(v.path_connected) << "\n";
  os << "locally-product: " << yesno(v.locally_product);
  if (!v.certificate.ok) {
    auto [a, b] = ps.unflat(v.certificate.failing_point);
    os << " (fails at (" << a << "," << b << "))";
  }
  os << "\n";
  os << "a: " << mask_set_string(v.decomposition.a_set) << "\n";
  os << "b: " << mask_set_string(v.decomposition.b_set) << "\n";
  os << "exact: " << yesno(v.decomposition.exact) << "\n";
  if (!v.hypotheses_hold())
    os << "verdict: hypotheses not satisfied\n";
  else if (v.conclusion_holds)
    os << "verdict: hypotheses hold and C = A x B\n";
  else
    os << "verdict: VIOLATION - hypotheses hold but C != A x B\n";
  return os.str();
}

inline Json finding_json(const Finding& f, int ny) {
  Json o;
  o["x_index"] = f.x_index;
  o["y_index"] = f.y_index;
  o["x_rel"] = rel_pairs_json(f.x_up);
  o["y_rel"] = rel_pairs_json(f.y_up);
  o["c"] = product_pairs_json(f.c, ny);
  o["hypotheses"] = hypothesis_names_json(f.flags);
  o["exact"] = f.exact;
  if (!f.fence.empty()) {
    Json fence = Json::array();
    for (PointIndex p : f.fence) fence.push_back(Json::array({p / ny, p % ny}));
    o["fence"] = std::move(fence);
    o["missing_pair"] = Json::array({f.missing_a, f.missing_b});
  }
  return o;
}

/// Structured sweep report. Wall-clock duration and worker count are left
/// out on purpose: identical (inputs, config) must give identical bytes.
inline Json sweep_report_json(const SweepReport& r, const std::string& command) {
  const bool search = command == "search";
  const bool fences = command == "fences";
  Json doc = make_document(command);
  Json cfg;
  cfg["nx"] = r.config.nx;
  cfg["ny"] = r.config.ny;
  cfg["require"] = hypothesis_names_json(r.config.require);
  cfg["mode"] = search ? "search" : "verify";
  cfg["empty_is_path_connected"] = r.config.empty_is_path_connected;
  cfg["max_findings"] = r.config.max_findings;
  if (fences) cfg["max_fence_len"] = r.config.max_fence_len;
  if (r.config.sampling()) {
    cfg["seed"] = r.config.seed;
    cfg["samples"] = r.config.samples;
  }
  doc["config"] = std::move(cfg);
  doc["exhaustive"] = r.exhaustive;
  doc["pairs_examined"] = r.pairs_examined;
  doc["subsets_examined"] = r.subsets_examined;
  doc["hypothesis_satisfying"] = r.hypothesis_satisfying;
  doc["conclusion_holding"] = r.conclusion_holding;
  if (fences) doc["fences_checked"] = r.fences_checked;
  doc["violations"] = r.violations;
  if (search) {
    doc["counterexamples"] = r.counterexamples;
    if (r.counterexamples == 0)
      doc["note"] = r.exhaustive ? "exhausted, none found at this scale"
                                 : "sampled only; none found in drawn instances";
  }
  Json findings = Json::array();
  for (const Finding& f : r.findings) findings.push_back(finding_json(f, r.config.ny));
  doc["findings"] = std::move(findings);
  return doc;
}

inline std::string sweep_report_text(const SweepReport& r, const std::string& command) {
  const bool search = command == "search";
  const bool fences = command == "fences";
  std::ostringstream os;
  os << "command: " << command << "\n";
  os << "x points: " << r.config.nx << "\n";
  os << "y points: " << r.config.ny << "\n";
  os << "require: " << hypothesis_names_string(r.config.require) << "\n";
  if (fences) os << "max fence length: " << r.config.max_fence_len << "\n";
  if (r.config.sampling()) {
    os << "seed: " << r.config.seed << "\n";
    os << "samples: " << r.config.samples << "\n";
  }
  os << "exhaustive: " << yesno(r.exhaustive) << "\n";
  os << "pairs examined: " << r.pairs_examined << "\n";
  os << "subsets examined: " << r.subsets_examined << "\n";
  os << "hypothesis-satisfying: " << r.hypothesis_satisfying << "\n";
  os << "conclusion-holding: " << r.conclusion_holding << "\n";
  if (fences) os << "fences checked: " << r.fences_checked << "\n";
  os << "violations: " << r.violations << "\n";
  if (search) {
    os << "counterexamples: " << r.counterexamples << "\n";
    if (r.counterexamples == 0)
      os << "note: "
         << (r.exhaustive ? "exhausted, none found at this scale"
                          : "sampled only; none found in drawn instances")
         << "\n";
  }
  int index = 1;
  for (const Finding& f : r.findings) {
    os << "finding " << index++ << ":\n";
    os << "  x space " << f.x_index << ": points " << f.x_up.size() << ", rel "
       << rel_pairs_string(f.x_up) << "\n";
    os << "  y space " << f.y_index << ": points " << f.y_up.size() << ", rel "
       << rel_pairs_string(f.y_up) << "\n";
    os << "  c: " << pair_set_string(f.c, r.config.ny) << "\n";
    os << "  hypotheses: " << hypothesis_names_string(f.flags) << "\n";
    if (!f.fence.empty()) {
      os << "  fence:";
      for (PointIndex p : f.fence)
        os << " (" << p / r.config.ny << "," << p % r.config.ny << ")";
      os << "\n  missing pair: (" << f.missing_a << "," << f.missing_b << ")\n";
    }
  }
  os << "duration: " << std::fixed << std::setprecision(3) << r.seconds << "s\n";
  return os.str();
}

inline Json enumerate_json(int n, const std::vector<NamedSpace>& listed, bool distinct,
                           std::size_t labeled_count) {
  Json doc = make_document("enumerate");
  doc["points"] = n;
  doc["distinct_up_to_iso"] = distinct;
  if (distinct) doc["labeled_count"] = labeled_count;
  doc["count"] = listed.size();
  Json arr = Json::array();
  for (const NamedSpace& ns : listed) arr.push_back(named_space_json(ns));
  doc["spaces"] = std::move(arr);
  return doc;
}

inline Json model_json(const TwoSpace& m) {
  Json o;
  o["base"] = space_json(m.base);
  Json charts = Json::array();
  for (const Chart& c : m.charts) {
    Json cj;
    cj["domain"] = mask_json(c.domain);
    cj["uspace"] = space_json(c.u_space);
    cj["vspace"] = space_json(c.v_space);
    Json map = Json::array();
    for (PointIndex w : mask_points(c.domain))
      if (c.forward[static_cast<std::size_t>(w)] != -1) {
        auto [u, v] = c.unflat(c.forward[static_cast<std::size_t>(w)]);
        map.push_back(Json::array({w, u, v}));
      }
    cj["map"] = std::move(map);
    charts.push_back(std::move(cj));
  }
  o["charts"] = std::move(charts);
  return o;
}

inline const char* two_space_failure_kind(TwoSpaceReport::Kind k) {
  switch (k) {
    case TwoSpaceReport::Kind::none: return "none";
    case TwoSpaceReport::Kind::chart: return "chart";
    case TwoSpaceReport::Kind::coverage: return "coverage";
    case TwoSpaceReport::Kind::compatibility: return "compatibility";
  }
  return "?";
}

inline Json two_space_report_json(const TwoSpaceReport& r, bool strict_mode) {
  Json o;
  o["valid"] = r.valid;
  if (strict_mode) o["strict_valid"] = r.strict_valid;
  if (!r.valid) {
    Json fail;
    fail["kind"] = two_space_failure_kind(r.kind);
    if (r.kind == TwoSpaceReport::Kind::chart) {
      fail["chart_index"] = r.chart_index;
      fail["issue"] = to_string(r.chart_issue);
    } else if (r.kind == TwoSpaceReport::Kind::compatibility) {
      fail["chart_i"] = r.chart_i;
      fail["chart_j"] = r.chart_j;
      fail["point"] = r.point;
    }
    fail["message"] = r.message;
    o["failure"] = std::move(fail);
  } else {
    o["failure"] = nullptr;
    if (strict_mode && !r.strict_valid) {
      Json fail;
      fail["chart_i"] = r.strict_chart_i;
      fail["chart_j"] = r.strict_chart_j;
      fail["point"] = r.strict_point;
      fail["message"] = r.message;
      o["strict_failure"] = std::move(fail);
    } else if (strict_mode) {
      o["strict_failure"] = nullptr;
    }
  }
  return o;
}

inline Json check_two_space_json(const TwoSpace& model, const TwoSpaceReport& r, bool strict_mode) {
  Json doc = make_document("check-2space");
  doc["strict"] = strict_mode;
  doc["model"] = model_json(model);
  doc["result"] = two_space_report_json(r, strict_mode);
  return doc;
}

inline std::string check_two_space_text(const TwoSpace& model, const TwoSpaceReport& r,
                                        bool strict_mode) {
  std::ostringstream os;
  os << "base points: " << model.base.size() << "\n";
  os << "charts: " << model.charts.size() << "\n";
  os << "valid: " << yesno(r.valid) << "\n";
  if (!r.valid) os << "failure: " << r.message << "\n";
  if (strict_mode) {
    os << "strict valid: " << yesno(r.strict_valid) << "\n";
    if (r.valid && !r.strict_valid) os << "strict failure: " << r.message << "\n";
  }
  return os.str();
}

inline const char* two_map_failure_kind(TwoMapReport::Kind k) {
  switch (k) {
    case TwoMapReport::Kind::none: return "none";
    case TwoMapReport::Kind::not_continuous: return "not-continuous";
    case TwoMapReport::Kind::not_contained: return "not-contained";
    case TwoMapReport::Kind::not_split: return "not-split";
  }
  return "?";
}

inline Json check_two_map_json(const TwoMapFile& mf, const TwoMapReport& r, bool strict_mode) {
  Json doc = make_document("check-2map");
  doc["strict"] = strict_mode;
  doc["source"] = mf.source_path;
  doc["target"] = mf.target_path;
  Json map = Json::array();
  for (std::size_t w = 0; w < mf.h.size(); ++w) map.push_back(Json::array({w, mf.h[w]}));
  doc["map"] = std::move(map);
  Json result;
  result["ok"] = r.ok;
  if (strict_mode) result["strict_ok"] = r.strict_ok;
  if (!r.ok) {
    Json fail;
    fail["kind"] = two_map_failure_kind(r.kind);
    fail["point"] = r.point;
    if (r.kind != TwoMapReport::Kind::not_continuous) {
      fail["src_chart"] = r.src_chart;
      fail["dst_chart"] = r.dst_chart;
    }
    fail["message"] = r.message;
    result["failure"] = std::move(fail);
  } else {
    result["failure"] = nullptr;
    if (strict_mode && !r.strict_ok) {
      Json fail;
      fail["point"] = r.strict_point;
      fail["src_chart"] = r.strict_src_chart;
      fail["dst_chart"] = r.strict_dst_chart;
      fail["message"] = r.message;
      result["strict_failure"] = std::move(fail);
    } else if (strict_mode) {
      result["strict_failure"] = nullptr;
    }
  }
  doc["result"] = std::move(result);
  return doc;
}

inline std::string check_two_map_text(const TwoMapFile& mf, const TwoMapReport& r,
                                      bool strict_mode) {
  std::ostringstream os;
  os << "source: " << mf.source_path << " (" << mf.source.charts.size() << " charts)\n";
  os << "target: " << mf.target_path << " (" << mf.target.charts.size() << " charts)\n";
  os << "ok: " << yesno(r.ok) << "\n";
  if (!r.ok) os << "failure: " << r.message << "\n";
  if (strict_mode) {
    os << "strict ok: " << yesno(r.strict_ok) << "\n";
    if (r.ok && !r.strict_ok) os << "strict failure: " << r.message << "\n";
  }
  return os.str();
}

inline Json two_product_json(const TwoSpace& result) {
  Json doc = make_document("2product");
  doc["model"] = model_json(result);
  doc["valid"] = true;
  return doc;
}

}  // namespace fintop
