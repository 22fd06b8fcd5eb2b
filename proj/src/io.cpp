#include "lagskel/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lagskel/domains.hpp"

namespace lagskel {
namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

Rational number(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument&) {
      throw ParseError(where + ": '" + j.get<std::string>() + "' is not a rational number");
    }
  }
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number_float()) throw ParseError(where + ": floating-point numbers are not exact; write them as strings");
  throw ParseError(where + ": expected a number");
}

std::size_t index(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ParseError(where + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  return j;
}

RationalVector numbers(const json& j, const std::string& where) {
  RationalVector out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

GridProblem grid_geometry(const std::optional<GridShape>& grid, std::size_t n, const std::string& where) {
  if (!grid) throw ParseError(where + ": this builder needs a \"grid\" entry");
  if (grid->width * grid->height != n) throw ParseError(where + ": grid size does not match the node count");
  GridProblem g;
  g.width = grid->width;
  g.height = grid->height;
  return g;
}

ConstraintSpec parse_constraint(const json& c, std::size_t n, const std::optional<GridShape>& grid,
                                const std::string& where) {
  if (!c.is_object()) throw ParseError(where + ": expected an object");
  ConstraintSpec spec;
  if (auto it = c.find("name"); it != c.end()) {
    if (!it->is_string()) throw ParseError(where + ".name: expected a string");
    spec.name = it->get<std::string>();
  }
  if (auto it = c.find("builder"); it != c.end()) {
    if (!it->is_string()) throw ParseError(where + ".builder: expected a string");
    const std::string builder = it->get<std::string>();
    auto b_hat = [&] { return c.contains("b_hat") ? number(c["b_hat"], where + ".b_hat") : Rational(0); };
    auto mu = [&] {
      RationalVector m = numbers(member(c, "mu", where), where + ".mu");
      if (m.size() != 2) throw ParseError(where + ".mu: expected [mu_v, mu_h]");
      return std::array<Rational, 2>{m[0], m[1]};
    };
    ConstraintSpec built;
    if (builder == "size") {
      built = size_constraint(n);
    } else if (builder == "boundary") {
      built = {"boundary", {}, 1, 0};
    } else if (builder == "mean_v" || builder == "mean_h") {
      const Rational b = b_hat();
      auto [v, h] = mean_constraint(grid_geometry(grid, n, where), {b, b});
      built = builder == "mean_v" ? v : h;
    } else if (builder == "cov") {
      built = covariance_constraint(grid_geometry(grid, n, where), mu(), b_hat());
    } else if (builder == "var_v" || builder == "var_h") {
      const auto m = mu();
      const bool vertical = builder == "var_v";
      built = variance_constraint(grid_geometry(grid, n, where), vertical ? Axis::kVertical : Axis::kHorizontal,
                                  vertical ? m[0] : m[1], b_hat());
    } else {
      throw ParseError(where + ".builder: unknown builder '" + builder + "'");
    }
    if (spec.name.empty()) spec.name = built.name;
    spec.node_coeffs = std::move(built.node_coeffs);
    spec.edge_coeff = built.edge_coeff;
    spec.offset = built.offset;
    return spec;
  }
  if (auto it = c.find("node_coeffs"); it != c.end()) {
    if (it->is_string() && it->get<std::string>() == "all_ones")
      spec.node_coeffs.assign(n, Rational(1));
    else
      spec.node_coeffs = numbers(*it, where + ".node_coeffs");
  }
  if (c.contains("edge_coeff")) spec.edge_coeff = number(c["edge_coeff"], where + ".edge_coeff");
  if (c.contains("offset")) spec.offset = number(c["offset"], where + ".offset");
  return spec;
}

json rational_json(const Rational& q) { return to_string(q); }

json rational_array(const RationalVector& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : ValidationError(line ? message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                           : message),
      line_(line),
      column_(column) {}

ProblemFile parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON", line, column);
  }
  if (!doc.is_object()) throw ParseError("problem file must be a JSON object");
  const json& version = member(doc, "schema_version", "problem");
  if (!version.is_number_integer() || version.get<int>() != kProblemSchemaVersion)
    throw ParseError("unsupported schema_version (expected " + std::to_string(kProblemSchemaVersion) + ")");

  ProblemFile out;
  if (auto it = doc.find("grid"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("grid: expected an object");
    out.grid = GridShape{index(member(*it, "width", "grid"), "grid.width"), index(member(*it, "height", "grid"), "grid.height")};
  }

  const json& nodes = array(member(doc, "nodes", "problem"), "nodes");
  std::vector<UnaryTerm> unary;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    RationalVector pair = numbers(nodes[i], where);
    if (pair.size() != 2) throw ParseError(where + ": expected [cost0, cost1]");
    unary.push_back({pair[0], pair[1]});
  }
  std::vector<PairwiseTerm> edges;
  if (auto it = doc.find("edges"); it != doc.end()) {
    for (std::size_t k = 0; k < array(*it, "edges").size(); ++k) {
      const std::string where = "edges[" + std::to_string(k) + "]";
      const json& e = (*it)[k];
      if (!e.is_array() || e.size() != 3) throw ParseError(where + ": expected [u, v, [t00, t01, t10, t11]]");
      RationalVector table = numbers(e[2], where + "[2]");
      if (table.size() != 4) throw ParseError(where + ": table needs four entries");
      edges.push_back({index(e[0], where + "[0]"), index(e[1], where + "[1]"), table[0], table[1], table[2], table[3]});
    }
  }
  Rational constant = doc.contains("constant") ? number(doc["constant"], "constant") : Rational(0);
  const std::size_t n = unary.size();

  const json& constraints = array(member(doc, "constraints", "problem"), "constraints");
  std::vector<ConstraintSpec> specs;
  RationalVector target;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const std::string where = "constraints[" + std::to_string(i) + "]";
    specs.push_back(parse_constraint(constraints[i], n, out.grid, where));
    target.push_back(constraints[i].contains("target") ? number(constraints[i]["target"], where + ".target")
                                                       : Rational(0));
  }

  const json& box = array(member(doc, "box", "problem"), "box");
  RationalVector lo, hi;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const std::string where = "box[" + std::to_string(i) + "]";
    RationalVector range = numbers(box[i], where);
    if (range.size() != 2) throw ParseError(where + ": expected [lo, hi]");
    lo.push_back(range[0]);
    hi.push_back(range[1]);
  }

  try {
    PairwiseEnergy f(std::move(unary), std::move(edges), constant);
    out.problem = LagrangianProblem(std::move(f), std::move(specs), std::move(target), Box(lo, hi));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  return out;
}

ProblemFile load_problem(const std::filesystem::path& path) { return parse_problem(read_text_file(path)); }

std::string serialize_problem(const ProblemFile& file) {
  const auto& p = file.problem;
  json doc;
  doc["schema_version"] = kProblemSchemaVersion;
  if (file.grid) doc["grid"] = {{"width", file.grid->width}, {"height", file.grid->height}};
  json nodes = json::array();
  for (const auto& u : p.energy().unary()) nodes.push_back({to_string(u.zero), to_string(u.one)});
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : p.energy().edges())
    edges.push_back({e.u, e.v, {to_string(e.t00), to_string(e.t01), to_string(e.t10), to_string(e.t11)}});
  doc["edges"] = std::move(edges);
  if (p.energy().constant() != 0) doc["constant"] = rational_json(p.energy().constant());
  json constraints = json::array();
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    const auto& c = p.constraints()[i];
    constraints.push_back({{"name", c.name},
                           {"node_coeffs", rational_array(c.node_coeffs)},
                           {"edge_coeff", rational_json(c.edge_coeff)},
                           {"offset", rational_json(c.offset)},
                           {"target", rational_json(p.target()[i])}});
  }
  doc["constraints"] = std::move(constraints);
  json box = json::array();
  for (std::size_t i = 0; i < p.box().size(); ++i)
    box.push_back({to_string(p.box().lower()[i]), to_string(p.box().upper()[i])});
  doc["box"] = std::move(box);
  return doc.dump(2) + "\n";
}

std::string stats_json(const SearchReport& report, const CharacteristicSet& set, bool complete, bool include_timing) {
  json doc;
  doc["complete"] = complete;
  doc["oracle_calls"] = report.oracle_calls;
  doc["num_vertices"] = report.num_vertices;
  doc["num_minimizers"] = report.num_minimizers;
  doc["degenerate_vertices"] = report.degenerate_vertices;
  doc["cut_planes"] = report.cut_planes;
  doc["tie_minimizers"] = report.tie_minimizers;
  doc["coincident_cuts"] = report.coincident_cuts;
  doc["general_position"] = report.general_position();
  if (include_timing) doc["wall_time_ms"] = report.wall_time_ms;
  json entries = json::array();
  for (const auto& e : set.entries())
    entries.push_back({{"labeling", to_bitstring(e.labeling)},
                       {"f", to_string(e.f_value)},
                       {"H", rational_array(e.h_value)},
                       {"lambda", rational_array(e.witness_lambda)}});
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

std::string set_table_csv(const CharacteristicSet& set, const std::vector<ConstraintSpec>& constraints) {
  std::ostringstream out;
  out << "index,labeling,f";
  for (std::size_t i = 0; i < constraints.size(); ++i)
    out << ",H_" << (constraints[i].name.empty() ? std::to_string(i + 1) : constraints[i].name);
  for (std::size_t i = 0; i < constraints.size(); ++i) out << ",lambda_" << i + 1;
  out << '\n';
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& e = set.entries()[k];
    out << k << ',' << to_bitstring(e.labeling) << ',' << to_string(e.f_value);
    for (const auto& h : e.h_value) out << ',' << to_string(h);
    for (const auto& l : e.witness_lambda) out << ',' << to_string(l);
    out << '\n';
  }
  return out.str();
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  auto token = [&] {
    std::string t;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string rest;
        std::getline(in, rest);
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!t.empty()) break;
      } else {
        t.push_back(ch);
      }
    }
    return t;
  };
  if (token() != "P5") throw ParseError(path.string() + ": not a binary PGM (P5) file");
  GrayImage img;
  try {
    img.width = std::stoul(token());
    img.height = std::stoul(token());
    if (std::stoul(token()) > 255) throw ParseError(path.string() + ": only 8-bit PGM files are supported");
  } catch (const std::logic_error&) {
    throw ParseError(path.string() + ": malformed PGM header");
  }
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) throw ParseError(path.string() + ": truncated PGM data");
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
}

CostMap read_cost_map(const std::filesystem::path& path) {
  CostMap map;
  if (path.extension() == ".pgm") {
    const GrayImage img = read_pgm(path);
    map.width = img.width;
    map.height = img.height;
    for (auto p : img.pixels) map.values.emplace_back(static_cast<unsigned>(p));
    return map;
  }
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RationalVector row;
    try {
      row = parse_rational_list(line);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no, 1);
    }
    if (map.height == 0) map.width = row.size();
    if (row.size() != map.width) throw ParseError(path.string() + ": rows differ in length", line_no, 1);
    map.values.insert(map.values.end(), row.begin(), row.end());
    ++map.height;
  }
  return map;
}

GrayImage mask_image(const Labeling& x, std::size_t width, std::size_t height) {
  if (x.size() != width * height) throw DimensionError("mask size does not match the grid");
  GrayImage img{width, height, {}};
  img.pixels.reserve(x.size());
  for (auto b : x) img.pixels.push_back(b ? 255 : 0);
  return img;
}

Labeling mask_labeling(const GrayImage& image) {
  Labeling x;
  x.reserve(image.pixels.size());
  for (auto p : image.pixels) x.push_back(p != 0);
  return x;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace lagskel
