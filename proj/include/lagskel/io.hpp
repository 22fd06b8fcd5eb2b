#pragma once

// File formats: JSON problem files (all numbers as exact decimal or p/q
// strings), JSON statistics, CSV characteristic-set tables, and PGM/CSV
// grids for cost maps and masks.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lagskel/energy.hpp"
#include "lagskel/errors.hpp"
#include "lagskel/solvers.hpp"

namespace lagskel {

inline constexpr int kProblemSchemaVersion = 1;

/// Malformed input. line/column are 1-based and 0 when unknown.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

struct GridShape {
  std::size_t width = 0;
  std::size_t height = 0;
};

struct ProblemFile {
  LagrangianProblem problem;
  std::optional<GridShape> grid;
};

/// Problem document:
///   {"schema_version": 1,
///    "grid": {"width": W, "height": H},                  optional
///    "nodes": [["cost0", "cost1"], ...],
///    "edges": [[u, v, ["t00", "t01", "t10", "t11"]], ...],
///    "constant": "0",                                     optional
///    "constraints": [{"name": ..., "node_coeffs": [...] | "all_ones",
///                     "edge_coeff": ..., "offset": ..., "target": ...}
///                    | {"name": ..., "builder": "size" | "boundary" |
///                       "mean_v" | "mean_h" | "cov" | "var_v" | "var_h",
///                       "b_hat": ..., "mu": [mu_v, mu_h], "target": ...}],
///    "box": [["lo", "hi"], ...]}
/// Numbers are strings ("0.3", "-7/4") or JSON integers; JSON floats are
/// rejected because they are not exact.
ProblemFile parse_problem(std::string_view text);
ProblemFile load_problem(const std::filesystem::path& path);

/// Serializes with explicit coefficients so that parsing the output yields
/// the same rationals.
std::string serialize_problem(const ProblemFile& file);

std::string stats_json(const SearchReport& report, const CharacteristicSet& set, bool complete, bool include_timing);

/// One row per entry: index, labeling bits, f, H per constraint, witness
/// lambda per dimension.
std::string set_table_csv(const CharacteristicSet& set, const std::vector<ConstraintSpec>& constraints);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Cost map from a PGM (integer levels) or a CSV of rationals, chosen by
/// file extension.
struct CostMap {
  std::size_t width = 0;
  std::size_t height = 0;
  RationalVector values;
};

CostMap read_cost_map(const std::filesystem::path& path);

/// Label 1 as 255, label 0 as 0.
GrayImage mask_image(const Labeling& x, std::size_t width, std::size_t height);
/// Any nonzero level is foreground.
Labeling mask_labeling(const GrayImage& image);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lagskel
