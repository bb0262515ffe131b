#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "olab/acf.hpp"
#include "olab/geometry.hpp"
#include "olab/matching.hpp"
#include "olab/solver.hpp"
#include "olab/types.hpp"

namespace olab::io {

inline constexpr const char* kSchemaLine = "# obstacle-lab schema v1";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

/// Schema line, column header, one line per row.
std::string to_csv(const Table& t);
Table parse_csv(const std::string& text);

Table profile_table(const acf::ACFProfile& p);
Table section_table(const geom::SectionProfile& p);
/// Columns x0..x{N-1}, u.
Table field_table(const ScalarField& f);

/// Grid metadata and residuals: dim, lower, upper, nodes, h, residuals.{pde,pos,comp}.
std::string field_sidecar_json(const ScalarField& f, const solver::Residuals& r);
/// Rebuilds a field from its CSV and sidecar, checking that the node coordinates match the grid.
ScalarField read_field(const std::string& csv, const std::string& sidecar);

/// axes, rotation, gamma, tau_prime, sigma, residuals, provenance.
std::string matched_json(const match::MatchedParaboloid& m);
match::MatchedParaboloid parse_matched_json(const std::string& text);

/// Files staged in memory and written together; nothing reaches the directory unless commit succeeds
/// up to the final renames.
class OutputSet {
public:
  void add(const std::string& name, std::string content);
  void commit(const std::filesystem::path& dir) const;
  const std::map<std::string, std::string>& files() const { return files_; }

private:
  std::map<std::string, std::string> files_;
};

std::string read_file(const std::filesystem::path& p);

}  // namespace olab::io
