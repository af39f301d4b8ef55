#pragma once

#include <iosfwd>
#include <string>

#include "pathnnt/types.hpp"

namespace pathnnt {

/// Column-name mapping for cohort CSV files.
struct ColumnMap {
  std::string outcome = "I";
  std::string exposure = "A";
  std::string mediator = "M";
  std::string confounder = "L";
};

/// Reads a comma-separated file with a header row. The three binary
/// columns must contain literally "0" or "1"; the confounder must parse as
/// a finite real. Extra columns are ignored.
/// Throws ParseError (with the 1-based line and column name) or Error when
/// the file cannot be opened.
Dataset read_csv(const std::string& path, const ColumnMap& columns = {});

Dataset parse_csv(std::istream& in, const ColumnMap& columns = {});

/// Writes the dataset with header "I,A,M,L" (or the mapped names). The
/// confounder is printed with 17 significant digits so a written file
/// re-reads to bit-identical values.
void write_csv(std::ostream& out, const Dataset& data, const ColumnMap& columns = {});
void write_csv(const std::string& path, const Dataset& data, const ColumnMap& columns = {});

}  // namespace pathnnt
