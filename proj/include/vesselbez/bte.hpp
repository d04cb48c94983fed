#pragma once

#include "vesselbez/bezier.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace vesselbez {

// BTE text format, version 1:
//   line 1   "BTE 1"
//   "#..."   comment; "# source_dims W H" and "# provenance TEXT" are read back into the tree
//   record   "id parent x0 y0 x1 y1 x2 y2 x3 y3 radius" (parent -1 = none), 6 decimals

class BteParseError : public std::runtime_error {
public:
    BteParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Extra "# ..." lines written after the header (provenance stamps from the CLI).
void write_bte(std::ostream& out, const BezierTree& tree, const std::vector<std::string>& comments = {});
void write_bte(const std::filesystem::path& path, const BezierTree& tree,
               const std::vector<std::string>& comments = {});
std::string to_bte_string(const BezierTree& tree, const std::vector<std::string>& comments = {});

BezierTree parse_bte(std::istream& in);
BezierTree parse_bte(const std::filesystem::path& path);
BezierTree parse_bte_string(const std::string& text);

}  // namespace vesselbez
