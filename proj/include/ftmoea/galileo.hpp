#pragma once

#include <string>

#include "ftmoea/fault_tree.hpp"

namespace ftmoea {

class ParseError : public FtError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : FtError("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

// FT text format: one `;`-terminated statement per line, `#` comments.
//   basicevents <name>...;          optional explicit universe
//   toplevel <gate>;                exactly one
//   <gate> and|or|<k>of<n> <child>...;
FaultTree parse_ft(const std::string& text);

FaultTree load_ft(const std::string& path);

// Round-trips through parse_ft to a structurally identical tree. The
// universe declaration is emitted whenever the leaves alone would not
// reconstruct it (disconnected BEs or reordered first appearance).
std::string serialize_ft(const FaultTree& ft);

void save_ft(const FaultTree& ft, const std::string& path);

}  // namespace ftmoea
