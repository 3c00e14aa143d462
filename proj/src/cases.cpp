#include "ftmoea/cases.hpp"

#include "ftmoea/galileo.hpp"

namespace ftmoea {

const char* const kCsdText =
    "basicevents TAPE BASIC M2M PLUG C1 C2 C3;\n"
    "toplevel TE;\n"
    "TE or CCF IND;\n"
    "CCF and TAPE BASIC;\n"
    "IND and M2M PLUG VSEAL;\n"
    "VSEAL 2of3 C1 C2 C3;\n";

FaultTree csd_tree() { return parse_ft(kCsdText); }

FailureDataset csd_complete_dataset() {
  return generate_exhaustive(csd_tree());
}

bool is_embedded_case(const std::string& name) { return name == "csd"; }

FaultTree resolve_case(const std::string& name_or_path) {
  if (name_or_path == "csd") return csd_tree();
  return load_ft(name_or_path);
}

}  // namespace ftmoea
