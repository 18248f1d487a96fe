#pragma once

#include <map>
#include <string>

#include "tabletop/backends/backend.hpp"

namespace tabletop {

/// Versioned plain-text instruction assets, one per model-backed role.
/// Loaded from a prompts directory when present; the compiled-in defaults
/// are the same v1 texts so hermetic runs need no files.
struct InstructionSet {
    std::string version = "v1";
    std::map<Role, std::string> texts;

    const std::string& text(Role role) const;
};

InstructionSet default_instructions();

/// Reads <role>_<version>.txt files from `dir`, falling back to the
/// defaults for any missing role.
InstructionSet load_instructions(const std::string& dir, const std::string& version = "v1");

}  // namespace tabletop
