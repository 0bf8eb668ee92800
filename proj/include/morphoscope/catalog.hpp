#pragma once

// Built-in scenarios, stored as configuration documents.

#include <string>
#include <vector>

#include "morphoscope/config.hpp"

namespace morpho {

struct CatalogEntry {
  std::string name;
  std::string description;
};

const std::vector<CatalogEntry>& catalog_entries();
bool in_catalog(const std::string& name);
/// Throws ConfigError for unknown names.
json catalog_config(const std::string& name);

/// "catalog:NAME" resolves to a built-in entry, anything else is a file path.
json resolve_config(const std::string& spec);

}  // namespace morpho
