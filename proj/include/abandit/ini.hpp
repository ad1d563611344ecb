#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace abandit::ini {

struct Section {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> find(const std::string& key) const;
};

// Ordered view of an INI document. Parsing is delegated to
// boost::property_tree; section and key order is preserved.
struct Document {
  std::vector<Section> sections;

  const Section* find(const std::string& name) const;
};

// Throws ValidationError on syntax errors or duplicate sections.
Document parse(const std::string& text);

double to_double(const std::string& text, const std::string& where);
long long to_integer(const std::string& text, const std::string& where);
unsigned long long to_unsigned(const std::string& text, const std::string& where);

// "%.17g" for exact round-trips.
std::string exact(double value);

}  // namespace abandit::ini
