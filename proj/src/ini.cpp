#include "abandit/ini.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "abandit/error.hpp"

namespace abandit::ini {

std::optional<std::string> Section::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const Section* Document::find(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Document parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("ini: " + std::string(e.what()));
  }

  Document doc;
  std::set<std::string> seen;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      throw ValidationError("ini: key '" + name + "' outside of any section");
    }
    if (!seen.insert(name).second) {
      throw ValidationError("ini: duplicate section [" + name + "]");
    }
    Section section{name, {}};
    for (const auto& [key, child] : node) {
      section.entries.emplace_back(key, child.get_value<std::string>());
    }
    doc.sections.push_back(std::move(section));
  }
  return doc;
}

double to_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(where + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long to_integer(const std::string& text, const std::string& where) {
  long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(where + ": expected an integer, got '" + text + "'");
  }
  return value;
}

unsigned long long to_unsigned(const std::string& text, const std::string& where) {
  unsigned long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError(where + ": expected a nonnegative integer, got '" + text + "'");
  }
  return value;
}

std::string exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace abandit::ini
