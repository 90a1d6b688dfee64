#include "dtnlab/common.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace dtnlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::string_view context) {
  std::string buf(trim(text));
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ContractError("invalid number '" + buf + "' in '" + std::string(context) + "'");
  }
  return v;
}

}  // namespace

CatalogSpec CatalogSpec::parse(std::string_view text) {
  CatalogSpec spec;
  text = trim(text);
  const auto colon = text.find(':');
  spec.key = std::string(trim(text.substr(0, colon)));
  if (spec.key.empty()) throw ContractError("empty catalog key in '" + std::string(text) + "'");
  if (colon == std::string_view::npos) return spec;

  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ContractError("expected name=value in '" + std::string(text) + "'");
    }
    const std::string name(trim(item.substr(0, eq)));
    spec.params[name] = parse_double(item.substr(eq + 1), text);
  }
  return spec;
}

std::string CatalogSpec::to_string() const {
  std::ostringstream out;
  out << key;
  char sep = ':';
  for (const auto& [name, value] : params) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out << sep << name << '=' << buf;
    sep = ',';
  }
  return out.str();
}

double CatalogSpec::get(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

void CatalogSpec::require_only(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [name, value] : params) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == name;
    if (!ok) throw ContractError("unknown parameter '" + name + "' for '" + key + "'");
  }
}

std::uint64_t DeterministicRng::next_u64() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace dtnlab
