#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nhssh/model.hpp"

namespace nhssh {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// HoppingSet / ChainSpec
// ---------------------------------------------------------------------------

inline ModelKind parse_kind(const std::string& s) {
  if (s == "ssh") return ModelKind::SSH;
  if (s == "ext1") return ModelKind::Ext1;
  if (s == "ext2") return ModelKind::Ext2;
  throw Error(Errc::ConfigError, "unknown model kind '" + s + "'");
}

inline std::string kind_key(ModelKind k) {
  switch (k) {
    case ModelKind::SSH: return "ssh";
    case ModelKind::Ext1: return "ext1";
    case ModelKind::Ext2: return "ext2";
  }
  return "?";
}

/// {"kind": "ext1", "t": {"0": [tL, tR], "1": [...], "2": [...]}}
inline json to_json(const HoppingSet& h) {
  json t = json::object();
  for (int c : h.classes()) t[std::to_string(c)] = json::array({h.left(c), h.right(c)});
  return json{{"kind", kind_key(h.kind())}, {"t", t}};
}

inline HoppingSet hopping_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("t"))
    throw Error(Errc::ConfigError, "model needs \"kind\" and \"t\"");
  const ModelKind kind = parse_kind(j.at("kind").get<std::string>());
  const json& t = j.at("t");
  if (!t.is_object()) throw Error(Errc::ConfigError, "\"t\" must be an object");

  std::map<int, std::pair<double, double>> bonds;
  for (auto it = t.begin(); it != t.end(); ++it) {
    std::string key = it.key();
    if (key == "\xE2\x88\x92" "1") key = "-1";  // typographic minus
    int cls = 0;
    try {
      std::size_t used = 0;
      cls = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, "bond class key '" + it.key() + "' is not an integer");
    }
    const json& v = it.value();
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw Error(Errc::ConfigError, "bond " + key + " must be [tL, tR]");
    bonds[cls] = {v[0].get<double>(), v[1].get<double>()};
  }
  const HoppingSet probe = kind == ModelKind::SSH    ? HoppingSet::ssh(1, 1, 1, 1)
                           : kind == ModelKind::Ext1 ? HoppingSet::ext1(1, 1, 1, 1, 1, 1)
                                                     : HoppingSet::ext2(1, 1, 1, 1, 1, 1);
  std::vector<double> flat;
  for (int c : probe.classes()) {
    auto it = bonds.find(c);
    if (it == bonds.end())
      throw Error(Errc::ConfigError, "missing bond class " + std::to_string(c));
    flat.push_back(it->second.first);
    flat.push_back(it->second.second);
    bonds.erase(it);
  }
  if (!bonds.empty())
    throw Error(Errc::ConfigError,
                "bond class " + std::to_string(bonds.begin()->first) + " does not belong to this model");
  return HoppingSet::from_flat(kind, flat);
}

inline json to_json(const ChainSpec& c) {
  return json{{"n_cells", c.n_cells},
              {"parity", c.parity == Parity::Odd ? "odd" : "even"},
              {"boundary", c.boundary == Boundary::PBC ? "pbc" : "obc"}};
}

inline ChainSpec chain_from_json(const json& j) {
  ChainSpec c;
  if (!j.is_object()) throw Error(Errc::ConfigError, "chain must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "n_cells") {
      if (!it.value().is_number_integer()) throw Error(Errc::ConfigError, "n_cells must be an integer");
      c.n_cells = it.value().get<int>();
    } else if (k == "parity") {
      const auto v = it.value().get<std::string>();
      if (v != "even" && v != "odd") throw Error(Errc::ConfigError, "parity must be even|odd");
      c.parity = v == "odd" ? Parity::Odd : Parity::Even;
    } else if (k == "boundary") {
      const auto v = it.value().get<std::string>();
      if (v != "obc" && v != "pbc") throw Error(Errc::ConfigError, "boundary must be obc|pbc");
      c.boundary = v == "pbc" ? Boundary::PBC : Boundary::OBC;
    } else {
      throw Error(Errc::ConfigError, "unknown chain field '" + k + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Deterministic serialization: every double printed with 17 significant
// digits, keys in insertion order.
// ---------------------------------------------------------------------------

namespace detail {
inline void escape(std::ostream& os, const std::string& s) {
  os << json(s).dump();
}

inline void dump17(std::ostream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        escape(os, it.key());
        os << ": ";
        dump17(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // short numeric arrays stay on one line
      bool flat = j.size() <= 4;
      for (const auto& v : j) flat = flat && v.is_primitive();
      os << "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ",";
        first = false;
        if (flat) {
          if (&v != &j.front()) os << " ";
        } else {
          os << "\n" << pad;
        }
        dump17(os, v, indent, depth + 1);
      }
      if (!flat) os << "\n" << close;
      os << "]";
      return;
    }
    case json::value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) {
        os << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string s = buf;
      // keep it a JSON float
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      os << s;
      return;
    }
    default:
      os << j.dump();
  }
}
}  // namespace detail

inline std::string dump_json17(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::dump17(os, j, indent, 0);
  os << "\n";
  return os.str();
}

}  // namespace nhssh
