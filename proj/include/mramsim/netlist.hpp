#pragma once

// Minimal SPICE-dialect netlist front end: line-oriented parser, subcircuit
// flattening to an indexed device list, and structural validation.
//
// Grammar (one element per line, first character selects the kind):
//   * comment
//   Rname n1 n2 <ohms>
//   Cname n1 n2 <farads> [ic=<volts>]
//   Mname nd ng ns nb <nmos|pmos> W=<m> L=<m>
//   Jname n1 n2 state=<P|AP> [area=<m2>] [tox=<m>]
//   Vname n+ n- DC <volts>
//   Vname n+ n- PWL(t1 v1 t2 v2 ...)
//   Xname n1 n2 ... <subcktname>
//   .subckt name p1 p2 ...   /  .ends
//   .param name=value        /  .tran <step> <stop>   /  .global n1 ...
//
// Engineering suffixes: f p n u m k meg (a trailing '2' squares the scale,
// e.g. area=1600n2 means 1600e-18 m^2). Names and nodes are
// case-insensitive; "gnd" is an alias for node "0".

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "devices.hpp"

namespace mramsim {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ElementKind { resistor, capacitor, mosfet, mtj, vsource, subckt_instance };

struct ElementLine {
  ElementKind kind = ElementKind::resistor;
  std::string name;                // lowercased, e.g. "r1"
  std::vector<std::string> nodes;  // lowercased node names
  std::map<std::string, double> params;       // numeric parameters
  std::map<std::string, std::string> sparams; // string parameters (model, state, subckt)
  std::vector<std::pair<double, double>> pwl; // vsource PWL points

  bool operator==(const ElementLine&) const = default;
};

struct Subckt {
  std::string name;
  std::vector<std::string> ports;
  std::vector<ElementLine> elements;
  bool operator==(const Subckt&) const = default;
};

struct AnalysisDirective {
  std::string type; // "tran"
  double step = 0.0;
  double stop = 0.0;
  bool operator==(const AnalysisDirective&) const = default;
};

struct Netlist {
  std::string title;
  std::vector<ElementLine> elements;
  std::map<std::string, Subckt> subckts;
  std::map<std::string, double> params;
  std::vector<AnalysisDirective> analyses;
  std::set<std::string> globals;
  bool operator==(const Netlist&) const = default;
};

// ---------------------------------------------------------------------------
// number parsing

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline double suffix_scale(const std::string& sfx, bool& ok) {
  ok = true;
  if (sfx == "f") return 1e-15;
  if (sfx == "p") return 1e-12;
  if (sfx == "n") return 1e-9;
  if (sfx == "u") return 1e-6;
  if (sfx == "m") return 1e-3;
  if (sfx == "k") return 1e3;
  if (sfx == "meg") return 1e6;
  ok = false;
  return 1.0;
}

inline double parse_value(const std::string& tok, int line) {
  const std::string t = lower(tok);
  const char* begin = t.c_str();
  char* end = nullptr;
  errno = 0;
  const double base = std::strtod(begin, &end);
  if (end == begin) throw ParseError(line, "malformed number '" + tok + "'");
  std::string sfx(end);
  if (sfx.empty()) {
    if (!std::isfinite(base)) throw ParseError(line, "non-finite number '" + tok + "'");
    return base;
  }
  bool squared = false;
  if (sfx.size() > 1 && sfx.back() == '2') {
    squared = true;
    sfx.pop_back();
  }
  bool ok = false;
  double scale = suffix_scale(sfx, ok);
  if (!ok) throw ParseError(line, "malformed number '" + tok + "': unknown suffix '" + sfx + "'");
  if (squared) scale *= scale;
  const double v = base * scale;
  if (!std::isfinite(v)) throw ParseError(line, "non-finite number '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string normalize_node(const std::string& raw) {
  std::string n = lower(raw);
  if (n == "gnd") return "0";
  return n;
}

} // namespace detail

// ---------------------------------------------------------------------------
// parser

namespace detail {

struct LineCtx {
  int line;
  std::vector<std::string> tokens;
};

inline void parse_kv(const std::string& tok, std::string& key, std::string& val, int line) {
  const auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.size())
    throw ParseError(line, "expected key=value, got '" + tok + "'");
  key = lower(tok.substr(0, eq));
  val = tok.substr(eq + 1);
}

inline ElementLine parse_element(const std::string& raw, int line) {
  ElementLine e;
  const std::string low = lower(raw);
  const char kind_char = low[0];

  // PWL sources carry parentheses; isolate that span before tokenizing.
  std::string head = raw;
  std::string pwl_body;
  bool has_pwl = false;
  if (kind_char == 'v') {
    const auto p = low.find("pwl");
    if (p != std::string::npos) {
      const auto open = raw.find('(', p);
      const auto close = raw.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError(line, "malformed PWL(...) specification");
      pwl_body = raw.substr(open + 1, close - open - 1);
      head = raw.substr(0, p);
      has_pwl = true;
    }
  }

  auto tokens = split_ws(head);
  if (tokens.empty()) throw ParseError(line, "empty element line");
  e.name = lower(tokens[0]);

  auto need_nodes = [&](size_t count) {
    if (tokens.size() < 1 + count)
      throw ParseError(line, "'" + e.name + "': expected " + std::to_string(count) + " nodes");
    for (size_t i = 0; i < count; ++i) e.nodes.push_back(normalize_node(tokens[1 + i]));
  };

  switch (kind_char) {
    case 'r': {
      e.kind = ElementKind::resistor;
      need_nodes(2);
      if (tokens.size() != 4) throw ParseError(line, "resistor: expected 'Rname n1 n2 value'");
      const double v = parse_value(tokens[3], line);
      if (!(v > 0.0)) throw ParseError(line, "resistor '" + e.name + "': non-positive resistance");
      e.params["value"] = v;
      break;
    }
    case 'c': {
      e.kind = ElementKind::capacitor;
      need_nodes(2);
      if (tokens.size() < 4) throw ParseError(line, "capacitor: expected 'Cname n1 n2 value [ic=v]'");
      const double v = parse_value(tokens[3], line);
      if (!(v > 0.0)) throw ParseError(line, "capacitor '" + e.name + "': non-positive capacitance");
      e.params["value"] = v;
      for (size_t i = 4; i < tokens.size(); ++i) {
        std::string k, val;
        parse_kv(tokens[i], k, val, line);
        if (k != "ic") throw ParseError(line, "capacitor '" + e.name + "': unknown parameter '" + k + "'");
        e.params["ic"] = parse_value(val, line);
      }
      break;
    }
    case 'm': {
      e.kind = ElementKind::mosfet;
      need_nodes(4);
      if (tokens.size() < 6) throw ParseError(line, "mosfet: expected 'Mname nd ng ns nb model W=.. L=..'");
      const std::string model = lower(tokens[5]);
      if (model != "nmos" && model != "pmos")
        throw ParseError(line, "mosfet '" + e.name + "': unknown model '" + tokens[5] + "'");
      e.sparams["model"] = model;
      for (size_t i = 6; i < tokens.size(); ++i) {
        std::string k, val;
        parse_kv(tokens[i], k, val, line);
        if (k != "w" && k != "l")
          throw ParseError(line, "mosfet '" + e.name + "': unknown parameter '" + k + "'");
        const double v = parse_value(val, line);
        if (!(v > 0.0)) throw ParseError(line, "mosfet '" + e.name + "': " + k + " must be > 0");
        e.params[k] = v;
      }
      if (!e.params.count("w") || !e.params.count("l"))
        throw ParseError(line, "mosfet '" + e.name + "': W= and L= are required");
      break;
    }
    case 'j': {
      e.kind = ElementKind::mtj;
      need_nodes(2);
      bool have_state = false;
      for (size_t i = 3; i < tokens.size(); ++i) {
        std::string k, val;
        parse_kv(tokens[i], k, val, line);
        if (k == "state") {
          const std::string s = lower(val);
          if (s != "p" && s != "ap")
            throw ParseError(line, "mtj '" + e.name + "': state must be P or AP");
          e.sparams["state"] = s;
          have_state = true;
        } else if (k == "area" || k == "tox") {
          const double v = parse_value(val, line);
          if (!(v > 0.0)) throw ParseError(line, "mtj '" + e.name + "': " + k + " must be > 0");
          e.params[k] = v;
        } else {
          throw ParseError(line, "mtj '" + e.name + "': unknown parameter '" + k + "'");
        }
      }
      if (!have_state) throw ParseError(line, "mtj '" + e.name + "': state=P|AP is required");
      break;
    }
    case 'v': {
      e.kind = ElementKind::vsource;
      need_nodes(2);
      if (has_pwl) {
        auto vals = split_ws(pwl_body);
        if (vals.empty() || vals.size() % 2 != 0)
          throw ParseError(line, "vsource '" + e.name + "': PWL needs an even number of values");
        for (size_t i = 0; i < vals.size(); i += 2) {
          const double t = parse_value(vals[i], line);
          const double v = parse_value(vals[i + 1], line);
          if (!e.pwl.empty() && !(t > e.pwl.back().first))
            throw ParseError(line, "vsource '" + e.name + "': PWL times must be strictly increasing");
          e.pwl.emplace_back(t, v);
        }
      } else {
        if (tokens.size() != 5 || lower(tokens[3]) != "dc")
          throw ParseError(line, "vsource: expected 'Vname n+ n- DC value' or PWL(...)");
        e.params["dc"] = parse_value(tokens[4], line);
      }
      break;
    }
    case 'x': {
      e.kind = ElementKind::subckt_instance;
      if (tokens.size() < 3) throw ParseError(line, "instance: expected 'Xname n1 ... subcktname'");
      for (size_t i = 1; i + 1 < tokens.size(); ++i) e.nodes.push_back(normalize_node(tokens[i]));
      e.sparams["subckt"] = lower(tokens.back());
      break;
    }
    default:
      throw ParseError(line, std::string("unknown device kind '") + raw[0] + "'");
  }
  return e;
}

} // namespace detail

inline Netlist parse_netlist(const std::string& text) {
  using namespace detail;
  Netlist nl;
  std::optional<Subckt> open_sub;

  int line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    // strip CR and leading blanks
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == '\n')) raw.pop_back();
    size_t b = raw.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const std::string body = raw.substr(b);
    if (body[0] == '*') continue;

    if (body[0] == '.') {
      auto tokens = split_ws(body);
      const std::string dir = lower(tokens[0]);
      if (dir == ".subckt") {
        if (open_sub) throw ParseError(line_no, "nested .subckt definitions are not supported");
        if (tokens.size() < 3) throw ParseError(line_no, ".subckt: expected name and ports");
        Subckt s;
        s.name = lower(tokens[1]);
        if (nl.subckts.count(s.name)) throw ParseError(line_no, "duplicate subckt '" + s.name + "'");
        for (size_t i = 2; i < tokens.size(); ++i) s.ports.push_back(normalize_node(tokens[i]));
        open_sub = std::move(s);
      } else if (dir == ".ends") {
        if (!open_sub) throw ParseError(line_no, ".ends without .subckt");
        nl.subckts[open_sub->name] = std::move(*open_sub);
        open_sub.reset();
      } else if (dir == ".param") {
        if (tokens.size() != 2) throw ParseError(line_no, ".param: expected name=value");
        std::string k, v;
        parse_kv(tokens[1], k, v, line_no);
        nl.params[k] = parse_value(v, line_no);
      } else if (dir == ".tran") {
        if (tokens.size() != 3) throw ParseError(line_no, ".tran: expected step and stop");
        AnalysisDirective a;
        a.type = "tran";
        a.step = parse_value(tokens[1], line_no);
        a.stop = parse_value(tokens[2], line_no);
        if (!(a.step > 0.0) || !(a.stop > a.step))
          throw ParseError(line_no, ".tran: need 0 < step < stop");
        nl.analyses.push_back(a);
      } else if (dir == ".global") {
        for (size_t i = 1; i < tokens.size(); ++i) nl.globals.insert(normalize_node(tokens[i]));
      } else {
        throw ParseError(line_no, "unknown directive '" + tokens[0] + "'");
      }
      continue;
    }

    ElementLine e = parse_element(body, line_no);
    auto& dest = open_sub ? open_sub->elements : nl.elements;
    dest.push_back(std::move(e));
  }
  if (open_sub) throw ParseError(line_no, ".subckt '" + open_sub->name + "' missing .ends");
  return nl;
}

// ---------------------------------------------------------------------------
// printer (round-trips through parse_netlist)

inline std::string print_netlist(const Netlist& nl) {
  using namespace detail;
  std::ostringstream os;
  if (!nl.title.empty()) os << "* " << nl.title << "\n";
  for (const auto& [k, v] : nl.params) os << ".param " << k << "=" << format_value(v) << "\n";
  if (!nl.globals.empty()) {
    os << ".global";
    for (const auto& g : nl.globals) os << " " << g;
    os << "\n";
  }
  auto print_element = [&os](const ElementLine& e) {
    os << e.name;
    for (const auto& n : e.nodes) os << " " << n;
    switch (e.kind) {
      case ElementKind::resistor:
        os << " " << format_value(e.params.at("value"));
        break;
      case ElementKind::capacitor:
        os << " " << format_value(e.params.at("value"));
        if (e.params.count("ic")) os << " ic=" << format_value(e.params.at("ic"));
        break;
      case ElementKind::mosfet:
        os << " " << e.sparams.at("model") << " w=" << format_value(e.params.at("w"))
           << " l=" << format_value(e.params.at("l"));
        break;
      case ElementKind::mtj:
        os << " state=" << e.sparams.at("state");
        if (e.params.count("area")) os << " area=" << format_value(e.params.at("area"));
        if (e.params.count("tox")) os << " tox=" << format_value(e.params.at("tox"));
        break;
      case ElementKind::vsource:
        if (!e.pwl.empty()) {
          os << " PWL(";
          for (size_t i = 0; i < e.pwl.size(); ++i) {
            if (i) os << " ";
            os << format_value(e.pwl[i].first) << " " << format_value(e.pwl[i].second);
          }
          os << ")";
        } else {
          os << " DC " << format_value(e.params.at("dc"));
        }
        break;
      case ElementKind::subckt_instance:
        os << " " << e.sparams.at("subckt");
        break;
    }
    os << "\n";
  };
  for (const auto& [name, sub] : nl.subckts) {
    os << ".subckt " << name;
    for (const auto& p : sub.ports) os << " " << p;
    os << "\n";
    for (const auto& e : sub.elements) print_element(e);
    os << ".ends\n";
  }
  for (const auto& e : nl.elements) print_element(e);
  for (const auto& a : nl.analyses)
    os << ".tran " << format_value(a.step) << " " << format_value(a.stop) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// flattening

struct Device {
  ElementKind kind = ElementKind::resistor;
  std::string name;  // fully prefixed flat name
  int nodes[4] = {0, 0, 0, 0};
  int node_count = 0;
  // resistor / capacitor
  double value = 0.0;
  double ic = std::numeric_limits<double>::quiet_NaN();
  bool has_ic = false;
  // mosfet
  MosParams mos;
  // mtj
  MtjParams mtj;
  MtjState state = MtjState::P;
  double tox = 1e-9;
  // vsource
  Waveform wave;
};

struct FlatCircuit {
  int node_count = 0;
  std::vector<std::string> node_names; // node_names[0] == "0"
  std::vector<Device> devices;
  static constexpr const char* ground_name = "0";

  int find_node(const std::string& name) const {
    for (int i = 0; i < node_count; ++i)
      if (node_names[i] == name) return i;
    return -1;
  }
};

namespace detail {

struct FlattenCtx {
  const Netlist& nl;
  FlatCircuit flat;
  std::map<std::string, int> node_ids;
  MosParams nmos_base, pmos_base;
  MtjParams mtj_base;

  explicit FlattenCtx(const Netlist& netlist) : nl(netlist) {
    flat.node_names.push_back("0");
    node_ids["0"] = 0;
    flat.node_count = 1;
    nmos_base = default_nmos();
    pmos_base = default_pmos();
    mtj_base = MtjParams{};
    apply_params();
  }

  void apply_params() {
    auto get = [&](const char* k, double& dst) {
      auto it = nl.params.find(k);
      if (it != nl.params.end()) dst = it->second;
    };
    get("nmos_vth0", nmos_base.vth0);
    get("nmos_kprime", nmos_base.kprime);
    get("nmos_lambda", nmos_base.lambda);
    get("nmos_cox_overlap", nmos_base.cox_overlap);
    get("pmos_vth0", pmos_base.vth0);
    get("pmos_kprime", pmos_base.kprime);
    get("pmos_lambda", pmos_base.lambda);
    get("pmos_cox_overlap", pmos_base.cox_overlap);
    get("mtj_ra_p", mtj_base.ra_p);
    get("mtj_tmr", mtj_base.tmr);
    get("mtj_beta", mtj_base.beta);
    get("mtj_jc0", mtj_base.jc0);
    get("mtj_tox0", mtj_base.tox0);
    for (const auto& [k, v] : nl.params) {
      static const std::set<std::string> known = {
          "nmos_vth0", "nmos_kprime", "nmos_lambda", "nmos_cox_overlap",
          "pmos_vth0", "pmos_kprime", "pmos_lambda", "pmos_cox_overlap",
          "mtj_ra_p",  "mtj_tmr",     "mtj_beta",    "mtj_jc0",
          "mtj_tox0"};
      if (!known.count(k)) throw BuildError("unknown .param '" + k + "'");
      (void)v;
    }
  }

  int node_id(const std::string& flat_name) {
    auto it = node_ids.find(flat_name);
    if (it != node_ids.end()) return it->second;
    const int id = flat.node_count++;
    node_ids.emplace(flat_name, id);
    flat.node_names.push_back(flat_name);
    return id;
  }

  std::string resolve(const std::string& node, const std::string& prefix,
                      const std::map<std::string, std::string>& port_map) const {
    auto it = port_map.find(node);
    if (it != port_map.end()) return it->second;
    if (node == "0" || nl.globals.count(node)) return node;
    return prefix.empty() ? node : prefix + node;
  }

  void walk(const std::vector<ElementLine>& elements, const std::string& prefix,
            const std::map<std::string, std::string>& port_map,
            std::vector<std::string>& stack) {
    for (const auto& e : elements) {
      if (e.kind == ElementKind::subckt_instance) {
        const std::string& sub_name = e.sparams.at("subckt");
        auto it = nl.subckts.find(sub_name);
        if (it == nl.subckts.end())
          throw BuildError("instance '" + prefix + e.name + "' references undefined subckt '" +
                           sub_name + "'");
        const Subckt& sub = it->second;
        if (sub.ports.size() != e.nodes.size())
          throw BuildError("instance '" + prefix + e.name + "': expected " +
                           std::to_string(sub.ports.size()) + " nodes, got " +
                           std::to_string(e.nodes.size()));
        for (const auto& s : stack)
          if (s == sub_name)
            throw BuildError("recursive subcircuit definition through '" + sub_name + "'");
        std::map<std::string, std::string> binding;
        for (size_t i = 0; i < sub.ports.size(); ++i)
          binding[sub.ports[i]] = resolve(e.nodes[i], prefix, port_map);
        stack.push_back(sub_name);
        walk(sub.elements, prefix + e.name + ".", binding, stack);
        stack.pop_back();
        continue;
      }
      Device d;
      d.kind = e.kind;
      d.name = prefix + e.name;
      d.node_count = static_cast<int>(e.nodes.size());
      for (int i = 0; i < d.node_count; ++i)
        d.nodes[i] = node_id(resolve(e.nodes[i], prefix, port_map));
      switch (e.kind) {
        case ElementKind::resistor:
          d.value = e.params.at("value");
          break;
        case ElementKind::capacitor:
          d.value = e.params.at("value");
          if (e.params.count("ic")) {
            d.ic = e.params.at("ic");
            d.has_ic = true;
            if (d.nodes[1] != 0)
              throw BuildError("capacitor '" + d.name + "': ic= requires the second node grounded");
          }
          break;
        case ElementKind::mosfet: {
          d.mos = (e.sparams.at("model") == "nmos") ? nmos_base : pmos_base;
          d.mos.w = e.params.at("w");
          d.mos.l = e.params.at("l");
          validate(d.mos);
          break;
        }
        case ElementKind::mtj: {
          d.mtj = mtj_base;
          if (e.params.count("area")) d.mtj.area = e.params.at("area");
          d.tox = e.params.count("tox") ? e.params.at("tox") : d.mtj.tox0;
          d.state = (e.sparams.at("state") == "p") ? MtjState::P : MtjState::AP;
          validate(d.mtj);
          if (!(d.tox > 0.0)) throw BuildError("mtj '" + d.name + "': tox must be > 0");
          break;
        }
        case ElementKind::vsource: {
          if (!e.pwl.empty())
            d.wave.points = e.pwl;
          else
            d.wave = Waveform(e.params.at("dc"));
          validate(d.wave);
          break;
        }
        default:
          break;
      }
      flat.devices.push_back(std::move(d));
    }
  }
};

} // namespace detail

inline FlatCircuit flatten_hierarchy(const Netlist& nl) {
  detail::FlattenCtx ctx(nl);
  std::vector<std::string> stack;
  ctx.walk(nl.elements, "", {}, stack);
  return std::move(ctx.flat);
}

// ---------------------------------------------------------------------------
// validation

struct Diagnostic {
  std::string subject; // device or node name
  std::string message;
};

inline std::vector<Diagnostic> validate_circuit(const FlatCircuit& c) {
  std::vector<Diagnostic> diags;

  std::set<std::string> seen;
  for (const auto& d : c.devices) {
    if (!seen.insert(d.name).second)
      diags.push_back({d.name, "duplicate name '" + d.name + "'"});
    for (int i = 0; i < d.node_count; ++i)
      if (d.nodes[i] < 0 || d.nodes[i] >= c.node_count)
        diags.push_back({d.name, "node index out of range on '" + d.name + "'"});
  }

  // DC reachability from ground. Conducting edges: resistors, junctions,
  // sources, and mosfet drain-source channels. Capacitors and gates do not
  // provide a DC path.
  std::vector<std::vector<int>> adj(c.node_count);
  auto edge = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (const auto& d : c.devices) {
    switch (d.kind) {
      case ElementKind::resistor:
      case ElementKind::mtj:
      case ElementKind::vsource:
        edge(d.nodes[0], d.nodes[1]);
        break;
      case ElementKind::mosfet:
        edge(d.nodes[0], d.nodes[2]); // drain-source
        break;
      default:
        break;
    }
  }
  std::vector<char> reach(c.node_count, 0);
  std::vector<int> queue{0};
  reach[0] = 1;
  while (!queue.empty()) {
    const int n = queue.back();
    queue.pop_back();
    for (int m : adj[n])
      if (!reach[m]) {
        reach[m] = 1;
        queue.push_back(m);
      }
  }
  for (int n = 1; n < c.node_count; ++n)
    if (!reach[n])
      diags.push_back({c.node_names[n], "floating node '" + c.node_names[n] +
                                            "': weakly connected, no DC path to ground"});
  return diags;
}

} // namespace mramsim
