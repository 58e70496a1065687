#include "dtl/json_io.hpp"

#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace dtl {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

std::string id_text(const json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  throw FormatError("world ids must be integers or strings");
}

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw FormatError(std::string("missing field \"") + name + "\"");
  }
  return obj.at(name);
}

std::vector<Row> read_pairs(const json& pairs, const std::unordered_map<std::string, std::size_t>& src,
                            const std::unordered_map<std::string, std::size_t>& dst,
                            std::size_t rows, const char* what) {
  if (!pairs.is_array()) throw FormatError(std::string(what) + " must be an array of pairs");
  std::vector<Row> out(rows, 0);
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2) throw FormatError(std::string(what) + " entries must be pairs");
    const auto a = src.find(id_text(p[0]));
    const auto b = dst.find(id_text(p[1]));
    if (a == src.end() || b == dst.end()) {
      throw FormatError(std::string(what) + " refers to an unknown world " + p.dump());
    }
    out[a->second] |= bit(b->second);
  }
  return out;
}

std::unordered_map<std::string, std::size_t> id_index(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], i);
  return m;
}

RawFrame raw_from(const json& doc) {
  RawFrame raw;
  const json& worlds = field(doc, "worlds");
  if (!worlds.is_array()) throw FormatError("\"worlds\" must be an array");
  if (worlds.size() > kMaxWorlds) throw FormatError("more than 64 worlds");
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& w : worlds) {
    std::string id = id_text(field(w, "id"));
    if (!index.emplace(id, raw.ids.size()).second) throw FormatError("duplicate world id " + id);
    raw.ids.push_back(std::move(id));
    const json& ty = field(w, "type");
    if (!ty.is_array()) throw FormatError("\"type\" must be an array of formulas");
    std::vector<std::string> members;
    for (const auto& m : ty) {
      if (!m.is_string()) throw FormatError("type members must be formula strings");
      members.push_back(m.get<std::string>());
    }
    raw.types.push_back(std::move(members));
  }
  const std::size_t n = raw.ids.size();
  const auto given = doc.contains("order") ? read_pairs(doc.at("order"), index, index, n, "order")
                                           : std::vector<Row>(n, 0);
  raw.order = reflexive_transitive_closure(given);
  raw.order_was_closed = raw.order == given;
  if (doc.contains("root")) {
    const auto it = index.find(id_text(doc.at("root")));
    if (it == index.end()) throw FormatError("root refers to an unknown world");
    raw.root = it->second;
  }
  if (doc.contains("g")) raw.g = read_pairs(doc.at("g"), index, index, n, "g");
  return raw;
}

TypedFrame typed_from(const json& doc, const ClosurePtr& c, std::vector<std::string>* warnings,
                      RawFrame* keep = nullptr) {
  RawFrame raw = raw_from(doc);
  if (!raw.order_was_closed && warnings) {
    warnings->push_back("order was not a preorder; using its reflexive-transitive closure");
  }
  TypedFrame f = build_typed_frame(raw, c);
  if (keep) *keep = std::move(raw);
  return f;
}

LocalFrame local_from(const json& doc, const ClosurePtr& c, std::vector<std::string>* warnings) {
  RawFrame raw;
  TypedFrame f = typed_from(doc, c, warnings, &raw);
  if (!raw.root) throw FormatError("a local frame needs a \"root\"");
  try {
    return LocalFrame::make(std::move(f), *raw.root);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("not a local frame: ") + e.what());
  }
}

json pairs_json(const std::vector<Row>& rows) {
  json out = json::array();
  for (std::size_t w = 0; w < rows.size(); ++w) {
    for_each_bit(rows[w], [&](std::size_t v) { out.push_back({w, v}); });
  }
  return out;
}

json frame_json(const TypedFrame& f, std::optional<std::size_t> root) {
  json worlds = json::array();
  for (std::size_t w = 0; w < f.size(); ++w) {
    json members = json::array();
    for (const auto& m : f.types[w].members()) members.push_back(m.to_string());
    worlds.push_back({{"id", w}, {"type", members}});
  }
  json out = {{"worlds", worlds}, {"order", pairs_json(f.R)}};
  if (root) out["root"] = *root;
  return out;
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

RawFrame parse_raw_frame(std::string_view text) { return raw_from(parse_json(text)); }

TypedFrame build_typed_frame(const RawFrame& raw, const ClosurePtr& c) {
  TypedFrame f;
  f.closure = c;
  f.R = raw.order;
  for (std::size_t w = 0; w < raw.types.size(); ++w) {
    std::vector<Formula> members;
    for (const auto& text : raw.types[w]) {
      Formula m = Formula::var("_");
      try {
        m = parse(text);
      } catch (const ParseError& e) {
        throw FormatError("world " + raw.ids[w] + ": cannot parse \"" + text + "\": " + e.what());
      }
      if (!c->contains(m)) {
        throw FormatError("world " + raw.ids[w] + ": " + text + " is not in the closure");
      }
      members.push_back(std::move(m));
    }
    auto t = complete_type(c, members);
    if (!t) throw FormatError("world " + raw.ids[w] + ": members are contradictory or leave an atom undecided");
    f.types.push_back(std::move(*t));
  }
  return f;
}

TypedFrame typed_frame_from_json(std::string_view text, const ClosurePtr& c,
                                 std::vector<std::string>* warnings) {
  return typed_from(parse_json(text), c, warnings);
}

LocalFrame local_frame_from_json(std::string_view text, const ClosurePtr& c,
                                 std::vector<std::string>* warnings) {
  return local_from(parse_json(text), c, warnings);
}

Quasimodel quasimodel_from_json(std::string_view text, const ClosurePtr& c,
                                std::vector<std::string>* warnings) {
  RawFrame raw;
  Quasimodel q;
  q.frame = typed_from(parse_json(text), c, warnings, &raw);
  if (!raw.g) throw FormatError("a quasimodel needs \"g\"");
  q.g = *raw.g;
  return q;
}

FiniteDynModel model_from_json(std::string_view text) {
  const json doc = parse_json(text);
  FiniteDynModel m;
  const json& points = field(doc, "points");
  if (!points.is_number_unsigned() && !points.is_number_integer()) throw FormatError("\"points\" must be a number");
  const long long n = points.get<long long>();
  if (n < 1 || n > static_cast<long long>(kMaxWorlds)) throw FormatError("\"points\" must be in 1..64");
  m.points = static_cast<std::size_t>(n);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.points; ++i) index.emplace(std::to_string(i), i);
  m.order = read_pairs(field(doc, "order"), index, index, m.points, "order");
  const json& f = field(doc, "f");
  if (!f.is_array()) throw FormatError("\"f\" must be an array");
  for (const auto& x : f) {
    if (!x.is_number_integer()) throw FormatError("\"f\" entries must be point indices");
    const long long v = x.get<long long>();
    m.f.push_back(v < 0 ? SIZE_MAX : static_cast<std::size_t>(v));
  }
  if (doc.contains("valuation")) {
    const json& val = doc.at("valuation");
    if (!val.is_object()) throw FormatError("\"valuation\" must be an object");
    for (const auto& [name, pts] : val.items()) {
      if (!pts.is_array()) throw FormatError("valuation of " + name + " must be an array");
      Row r = 0;
      for (const auto& x : pts) {
        if (!x.is_number_integer()) throw FormatError("valuation entries must be point indices");
        const long long v = x.get<long long>();
        if (v < 0 || v >= n) throw FormatError("valuation of " + name + " is out of range");
        r |= bit(static_cast<std::size_t>(v));
      }
      m.valuation[name] = r;
    }
  }
  return m;
}

FrameRelation relation_from_json(std::string_view text, const ClosurePtr& c,
                                 std::vector<std::string>* warnings) {
  const json doc = parse_json(text);
  const json& src = field(doc, "source");
  const json& dst = field(doc, "target");
  LocalFrame a = local_from(src, c, warnings);
  LocalFrame b = local_from(dst, c, warnings);
  const RawFrame ra = raw_from(src);
  const RawFrame rb = raw_from(dst);
  auto pairs = read_pairs(field(doc, "pairs"), id_index(ra.ids), id_index(rb.ids), a.size(), "pairs");
  return FrameRelation{std::move(a), std::move(b), std::move(pairs)};
}

std::string to_json(const TypedFrame& f, std::optional<std::size_t> root) {
  return frame_json(f, root).dump();
}

std::string to_json(const LocalFrame& f) { return frame_json(f.frame(), f.root()).dump(); }

std::string to_json(const Quasimodel& q) {
  json out = frame_json(q.frame, std::nullopt);
  out["g"] = pairs_json(q.g);
  return out.dump();
}

std::string to_json(const FiniteDynModel& m) {
  json val = json::object();
  for (const auto& [name, r] : m.valuation) {
    json pts = json::array();
    for_each_bit(r, [&](std::size_t x) { pts.push_back(x); });
    val[name] = pts;
  }
  return json{{"points", m.points}, {"order", pairs_json(m.order)}, {"f", m.f}, {"valuation", val}}.dump();
}

std::string to_json(const FrameRelation& r) {
  return json{{"source", frame_json(r.source.frame(), r.source.root())},
              {"target", frame_json(r.target.frame(), r.target.root())},
              {"pairs", pairs_json(r.pairs)}}
      .dump();
}

std::string to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& issue : report) {
    out.push_back({{"world", issue.world}, {"clause", issue.clause}, {"detail", issue.detail}});
  }
  return out.dump();
}

std::string raw_frame_to_dot(const RawFrame& raw) {
  std::ostringstream os;
  os << "digraph frame {\n  rankdir=BT;\n";
  const std::size_t n = raw.ids.size();
  auto related = [&](std::size_t a, std::size_t b) { return ((raw.order[a] >> b) & 1U) != 0; };
  for (std::size_t w = 0; w < n; ++w) {
    std::string label = raw.ids[w] + ": {";
    for (std::size_t i = 0; i < raw.types[w].size(); ++i) {
      if (i) label += ", ";
      label += raw.types[w][i];
    }
    label += "}";
    os << "  w" << w << " [label=\"" << escape_dot(label) << "\"";
    if (raw.root && *raw.root == w) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (std::size_t w = 0; w < n; ++w) {
    for_each_bit(raw.order[w], [&](std::size_t v) {
      if (v == w) return;
      bool implied = false;
      for_each_bit(raw.order[w], [&](std::size_t u) {
        if (u != w && u != v && related(u, v) && !related(u, w) && !related(v, u)) implied = true;
      });
      if (!implied) os << "  w" << w << " -> w" << v << ";\n";
    });
  }
  if (raw.g) {
    for (std::size_t w = 0; w < n; ++w) {
      for_each_bit((*raw.g)[w], [&](std::size_t v) {
        os << "  w" << w << " -> w" << v << " [style=dashed, label=\"g\"];\n";
      });
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace dtl
