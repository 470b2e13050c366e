#include <cmath>
#include <set>

#include "laneforge/errors.hpp"
#include "laneforge/io.hpp"

namespace laneforge::io {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  fail(ErrorCode::SchemaViolation, path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) schema(path + "." + k, "unknown key");
  }
}

double finite_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(path, "number is not finite");
  return d;
}

}  // namespace

std::vector<LanePolyline> LaneFile::polylines() const {
  std::vector<LanePolyline> out;
  out.reserve(lanes.size());
  for (const auto& r : lanes) out.push_back(r.lane);
  return out;
}

bool structurally_equal(const LaneFile& a, const LaneFile& b) {
  if (a.frame_id != b.frame_id || a.lanes.size() != b.lanes.size()) return false;
  for (std::size_t i = 0; i < a.lanes.size(); ++i) {
    const auto& x = a.lanes[i];
    const auto& y = b.lanes[i];
    if (x.lane.instance_id != y.lane.instance_id || x.source != y.source || x.curve != y.curve ||
        x.lane.points != y.lane.points) {
      return false;
    }
  }
  return true;
}

json lanes_to_json(const LaneFile& file) {
  json lanes = json::array();
  for (const auto& r : file.lanes) {
    json pts = json::array();
    for (const auto& p : r.lane.points) pts.push_back({p.x(), p.y(), p.z()});
    json lane = {{"instance_id", r.lane.instance_id},
                 {"points", std::move(pts)},
                 {"source", r.source == LaneSource::Manual ? "manual" : "auto"}};
    if (r.curve) {
      lane["curve"] = {{"a", r.curve->a}, {"b", r.curve->b}, {"c", r.curve->c}, {"d", r.curve->d}};
    }
    lanes.push_back(std::move(lane));
  }
  return {{"frame_id", file.frame_id}, {"lanes", std::move(lanes)}};
}

LaneFile lanes_from_json(const json& doc) {
  if (!doc.is_object()) schema("$", "expected an object");
  only_keys(doc, "$", {"frame_id", "lanes"});
  LaneFile file;
  if (!doc.contains("frame_id") || !doc["frame_id"].is_string()) {
    schema("$.frame_id", "expected a string");
  }
  file.frame_id = doc["frame_id"].get<std::string>();
  if (!doc.contains("lanes") || !doc["lanes"].is_array()) schema("$.lanes", "expected an array");

  std::set<std::uint32_t> seen;
  const json& lanes = doc["lanes"];
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string lp = "$.lanes[" + std::to_string(i) + "]";
    const json& l = lanes[i];
    if (!l.is_object()) schema(lp, "expected an object");
    only_keys(l, lp, {"instance_id", "points", "source", "curve"});
    LaneRecord rec;

    if (!l.contains("instance_id") || !l["instance_id"].is_number_unsigned() ||
        l["instance_id"].get<std::uint64_t>() > UINT32_MAX) {
      schema(lp + ".instance_id", "expected an unsigned 32-bit integer");
    }
    rec.lane.instance_id = l["instance_id"].get<std::uint32_t>();
    if (!seen.insert(rec.lane.instance_id).second) {
      schema(lp + ".instance_id", "duplicate instance_id " + std::to_string(rec.lane.instance_id));
    }

    if (!l.contains("points") || !l["points"].is_array()) schema(lp + ".points", "expected an array");
    const json& pts = l["points"];
    rec.lane.points.reserve(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const std::string pp = lp + ".points[" + std::to_string(j) + "]";
      if (!pts[j].is_array() || pts[j].size() != 3) schema(pp, "expected [x, y, z]");
      rec.lane.points.emplace_back(finite_number(pts[j][0], pp + "[0]"),
                                   finite_number(pts[j][1], pp + "[1]"),
                                   finite_number(pts[j][2], pp + "[2]"));
    }

    if (!l.contains("source") || !l["source"].is_string()) schema(lp + ".source", "expected a string");
    const auto src = l["source"].get<std::string>();
    if (src == "manual") {
      rec.source = LaneSource::Manual;
    } else if (src == "auto") {
      rec.source = LaneSource::Auto;
    } else {
      schema(lp + ".source", "expected \"manual\" or \"auto\", got \"" + src + "\"");
    }

    if (l.contains("curve")) {
      const std::string cp = lp + ".curve";
      const json& c = l["curve"];
      if (!c.is_object()) schema(cp, "expected an object");
      only_keys(c, cp, {"a", "b", "c", "d"});
      CurveCoefficients cc;
      for (auto [key, dst] : {std::pair{"a", &cc.a}, {"b", &cc.b}, {"c", &cc.c}, {"d", &cc.d}}) {
        if (!c.contains(key)) schema(cp + "." + key, "missing coefficient");
        *dst = finite_number(c[key], cp + "." + key);
      }
      rec.curve = cc;
    }
    file.lanes.push_back(std::move(rec));
  }
  return file;
}

void write_lanes(const LaneFile& file, const std::filesystem::path& path) {
  write_json(path, lanes_to_json(file));
}

LaneFile read_lanes(const std::filesystem::path& path) { return lanes_from_json(read_json(path)); }

void write_json(const std::filesystem::path& path, const json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
}

}  // namespace laneforge::io
