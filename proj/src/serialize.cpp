#include "torsionlab/serialize.hpp"

#include "torsionlab/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace torsionlab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw BadSpec(std::string("domain spec needs a numeric '") + key + "'");
  }
  return j.at(key).get<double>();
}

int integer(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw BadSpec(std::string("domain spec needs an integer '") + key + "'");
  }
  return j.at(key).get<int>();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

DomainSpec domain_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw BadSpec("domain spec must be an object with a 'family' string");
  }
  const std::string family = j.at("family").get<std::string>();
  DomainSpec spec;
  if (family == "disk") {
    spec = Disk{number(j, "R")};
  } else if (family == "rectangle") {
    spec = Rectangle{number(j, "a"), number(j, "b")};
  } else if (family == "l_shape" || family == "lshape") {
    spec = LShape{number(j, "a"), number(j, "b"), number(j, "notch")};
  } else if (family == "annulus") {
    spec = Annulus{number(j, "r_in"), number(j, "r_out")};
  } else if (family == "punctured_square") {
    spec = PuncturedSquare{integer(j, "N"), number(j, "rho")};
  } else if (family == "dumbbell") {
    spec = Dumbbell{integer(j, "n"), number(j, "R"), number(j, "tube_w"), number(j, "tube_len")};
  } else if (family == "polygon") {
    if (!j.contains("vertices") || !j.at("vertices").is_array()) throw BadSpec("polygon needs 'vertices'");
    Polygon p;
    for (const Json& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw BadSpec("polygon vertices must be [x, y] pairs");
      }
      p.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    spec = std::move(p);
  } else if (family == "bitmap") {
    if (!j.contains("path") || !j.at("path").is_string()) throw BadSpec("bitmap needs a 'path'");
    spec = Bitmap{j.at("path").get<std::string>()};
  } else {
    throw BadSpec("unknown domain family: " + family);
  }
  validate(spec);
  return spec;
}

Json to_json(const DomainSpec& spec) {
  return std::visit(
      overloaded{
          [](const Disk& d) { return Json{{"family", "disk"}, {"R", d.R}}; },
          [](const Rectangle& r) { return Json{{"family", "rectangle"}, {"a", r.a}, {"b", r.b}}; },
          [](const LShape& l) { return Json{{"family", "l_shape"}, {"a", l.a}, {"b", l.b}, {"notch", l.notch}}; },
          [](const Annulus& a) { return Json{{"family", "annulus"}, {"r_in", a.r_in}, {"r_out", a.r_out}}; },
          [](const PuncturedSquare& p) { return Json{{"family", "punctured_square"}, {"N", p.N}, {"rho", p.rho}}; },
          [](const Dumbbell& d) {
            return Json{{"family", "dumbbell"}, {"n", d.n}, {"R", d.R}, {"tube_w", d.tube_w},
                        {"tube_len", d.tube_len}};
          },
          [](const Polygon& p) {
            Json v = Json::array();
            for (const auto& q : p.vertices) v.push_back({q.x(), q.y()});
            return Json{{"family", "polygon"}, {"vertices", v}};
          },
          [](const Bitmap& b) { return Json{{"family", "bitmap"}, {"path", b.path}}; },
      },
      spec);
}

Json to_json(const Cell& c) { return Json{{"i", c.i}, {"j", c.j}}; }

Json to_json(const FunctionalSummary& s) {
  Json j{{"domain", s.domain},
         {"h", s.h},
         {"area", s.area},
         {"inradius", s.inradius},
         {"lambda", s.lambda},
         {"t_rigidity", s.t_rigidity},
         {"norm_l2_w", s.norm_l2_w},
         {"norm_linf_w", s.norm_linf_w},
         {"product", s.product},
         {"f_value", s.f_value},
         {"phi_1inf", s.phi_1inf},
         {"phi_12", s.phi_12},
         {"argmax_w_cell", to_json(s.argmax_w_cell)},
         {"argmax_u_cell", to_json(s.argmax_u_cell)},
         {"dist_argmax_w", s.dist_argmax_w},
         {"dist_argmax_u", s.dist_argmax_u},
         {"simply_connected", s.simply_connected},
         {"component_count", s.component_count},
         {"hole_count", s.hole_count},
         {"extrapolated", s.extrapolated}};
  const Uncertainty& e = s.rel_error;
  j["rel_error"] = Json{{"area", e.area},         {"inradius", e.inradius},   {"lambda", e.lambda},
                        {"t_rigidity", e.torsion}, {"norm_l2_w", e.norm_l2},  {"norm_linf_w", e.norm_linf},
                        {"dist_argmax_w", e.dist_w}, {"dist_argmax_u", e.dist_u}};
  Json orders = Json::object();
  for (const auto& [k, v] : s.observed_order) orders[k] = v;
  j["observed_order"] = orders;
  return j;
}

Json to_json(const BoundReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  return Json{{"check_id", r.check_id},
              {"domain", r.domain},
              {"status", to_string(r.status)},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"margin", r.margin},
              {"pass", r.pass},
              {"resolved", r.resolved},
              {"numerical_error", r.numerical_error},
              {"params", params},
              {"note", r.note},
              {"constants_snapshot_id", r.constants_snapshot_id}};
}

Json to_json(const ConstantTable& t) {
  Json decimal = Json::object();
  for (const auto& [k, v] : t.decimal) decimal[k] = v;
  return Json{{"snapshot_id", t.snapshot_id},
              {"bessel_zero", t.bessel_zero},
              {"product_gain", t.product_gain},
              {"product_gain_argmax", t.product_gain_argmax},
              {"distance_gain", t.distance_gain},
              {"distance_gain_argmax", t.distance_gain_argmax},
              {"growth_radius", t.growth_radius},
              {"growth_scale", t.growth_scale},
              {"deficit_volume", t.deficit_candidates[0]},
              {"deficit_growth", t.deficit_candidates[1]},
              {"deficit_covering", t.deficit_candidates[2]},
              {"deficit", t.deficit},
              {"packaged_deficit", t.packaged_deficit},
              {"product_excess", t.product_excess},
              {"product_floor", t.product_floor},
              {"energy_ceiling", t.energy_ceiling},
              {"mean_to_max_deficit", t.mean_to_max_deficit},
              {"mean_to_max_ceiling", t.mean_to_max_ceiling},
              {"product_ceiling_classic", t.product_ceiling_classic},
              {"product_ceiling", t.product_ceiling},
              {"zeta3", t.zeta3},
              {"zeta3_tail_width", t.zeta3_tail_width},
              {"bloch_landau_lower", t.bloch_landau_lower},
              {"bloch_landau_upper", t.bloch_landau_upper},
              {"unit_disk_area", t.unit_disk_area},
              {"max_torsion_coefficient", t.max_torsion_coefficient},
              {"growth_coefficient", t.growth_coefficient},
              {"decimal", decimal}};
}

std::string report_csv_header() {
  return "check_id,domain,status,lhs,rhs,margin,pass,resolved,numerical_error,params,constants_snapshot_id";
}

std::string report_csv_row(const BoundReport& r) {
  std::string params;
  for (const auto& [k, v] : r.params) {
    if (!params.empty()) params += ';';
    params += k + "=" + format_double(v);
  }
  std::ostringstream row;
  row << csv_quote(r.check_id) << ',' << csv_quote(r.domain) << ',' << to_string(r.status) << ','
      << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << format_double(r.margin) << ','
      << (r.pass ? "true" : "false") << ',' << (r.resolved ? "true" : "false") << ','
      << format_double(r.numerical_error) << ',' << csv_quote(params) << ',' << r.constants_snapshot_id;
  return row.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BadSpec("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw BadSpec(path.string() + ": " + e.what());
  }
}

}  // namespace torsionlab
