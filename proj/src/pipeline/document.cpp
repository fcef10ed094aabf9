#include "leafscan/document.hpp"

#include "leafscan/error.hpp"

#include <algorithm>
#include <cmath>

namespace leafscan {

namespace {

[[noreturn]] void bad(const std::string &what) { throw DocumentError(what); }

const Json &field(const Json &j, const char *name) {
  if (!j.is_object() || !j.contains(name)) {
    bad(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

double number(const Json &j, const char *what) {
  if (!j.is_number()) {
    bad(std::string("'") + what + "' must be a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    bad(std::string("'") + what + "' must be finite");
  }
  return v;
}

long long integer(const Json &j, const char *what) {
  if (!j.is_number_integer()) {
    bad(std::string("'") + what + "' must be an integer");
  }
  return j.get<long long>();
}

std::size_t count(const Json &j, const char *what) {
  const auto v = integer(j, what);
  if (v < 0) {
    bad(std::string("'") + what + "' must be non-negative");
  }
  return static_cast<std::size_t>(v);
}

int small_int(const Json &j, const char *what) {
  const auto v = integer(j, what);
  if (v < -(1LL << 30) || v > (1LL << 30)) {
    bad(std::string("'") + what + "' out of range");
  }
  return static_cast<int>(v);
}

std::string text(const Json &j, const char *what) {
  if (!j.is_string()) {
    bad(std::string("'") + what + "' must be a string");
  }
  return j.get<std::string>();
}

std::string text_of(const Json &j, const char *name) { return text(field(j, name), name); }

Point2 point(const Json &j) {
  if (!j.is_array() || j.size() != 2) {
    bad("a point must be an [x, y] pair");
  }
  return Point2{number(j[0], "x"), number(j[1], "y")};
}

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

Rgb color(const Json &j, const char *what) {
  if (!j.is_array() || j.size() != 3) {
    bad(std::string("'") + what + "' must be an [r, g, b] triple");
  }
  const auto channel = [&](const Json &c) {
    const auto v = integer(c, what);
    if (v < 0 || v > 255) {
      bad(std::string("'") + what + "' channels must be in [0, 255]");
    }
    return static_cast<std::uint8_t>(v);
  };
  return Rgb{channel(j[0]), channel(j[1]), channel(j[2])};
}

Json color_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

Circle circle(const Json &j) { return Circle{point(field(j, "center")), number(field(j, "radius"), "radius")}; }

Json circle_json(const Circle &c) { return Json{{"center", point_json(c.center)}, {"radius", c.radius}}; }

std::vector<Circle> circles(const Json &j, const char *name) {
  std::vector<Circle> out;
  if (!j.contains(name)) {
    return out;
  }
  const auto &arr = j.at(name);
  if (!arr.is_array()) {
    bad(std::string("'") + name + "' must be an array");
  }
  for (const auto &c : arr) {
    out.push_back(circle(c));
  }
  return out;
}

template <typename T> void range(const Json &j, const char *name, T &lo, T &hi) {
  if (!j.contains(name)) {
    return;
  }
  const auto &r = j.at(name);
  if (!r.is_array() || r.size() != 2) {
    bad(std::string("'") + name + "' must be a [min, max] pair");
  }
  if constexpr (std::is_integral_v<T>) {
    lo = small_int(r[0], name);
    hi = small_int(r[1], name);
  } else {
    lo = number(r[0], name);
    hi = number(r[1], name);
  }
  if (hi < lo) {
    bad(std::string("'") + name + "' has max < min");
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

} // namespace

Json make_document(std::string_view kind) {
  Json j;
  j["format"] = kDocumentFormat;
  j["kind"] = kind;
  j["version"] = kDocumentVersion;
  return j;
}

Json parse_document(std::string_view text, std::string_view source, std::string_view kind) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw DocumentError(std::string(source) + ":" + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                        ": parse error: " + e.what());
  }
  if (!kind.empty()) {
    try {
      if (text_of(j, "format") != kDocumentFormat) {
        bad("not a leafscan document");
      }
      if (text_of(j, "kind") != kind) {
        bad("expected a '" + std::string(kind) + "' document, found '" + text_of(j, "kind") + "'");
      }
    } catch (const DocumentError &e) {
      throw DocumentError(std::string(source) + ": " + e.what());
    }
  }
  return j;
}

double document_ratio(double ratio) noexcept { return std::round(ratio * 1e4) / 1e4; }

Json to_json(const DamageReport &r) {
  Json j;
  j["leaf_foreground_px"] = r.leaf_foreground_px;
  j["internal_damage_px"] = r.internal_damage_px;
  j["border_damage_px"] = r.border_damage_px;
  j["total_leaf_px"] = r.total_leaf_px;
  j["damage_ratio"] = document_ratio(r.damage_ratio);
  j["total_cm2"] = r.total_cm2 ? Json(*r.total_cm2) : Json(nullptr);
  j["damage_cm2"] = r.damage_cm2 ? Json(*r.damage_cm2) : Json(nullptr);
  return j;
}

Json to_json(const OtsuDiagnostics &d) {
  Json curve = Json::array();
  for (const double v : d.variance_curve) {
    curve.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
  }
  Json j;
  j["threshold"] = d.threshold;
  j["variance"] = d.variance;
  j["omega0"] = d.omega0;
  j["omega1"] = d.omega1;
  j["mu0"] = d.mu0;
  j["mu1"] = d.mu1;
  j["global_mean"] = d.global_mean;
  j["variance_curve"] = std::move(curve);
  return j;
}

Json to_json(const ThresholdDecision &d) {
  Json j;
  j["threshold"] = d.threshold;
  j["overridden"] = d.overridden;
  j["automatic"] = d.automatic ? to_json(*d.automatic) : Json(nullptr);
  return j;
}

Json to_json(const QuadraticBezier &c) { return Json::array({point_json(c.b0), point_json(c.b1), point_json(c.b2)}); }

Json to_json(const CurveOutcome &c) {
  Json j;
  j["index"] = c.index;
  j["status"] = to_string(c.status);
  j["message"] = c.message;
  j["placed"] = to_json(c.placed);
  j["curve_px"] = c.pixels.size();
  j["border_damage_px"] = c.enclosed.size();
  return j;
}

Json to_json(const AnalysisConfig &c) {
  Json j;
  j["channel"] = to_string(c.channel);
  j["polarity"] = c.polarity ? Json(to_string(*c.polarity)) : Json(nullptr);
  j["threshold"] = c.threshold ? Json(*c.threshold) : Json(nullptr);
  j["min_size"] = c.min_size ? Json(*c.min_size) : Json(nullptr);
  j["min_hole_size"] = c.min_hole_size;
  j["ppcm"] = c.pixels_per_cm ? Json(*c.pixels_per_cm) : Json(nullptr);
  return j;
}

Json to_json(const GroundTruth &g) {
  Json j = make_document("ground_truth");
  j["leaf_px_total"] = g.leaf_px_total;
  j["internal_damage_px"] = g.internal_damage_px;
  j["border_damage_px"] = g.border_damage_px;
  j["speckle_px"] = g.speckle_px;
  j["max_speckle_px"] = g.max_speckle_px;
  Json holes = Json::array();
  for (const auto &h : g.holes) {
    holes.push_back(h.size());
  }
  j["hole_px"] = std::move(holes);
  Json bites = Json::array();
  for (const auto &b : g.bites) {
    bites.push_back(b.size());
  }
  j["bite_px"] = std::move(bites);
  j["damage_ratio"] = g.damage_ratio;
  return j;
}

Json to_json(const SyntheticLeafSpec &s) {
  Json j = make_document("leaf_spec");
  j["width"] = s.width;
  j["height"] = s.height;
  j["leaf"] = Json{{"center", point_json(s.leaf.center)},
                   {"semi_axes", Json::array({s.leaf.semi_x, s.leaf.semi_y})},
                   {"exponent", s.leaf.exponent}};
  j["leaf_color"] = color_json(s.leaf_color);
  j["background_color"] = color_json(s.background_color);
  j["min_separation"] = s.min_separation;
  const auto list = [](const std::vector<Circle> &cs) {
    Json a = Json::array();
    for (const auto &c : cs) {
      a.push_back(circle_json(c));
    }
    return a;
  };
  j["holes"] = list(s.holes);
  j["bites"] = list(s.bites);
  j["speckles"] = list(s.speckles);
  j["seed"] = s.seed;
  j["color_jitter"] = s.color_jitter;
  return j;
}

Json to_json(const CorrelationResult &r) {
  Json j;
  j["label"] = r.label;
  j["n"] = r.n;
  j["r"] = r.r;
  j["r_percent"] = 100.0 * r.r;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["p_value"] = r.p_value;
  j["p_value_below_floor"] = r.p_value < kPValueFloor;
  j["sd_diff"] = r.sd_diff;
  j["concordance_ccc"] = r.concordance;
  return j;
}

QuadraticBezier curve_from_json(const Json &j) {
  if (!j.is_array() || j.size() != 3) {
    bad("a curve must be exactly three [x, y] control points");
  }
  return QuadraticBezier{point(j[0]), point(j[1]), point(j[2])};
}

void merge_config(AnalysisConfig &config, const Json &patch) {
  if (!patch.is_object()) {
    bad("config patch must be an object");
  }
  AnalysisConfig next = config;
  for (const auto &[key, value] : patch.items()) {
    if (key == "channel") {
      const auto c = parse_channel(text(value, "channel"));
      if (!c) {
        bad("'channel' must be one of L, a, b");
      }
      next.channel = *c;
    } else if (key == "polarity") {
      if (value.is_null()) {
        next.polarity.reset();
      } else {
        const auto p = parse_polarity(text(value, "polarity"));
        if (!p) {
          bad("'polarity' must be 'below' or 'above'");
        }
        next.polarity = *p;
      }
    } else if (key == "threshold") {
      if (value.is_null()) {
        next.threshold.reset();
      } else {
        next.threshold = small_int(value, "threshold");
      }
    } else if (key == "min_size") {
      if (value.is_null()) {
        next.min_size.reset();
      } else {
        next.min_size = count(value, "min_size");
      }
    } else if (key == "min_hole_size") {
      next.min_hole_size = count(value, "min_hole_size");
    } else if (key == "ppcm") {
      if (value.is_null()) {
        next.pixels_per_cm.reset();
      } else {
        next.pixels_per_cm = number(value, "ppcm");
      }
    } else {
      bad("unknown config field '" + key + "'");
    }
  }
  next.validate();
  config = next;
}

Json result_to_json(const AnalysisResult &r) {
  Json j;
  j["report"] = to_json(r.report);
  j["segmentation"] = to_json(r.decision);
  j["min_size"] = r.min_size;
  Json curves = Json::array();
  for (const auto &c : r.closure.curves) {
    curves.push_back(to_json(c));
  }
  j["curves"] = std::move(curves);
  return j;
}

std::vector<CurveRecord> parse_curve_file(std::string_view text_in, std::string_view source) {
  const auto doc = parse_document(text_in, source, "curves");
  std::vector<CurveRecord> out;
  try {
    const auto &images = field(doc, "images");
    if (!images.is_array()) {
      bad("'images' must be an array");
    }
    for (const auto &img : images) {
      CurveRecord rec{text_of(img, "path"), {}};
      const auto &curves = field(img, "curves");
      if (!curves.is_array()) {
        bad("'curves' must be an array");
      }
      for (const auto &c : curves) {
        rec.curves.push_back(curve_from_json(c));
      }
      out.push_back(std::move(rec));
    }
  } catch (const DocumentError &e) {
    throw DocumentError(std::string(source) + ": " + e.what());
  }
  return out;
}

Json curve_file_document(const std::vector<CurveRecord> &records) {
  Json j = make_document("curves");
  Json images = Json::array();
  for (const auto &r : records) {
    Json curves = Json::array();
    for (const auto &c : r.curves) {
      curves.push_back(to_json(c));
    }
    images.push_back(Json{{"path", r.path}, {"curves", std::move(curves)}});
  }
  j["images"] = std::move(images);
  return j;
}

SyntheticLeafSpec leaf_spec_from_json(const Json &j) {
  SyntheticLeafSpec s;
  s.width = small_int(field(j, "width"), "width");
  s.height = small_int(field(j, "height"), "height");
  const auto &leaf = field(j, "leaf");
  s.leaf.center = point(field(leaf, "center"));
  const auto &axes = field(leaf, "semi_axes");
  if (!axes.is_array() || axes.size() != 2) {
    bad("'semi_axes' must be a pair");
  }
  s.leaf.semi_x = number(axes[0], "semi_axes");
  s.leaf.semi_y = number(axes[1], "semi_axes");
  if (leaf.contains("exponent")) {
    s.leaf.exponent = number(leaf.at("exponent"), "exponent");
  }
  if (j.contains("leaf_color")) {
    s.leaf_color = color(j.at("leaf_color"), "leaf_color");
  }
  if (j.contains("background_color")) {
    s.background_color = color(j.at("background_color"), "background_color");
  }
  if (j.contains("min_separation")) {
    s.min_separation = small_int(j.at("min_separation"), "min_separation");
  }
  s.holes = circles(j, "holes");
  s.bites = circles(j, "bites");
  s.speckles = circles(j, "speckles");
  if (j.contains("seed")) {
    s.seed = static_cast<std::uint64_t>(count(j.at("seed"), "seed"));
  }
  if (j.contains("color_jitter")) {
    s.color_jitter = small_int(j.at("color_jitter"), "color_jitter");
  }
  return s;
}

LeafTemplate leaf_template_from_json(const Json &j) {
  LeafTemplate t;
  if (j.contains("width")) {
    t.width = small_int(j.at("width"), "width");
  }
  if (j.contains("height")) {
    t.height = small_int(j.at("height"), "height");
  }
  range(j, "semi_x", t.semi_x_min, t.semi_x_max);
  range(j, "semi_y", t.semi_y_min, t.semi_y_max);
  range(j, "exponent", t.exponent_min, t.exponent_max);
  const auto group = [&](const char *name, int &cmin, int &cmax, double &rmin, double &rmax) {
    if (!j.contains(name)) {
      return;
    }
    const auto &g = j.at(name);
    if (!g.is_object()) {
      bad(std::string("'") + name + "' must be an object with 'count' and 'radius' ranges");
    }
    range(g, "count", cmin, cmax);
    range(g, "radius", rmin, rmax);
  };
  group("holes", t.holes_min, t.holes_max, t.hole_radius_min, t.hole_radius_max);
  group("bites", t.bites_min, t.bites_max, t.bite_radius_min, t.bite_radius_max);
  group("speckles", t.speckles_min, t.speckles_max, t.speckle_radius_min, t.speckle_radius_max);
  if (j.contains("leaf_color")) {
    t.leaf_color = color(j.at("leaf_color"), "leaf_color");
  }
  if (j.contains("background_color")) {
    t.background_color = color(j.at("background_color"), "background_color");
  }
  if (j.contains("min_separation")) {
    t.min_separation = small_int(j.at("min_separation"), "min_separation");
  }
  if (j.contains("color_jitter")) {
    t.color_jitter = small_int(j.at("color_jitter"), "color_jitter");
  }
  return t;
}

Json plot_data_document(const CorrelationReport &report) {
  Json j = make_document("plot_data");
  Json series = Json::array();
  for (std::size_t i = 0; i < report.plots.size(); ++i) {
    const auto &p = report.plots[i];
    const auto &o = report.outcomes[i];
    Json s;
    s["label"] = p.label;
    Json points = Json::array();
    for (std::size_t k = 0; k < p.manual.size() && k < p.automatic.size(); ++k) {
      points.push_back(Json::array({p.manual[k], p.automatic[k]}));
    }
    s["points"] = std::move(points);
    const auto line = [](const PlotLine &l) { return Json::array({Json::array({l.x0, l.y0}), Json::array({l.x1, l.y1})}); };
    s["fit_line"] = p.fit_line ? line(*p.fit_line) : Json(nullptr);
    s["identity_line"] = line(p.identity_line);
    s["result"] = o.result ? to_json(*o.result) : Json(nullptr);
    s["error"] = o.error.empty() ? Json(nullptr) : Json(o.error);
    series.push_back(std::move(s));
  }
  j["series"] = std::move(series);
  return j;
}

Json session_document(std::string_view id, std::uint64_t revision, std::string_view state,
                      std::string_view message, const AnalysisConfig &config,
                      std::span<const QuadraticBezier> curves, const AnalysisResult *result) {
  Json j = make_document("session");
  j["id"] = id;
  j["revision"] = revision;
  j["state"] = state;
  j["message"] = message.empty() ? Json(nullptr) : Json(message);
  j["config"] = to_json(config);
  Json list = Json::array();
  for (const auto &c : curves) {
    list.push_back(to_json(c));
  }
  j["curves"] = std::move(list);
  j["result"] = result ? result_to_json(*result) : Json(nullptr);
  return j;
}

} // namespace leafscan
