#include "doctest.h"

#include "leafscan/document.hpp"
#include "leafscan/error.hpp"
#include "leafscan/pipeline.hpp"
#include "leafscan/synth.hpp"

using namespace leafscan;

namespace {

SyntheticLeafSpec notched() {
  SyntheticLeafSpec spec;
  spec.leaf = LeafShape{{200, 150}, 150, 100, 2.0};
  spec.holes = {Circle{{170, 160}, 9}};
  spec.bites = {Circle{{200, 50}, 30}};
  return spec;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("document envelope") {
  const auto j = make_document("curves");
  CHECK(j["format"] == "leafscan");
  CHECK(j["kind"] == "curves");
  CHECK(j["version"] == 1);
  CHECK(parse_document(j.dump(), "x.json", "curves") == j);
  CHECK_THROWS_WITH_AS(parse_document(j.dump(), "x.json", "leaf_spec"), doctest::Contains("x.json"), DocumentError);
  CHECK_THROWS_AS(parse_document(R"({"kind": "curves"})", "x.json", "curves"), DocumentError);
}

TEST_CASE("parse errors name the source and line") {
  const std::string text = "{\n  \"format\": \"leafscan\",\n  \"kind\": oops\n}\n";
  CHECK_THROWS_WITH_AS(parse_document(text, "spec.json"), doctest::Contains("spec.json:3"), DocumentError);
}

TEST_CASE("document ratio has four decimals") {
  CHECK(document_ratio(0.123456) == 0.1235);
  CHECK(document_ratio(0.0) == 0.0);
  CHECK(document_ratio(1.0 / 3.0) == 0.3333);
}

TEST_CASE("config merging") {
  AnalysisConfig c;
  merge_config(c, Json{{"threshold", 120}, {"channel", "L"}, {"min_size", 50}, {"ppcm", 30.5}});
  CHECK(c.threshold == 120);
  CHECK(c.channel == Channel::L);
  CHECK(c.min_size == 50u);
  CHECK(c.pixels_per_cm == 30.5);
  merge_config(c, Json{{"threshold", nullptr}});
  CHECK_FALSE(c.threshold.has_value());
  CHECK(c.min_size == 50u);

  const auto before = c;
  CHECK_THROWS_AS(merge_config(c, Json{{"thresold", 3}}), DocumentError);
  CHECK_THROWS_AS(merge_config(c, Json{{"threshold", 0}}), OutOfRange);
  CHECK_THROWS_AS(merge_config(c, Json{{"threshold", 256}}), OutOfRange);
  CHECK_THROWS_AS(merge_config(c, Json{{"ppcm", -1.0}}), OutOfRange);
  CHECK_THROWS_AS(merge_config(c, Json{{"channel", "x"}}), DocumentError);
  CHECK_THROWS_AS(merge_config(c, Json{{"min_size", 10}, {"threshold", "high"}}), DocumentError);
  CHECK(c == before);
}

TEST_CASE("config round trip") {
  AnalysisConfig c;
  c.polarity = Polarity::Above;
  c.threshold = 77;
  c.min_hole_size = 4;
  const auto j = to_json(c);
  AnalysisConfig back;
  merge_config(back, j);
  CHECK(back == c);
}

TEST_CASE("curve file round trip") {
  const std::vector<CurveRecord> in{
      {"a.png", {QuadraticBezier{{1, 2}, {3.5, 4}, {5, 6}}}},
      {"dir/b.tif", {}},
  };
  const auto text = curve_file_document(in).dump(2);
  const auto out = parse_curve_file(text, "c.json");
  REQUIRE(out.size() == 2);
  CHECK(out[0].path == "a.png");
  REQUIRE(out[0].curves.size() == 1);
  CHECK(out[0].curves[0].b1.x == 3.5);
  CHECK(out[1].curves.empty());
  CHECK_THROWS_WITH_AS(parse_curve_file(R"({"format":"leafscan","kind":"curves","images":[{"path":"a","curves":[[[1,2]]]}]})",
                                        "c.json"),
                       doctest::Contains("c.json"), DocumentError);
}

TEST_CASE("leaf spec round trip") {
  const auto spec = notched();
  const auto back = leaf_spec_from_json(to_json(spec));
  CHECK(generate_leaf(back).image == generate_leaf(spec).image);
}

TEST_CASE("analysis without curves leaves the mask alone") {
  const auto leaf = generate_leaf(notched());
  const auto r = analyze(leaf.image, {});
  CHECK(r.closure.curves.empty());
  CHECK(r.leaf_mask() == r.cleaned);
  CHECK(r.report.border_damage_px == 0);
  CHECK(r.report.internal_damage_px == leaf.truth.internal_damage_px);
  CHECK(r.min_size == default_min_component_size(400, 300));
}

TEST_CASE("bite curve adds border damage without touching holes") {
  const auto spec = notched();
  const auto leaf = generate_leaf(spec);
  const std::vector<QuadraticBezier> curves{*bite_reconstruction_curve(spec, 0)};
  const auto r = analyze(leaf.image, {}, curves);
  REQUIRE(r.closure.curves.size() == 1);
  CHECK(r.closure.curves[0].status == CurveStatus::Accepted);
  CHECK(r.report.border_damage_px == r.closure.border_damage_px());
  CHECK(r.report.internal_damage_px == leaf.truth.internal_damage_px);
  CHECK(r.report.total_leaf_px ==
        r.report.leaf_foreground_px + r.report.internal_damage_px + r.report.border_damage_px);
  CHECK(r.report.leaf_foreground_px == r.leaf_mask().count());
}

TEST_CASE("manual threshold equal to the automatic one changes nothing") {
  const auto leaf = generate_leaf(notched());
  const auto a = analyze(leaf.image, {});
  AnalysisConfig c;
  c.threshold = a.decision.threshold;
  const auto b = analyze(leaf.image, c);
  CHECK(b.report == a.report);
  CHECK(b.decision.overridden);
}

TEST_CASE("uniform image needs a manual threshold") {
  RasterImage white(40, 30, Rgb{255, 255, 255});
  CHECK_THROWS_AS(analyze(white, {}), UniformImageError);
  AnalysisConfig c;
  c.threshold = 100;
  CHECK_NOTHROW(analyze(white, c));
}

TEST_CASE("session document layout") {
  const auto leaf = generate_leaf(notched());
  const auto r = analyze(leaf.image, {});
  const auto j = session_document("abc", 3, "ready", "", AnalysisConfig{}, {}, &r);
  CHECK(j["kind"] == "session");
  CHECK(j["id"] == "abc");
  CHECK(j["revision"] == 3);
  CHECK(j["message"].is_null());
  CHECK(j["curves"].empty());
  CHECK(j["result"]["report"]["internal_damage_px"] == r.report.internal_damage_px);
  CHECK(j["result"]["report"]["damage_ratio"] == document_ratio(r.report.damage_ratio));
  CHECK(j["result"]["segmentation"]["threshold"] == r.decision.threshold);

  const auto pending = session_document("abc", 0, "needs_threshold", "why", AnalysisConfig{}, {}, nullptr);
  CHECK(pending["result"].is_null());
  CHECK(pending["message"] == "why");
}

}
