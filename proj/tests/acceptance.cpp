// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"
#include "support.hpp"

#include "leafscan/analytics.hpp"
#include "leafscan/atomic_file.hpp"
#include "leafscan/cli.hpp"
#include "leafscan/codec.hpp"
#include "leafscan/color.hpp"
#include "leafscan/document.hpp"
#include "leafscan/pipeline.hpp"
#include "leafscan/segmentation.hpp"
#include "leafscan/service.hpp"
#include "leafscan/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace leafscan;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

oracle::Counts bimodal(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> mean(10, 245), sd(2, 30), frac(0.05, 0.95);
  const double m0 = mean(rng), m1 = mean(rng), s0 = sd(rng), s1 = sd(rng), f = frac(rng);
  std::uniform_int_distribution<std::uint64_t> total(500, 200000);
  const auto n = total(rng);
  oracle::Counts c{};
  for (std::uint64_t i = 0; i < n; ++i) {
    const bool first = std::uniform_real_distribution<double>(0, 1)(rng) < f;
    std::normal_distribution<double> d(first ? m0 : m1, first ? s0 : s1);
    c[static_cast<std::size_t>(std::clamp(std::lround(d(rng)), 0L, 255L))]++;
  }
  return c;
}

Verdict otsu_equivalence() {
  std::mt19937_64 rng(1001);
  std::vector<oracle::Counts> cases;
  std::uniform_int_distribution<int> byte(0, 255);
  while (cases.size() < 500) {
    GrayImage img(32, 32);
    for (auto &p : img.pixels()) {
      p = static_cast<std::uint8_t>(byte(rng));
    }
    const auto h = build_histogram(img);
    oracle::Counts c{};
    for (int i = 0; i < 256; ++i) {
      c[static_cast<std::size_t>(i)] = h.count(i);
    }
    cases.push_back(c);
  }
  for (int i = 0; i < 50; ++i) {
    cases.push_back(bimodal(rng));
  }
  const auto t0 = Clock::now();
  std::size_t bad_t = 0, bad_var = 0;
  double worst = 0;
  for (const auto &c : cases) {
    const auto got = otsu_threshold(Histogram(c));
    const auto want = oracle::otsu_scan(c);
    bad_t += got.threshold != want.threshold;
    const double err = std::abs(got.variance - static_cast<double>(want.variance));
    worst = std::max(worst, err);
    bad_var += !(err <= 1e-9);
  }
  const double ms = ms_since(t0);
  return {bad_t == 0 && bad_var == 0 && ms < 5000,
          fmt("%zu cases, threshold mismatches %zu, variance max err %.3g (> 1e-9: %zu), %.0f ms (< 5000)",
              cases.size(), bad_t, worst, bad_var, ms)};
}

Verdict bezier_consistency() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> coord(-500, 500), unit(0, 1);
  double worst = 0;
  std::size_t failures = 0;
  for (int c = 0; c < 1000; ++c) {
    const QuadraticBezier q{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
    const auto g = q.general();
    const auto rev = q.reversed();
    failures += !(bezier_point(g, 0.0) == q.b0 && bezier_point(g, 1.0) == q.b2);
    failures += !(quadratic_point(q, 0.0) == q.b0 && quadratic_point(q, 1.0) == q.b2);
    const double lo_x = std::min({q.b0.x, q.b1.x, q.b2.x}), hi_x = std::max({q.b0.x, q.b1.x, q.b2.x});
    const double lo_y = std::min({q.b0.y, q.b1.y, q.b2.y}), hi_y = std::max({q.b0.y, q.b1.y, q.b2.y});
    for (int k = 0; k < 100; ++k) {
      const double t = k == 0 ? 0.0 : k == 99 ? 1.0 : unit(rng);
      const auto a = bezier_point(g, t);
      const auto b = quadratic_point(q, t);
      const auto r = quadratic_point(rev, 1.0 - t);
      worst = std::max({worst, std::abs(a.x - b.x), std::abs(a.y - b.y)});
      failures += std::abs(r.x - b.x) > 1e-12 * (1 + std::abs(b.x)) || std::abs(r.y - b.y) > 1e-12 * (1 + std::abs(b.y));
      // hull: inside the control-point bounding box (barycentric weights are non-negative)
      failures += b.x < lo_x - 1e-9 || b.x > hi_x + 1e-9 || b.y < lo_y - 1e-9 || b.y > hi_y + 1e-9;
    }
  }
  return {worst <= 1e-12 && failures == 0,
          fmt("100000 samples, max |general - quadratic| %.3g (<= 1e-12), property failures %zu", worst, failures)};
}

Verdict internal_damage_exactness() {
  LeafTemplate tmpl;
  tmpl.holes_min = 1;
  tmpl.holes_max = 5;
  tmpl.color_jitter = 0;
  tmpl.exponent_max = 3.0;
  std::size_t px_errors = 0, ratio_errors = 0, speckled = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto spec = sample_leaf_spec(tmpl, 5000 + seed);
    const auto leaf = generate_leaf(spec);
    speckled += !spec.speckles.empty();
    if (leaf.truth.max_speckle_px >= default_min_component_size(spec.width, spec.height)) {
      return {false, fmt("seed %llu: speckle not below min_size", static_cast<unsigned long long>(seed))};
    }
    const auto r = analyze(leaf.image, {});
    px_errors += r.report.internal_damage_px != leaf.truth.internal_damage_px;
    ratio_errors += r.report.damage_ratio != leaf.truth.damage_ratio;
  }
  return {px_errors == 0 && ratio_errors == 0,
          fmt("100 leaves (%zu with speckles), internal px mismatches %zu, ratio mismatches %zu", speckled, px_errors,
              ratio_errors)};
}

Verdict border_reconstruction() {
  LeafTemplate tmpl;
  tmpl.holes_min = 0;
  tmpl.holes_max = 0;
  tmpl.bites_min = 1;
  tmpl.bites_max = 1;
  tmpl.speckles_max = 0;
  double worst = 0, sum = 0;
  std::size_t over = 0, n = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto spec = sample_leaf_spec(tmpl, 7000 + seed);
    const auto leaf = generate_leaf(spec);
    const auto curve = bite_reconstruction_curve(spec, 0);
    if (!curve) {
      return {false, fmt("seed %llu: no reconstruction curve", static_cast<unsigned long long>(seed))};
    }
    const std::vector<QuadraticBezier> curves{*curve};
    const auto r = analyze(leaf.image, {}, curves);
    const double truth = static_cast<double>(leaf.truth.border_damage_px);
    const double rel = std::abs(static_cast<double>(r.report.damage_px()) - truth) / truth;
    worst = std::max(worst, rel);
    sum += rel;
    over += rel > 0.08;
    ++n;
  }
  return {over == 0, fmt("50 bite leaves, relative error mean %.2f%% max %.2f%% (<= 8%%), over bound %zu",
                         100 * sum / static_cast<double>(n), 100 * worst, over)};
}

Verdict correlation_methodology() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> area(5.0, 60.0);
  MeasurementSeries s{"synthetic", {}, {}};
  for (int i = 0; i < 18; ++i) {
    const double t = area(rng);
    std::normal_distribution<double> e(0.0, 0.02 * t);
    s.add(t + e(rng), t + e(rng));
  }
  const std::vector<MeasurementSeries> in{s};
  const auto rep = correlation_report(in);
  if (!rep.outcomes.at(0).result) {
    return {false, "series failed: " + rep.outcomes[0].error};
  }
  const auto &res = *rep.outcomes[0].result;
  const double r_ref = oracle::pearson_sums(s.manual, s.automatic);
  const double p_ref = oracle::p_value(r_ref, 18);
  const double dr = std::abs(res.r - r_ref), dp = std::abs(res.p_value - p_ref);
  return {res.r >= 0.99 && res.p_value < 0.001 && dr <= 1e-9 && dp <= 1e-9,
          fmt("n=18 r=%.6f (>= 0.99) p=%.3g (< 0.001), |r-oracle| %.2g |p-oracle| %.2g (<= 1e-9)", res.r,
              res.p_value, dr, dp)};
}

Verdict throughput() {
  testing::TempDir tmp;
  SyntheticLeafSpec spec;
  spec.width = 1024;
  spec.height = 1024;
  spec.leaf = LeafShape{{512, 512}, 420, 300, 2.5};
  spec.holes = {Circle{{400, 500}, 30}, Circle{{600, 450}, 18}, Circle{{520, 650}, 40}};
  spec.speckles = {Circle{{40, 40}, 3}, Circle{{980, 990}, 2.5}};
  spec.color_jitter = 8;
  const auto path = tmp / "big.png";
  save_png(generate_leaf(spec).image, path);
  std::vector<double> times;
  std::size_t internal = 0;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = Clock::now();
    const auto img = load_image(path);
    const auto r = analyze(img, {});
    times.push_back(ms_since(t0));
    internal = r.report.internal_damage_px;
  }
  std::sort(times.begin(), times.end());
  const double median = times[2];
  return {median < 1000.0 && internal > 0,
          fmt("1024x1024 load->quantify median %.1f ms over 5 runs (< 1000, target < 250: %s)", median,
              median < 250.0 ? "met" : "missed")};
}

Verdict cli_service_equivalence() {
  testing::TempDir tmp;
  LeafTemplate tmpl;
  tmpl.width = 300;
  tmpl.height = 240;
  tmpl.semi_x_min = 90;
  tmpl.semi_x_max = 120;
  tmpl.semi_y_min = 60;
  tmpl.semi_y_max = 90;
  tmpl.bites_max = 2;
  tmpl.color_jitter = 5;
  fs::create_directories(tmp / "in");
  std::vector<CurveRecord> records;
  std::vector<std::string> names;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto spec = sample_leaf_spec(tmpl, 9000 + i);
    const auto name = fmt("leaf_%02llu.png", static_cast<unsigned long long>(i));
    save_png(generate_leaf(spec).image, tmp / "in" / name);
    names.push_back(name);
    CurveRecord rec{name, {}};
    for (std::size_t b = 0; b < spec.bites.size(); ++b) {
      if (const auto c = bite_reconstruction_curve(spec, b)) {
        rec.curves.push_back(*c);
      }
    }
    records.push_back(std::move(rec));
  }
  write_file_atomic(tmp / "curves.json", curve_file_document(records).dump(2));

  std::size_t compared = 0, mismatches = 0;
  std::string first_diff;
  for (const bool with_curves : {false, true}) {
    cli::RunConfig rc;
    rc.out_dir = tmp / (with_curves ? "out_curves" : "out_plain");
    if (with_curves) {
      rc.curves_file = tmp / "curves.json";
    }
    std::ostringstream out, err;
    if (cli::cmd_analyze({(tmp / "in").string()}, rc, out, err) != cli::kExitOk) {
      return {false, "cli analyze failed: " + err.str()};
    }
    service::SessionStore store;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto bytes = read_file(tmp / "in" / names[i]);
      const auto created = store.create(bytes, "image/png");
      if (created.status != 201) {
        return {false, "service create failed: " + created.body.dump()};
      }
      const auto id = created.body["id"].get<std::string>();
      if (with_curves) {
        for (const auto &c : records[i].curves) {
          store.add_curve(id, Json{{"points", to_json(c)}}.dump());
        }
      }
      const auto svc = store.get_result(id).body["result"];
      const auto stem = fs::path(names[i]).stem().string();
      const auto cli_doc =
          parse_document(read_text_file(rc.out_dir / (stem + ".session.json")), "session", "session");
      ++compared;
      if (svc != cli_doc["result"]) {
        ++mismatches;
        if (first_diff.empty()) {
          first_diff = names[i] + (with_curves ? " (curves): " : ": ") + Json::diff(cli_doc["result"], svc).dump();
        }
      }
    }
  }
  return {mismatches == 0 && compared == 40,
          fmt("%zu result documents compared field for field, %zu differ", compared, mismatches) +
              (first_diff.empty() ? "" : "; first: " + first_diff.substr(0, 300))};
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
      {"otsu-oracle-equivalence", otsu_equivalence},
      {"bezier-consistency", bezier_consistency},
      {"internal-damage-exactness", internal_damage_exactness},
      {"border-reconstruction-accuracy", border_reconstruction},
      {"correlation-methodology", correlation_methodology},
      {"throughput-1024", throughput},
      {"cli-service-equivalence", cli_service_equivalence},
  };
  int failed = 0;
  for (const auto &[name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception &e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
