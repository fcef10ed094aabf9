#include "leafscan/cli.hpp"

#include "leafscan/analytics.hpp"
#include "leafscan/atomic_file.hpp"
#include "leafscan/codec.hpp"
#include "leafscan/document.hpp"
#include "leafscan/error.hpp"
#include "leafscan/service.hpp"
#include "leafscan/synth.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace leafscan::cli {
namespace {

bool is_image_file(const fs::path &p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".tif" || ext == ".tiff";
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + '"';
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string analyze_row(const ImageOutcome &o) {
  std::string row = csv_field(o.path);
  if (!o.result) {
    return row + ",,,,,,,,,," + csv_field(o.error);
  }
  const auto &r = o.result->report;
  row += ',' + std::to_string(r.leaf_foreground_px);
  row += ',' + std::to_string(r.internal_damage_px);
  row += ',' + std::to_string(r.border_damage_px);
  row += ',' + std::to_string(r.total_leaf_px);
  row += ',' + fixed(r.damage_ratio, 4);
  row += ',' + (r.total_cm2 ? fixed(*r.total_cm2, 4) : std::string());
  row += ',' + (r.damage_cm2 ? fixed(*r.damage_cm2, 4) : std::string());
  row += ',' + std::to_string(o.result->decision.threshold);
  row += o.result->decision.overridden ? ",true," : ",false,";
  return row;
}

// Unique artifact stems; inputs from different directories may share a name.
std::vector<std::string> artifact_stems(const std::vector<fs::path> &inputs) {
  std::vector<std::string> out;
  std::map<std::string, int> seen;
  for (const auto &p : inputs) {
    auto stem = p.stem().string();
    const int n = seen[stem]++;
    out.push_back(n == 0 ? stem : stem + "-" + std::to_string(n + 1));
  }
  return out;
}

const CurveRecord *curves_for(const std::vector<CurveRecord> &records, const fs::path &input) {
  for (const auto &r : records) {
    if (fs::path(r.path) == input) {
      return &r;
    }
  }
  // A bare file name in the curve file matches by name.
  for (const auto &r : records) {
    const fs::path rp(r.path);
    if (!rp.has_parent_path() && rp.filename() == input.filename()) {
      return &r;
    }
  }
  return nullptr;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto &f : out) {
    const auto b = f.find_first_not_of(" \t\r");
    const auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

std::optional<double> parse_number(const std::string &s) {
  if (s.empty()) {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) {
      return std::nullopt;
    }
    return v;
  } catch (const std::exception &) {
    return std::nullopt;
  }
}

std::vector<MeasurementSeries> parse_pairs(const std::string &text, const std::string &source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int label_col = -1, manual_col = -1, auto_col = -1;
  std::vector<MeasurementSeries> series;
  std::map<std::string, std::size_t> index;
  const auto fail = [&](const std::string &msg) {
    throw DocumentError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (manual_col < 0) {
      bool header = false;
      for (const auto &f : fields) {
        header = header || f == "label" || f == "manual" || f == "automatic";
      }
      if (header) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == "label") label_col = static_cast<int>(i);
          if (fields[i] == "manual") manual_col = static_cast<int>(i);
          if (fields[i] == "automatic") auto_col = static_cast<int>(i);
        }
        if (manual_col < 0 || auto_col < 0) {
          fail("header must name 'manual' and 'automatic' columns");
        }
        continue;
      }
      if (fields.size() == 2) {
        manual_col = 0;
        auto_col = 1;
      } else if (fields.size() == 3) {
        label_col = 0;
        manual_col = 1;
        auto_col = 2;
      } else {
        fail("expected 2 or 3 columns");
      }
    }
    const auto need = static_cast<std::size_t>(std::max({label_col, manual_col, auto_col}));
    if (fields.size() <= need) {
      fail("expected " + std::to_string(need + 1) + " columns, found " + std::to_string(fields.size()));
    }
    const auto m = parse_number(fields[static_cast<std::size_t>(manual_col)]);
    const auto a = parse_number(fields[static_cast<std::size_t>(auto_col)]);
    if (!m || !a) {
      fail("manual and automatic must be numbers");
    }
    const std::string label = label_col >= 0 ? fields[static_cast<std::size_t>(label_col)] : "all";
    auto [it, fresh] = index.try_emplace(label, series.size());
    if (fresh) {
      series.push_back(MeasurementSeries{label, {}, {}});
    }
    series[it->second].add(*m, *a);
  }
  if (series.empty()) {
    throw DocumentError(source + ": no measurement pairs");
  }
  return series;
}

std::pair<std::string, int> parse_bind(const std::string &bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw OutOfRange("--bind: expected HOST:PORT, got '" + bind + "'");
  }
  const auto host = bind.substr(0, colon);
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(bind.substr(colon + 1), &used);
    if (used != bind.size() - colon - 1) {
      port = -1;
    }
  } catch (const std::exception &) {
  }
  if (host.empty() || port < 0 || port > 65535) {
    throw OutOfRange("--bind: expected HOST:PORT, got '" + bind + "'");
  }
  return {host, port};
}

void ensure_dir(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(dir.string() + ": cannot create output directory");
  }
}

} // namespace

std::vector<fs::path> collect_inputs(const std::vector<std::string> &inputs) {
  std::vector<fs::path> out;
  for (const auto &in : inputs) {
    const fs::path p(in);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto &e : fs::directory_iterator(p, ec)) {
        if (e.is_regular_file() && is_image_file(e.path())) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

int cmd_analyze(const std::vector<std::string> &inputs, const RunConfig &config, std::ostream &out,
                std::ostream &err) {
  try {
    config.analysis.validate();
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<CurveRecord> records;
  if (config.curves_file) {
    try {
      records = parse_curve_file(read_text_file(*config.curves_file), config.curves_file->string());
    } catch (const IoError &e) {
      err << "error: --curves: " << e.what() << '\n';
      return kExitIo;
    } catch (const Error &e) {
      err << "error: --curves: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  const auto files = collect_inputs(inputs);
  if (files.empty()) {
    err << "error: no input images\n";
    return kExitConfig;
  }
  try {
    ensure_dir(config.out_dir);
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  const auto stems = artifact_stems(files);

  std::vector<ImageOutcome> outcomes(files.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> io_failed{false};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      auto &o = outcomes[i];
      o.path = files[i].string();
      const auto *rec = curves_for(records, files[i]);
      const std::span<const QuadraticBezier> curves =
          rec ? std::span<const QuadraticBezier>(rec->curves) : std::span<const QuadraticBezier>();
      std::string state = "ready";
      try {
        const auto img = load_image(files[i]);
        try {
          o.result = analyze(img, config.analysis, curves);
          save_png(annotate(img, *o.result), config.out_dir / (stems[i] + ".annotated.png"));
        } catch (const UniformImageError &e) {
          o.error = e.what();
          state = "needs_threshold";
        }
      } catch (const IoError &e) {
        o.result.reset();
        o.error = e.what();
        state = "error";
        io_failed = true;
      } catch (const std::exception &e) {
        o.result.reset();
        o.error = e.what();
        state = "error";
      }
      try {
        const auto doc = session_document(stems[i], 0, state, o.error, config.analysis, curves,
                                          o.result ? &*o.result : nullptr);
        write_file_atomic(config.out_dir / (stems[i] + ".session.json"), doc.dump(2) + "\n");
      } catch (const std::exception &e) {
        if (o.error.empty()) {
          o.error = e.what();
        }
        io_failed = true;
      }
    }
  };
  unsigned jobs = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto &t : pool) {
    t.join();
  }

  // Single writer: rows in input order.
  std::string csv = std::string(kAnalyzeCsvHeader) + "\n";
  std::size_t failed = 0;
  for (const auto &o : outcomes) {
    csv += analyze_row(o) + "\n";
    if (!o.result) {
      ++failed;
      err << (o.error.find(o.path) == std::string::npos ? o.path + ": " : std::string()) << o.error << '\n';
    }
  }
  const auto csv_path = config.csv.value_or(config.out_dir / "report.csv");
  try {
    write_file_atomic(csv_path, csv);
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "analyzed " << outcomes.size() - failed << " of " << outcomes.size() << " images; report "
      << csv_path.string() << '\n';
  return io_failed ? kExitIo : kExitOk;
}

int cmd_synth(const fs::path &spec_file, std::size_t count, std::uint64_t seed, const fs::path &out_dir,
              std::ostream &out, std::ostream &err) {
  std::optional<SyntheticLeafSpec> fixed_spec;
  std::optional<LeafTemplate> tmpl;
  try {
    const auto doc = parse_document(read_text_file(spec_file), spec_file.string());
    const auto kind = doc.value("kind", std::string());
    try {
      if (kind == "leaf_spec") {
        fixed_spec = leaf_spec_from_json(doc);
        validate(*fixed_spec);
      } else if (kind == "leaf_template") {
        tmpl = leaf_template_from_json(doc);
      } else {
        throw DocumentError("kind must be 'leaf_spec' or 'leaf_template'");
      }
    } catch (const Error &e) {
      throw DocumentError(spec_file.string() + ": " + e.what());
    }
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (count == 0) {
    out << "generated 0 leaves\n";
    return kExitOk;
  }
  try {
    ensure_dir(out_dir);
    for (std::size_t i = 0; i < count; ++i) {
      SyntheticLeafSpec spec;
      if (fixed_spec) {
        spec = *fixed_spec;
        spec.seed = seed + i;
      } else {
        spec = sample_leaf_spec(*tmpl, seed + i);
      }
      const auto leaf = generate_leaf(spec);
      char name[32];
      std::snprintf(name, sizeof name, "synth_%03zu", i);
      save_png(leaf.image, out_dir / (std::string(name) + ".png"));
      write_file_atomic(out_dir / (std::string(name) + ".truth.json"), to_json(leaf.truth).dump(2) + "\n");
      write_file_atomic(out_dir / (std::string(name) + ".spec.json"), to_json(spec).dump(2) + "\n");
    }
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  out << "generated " << count << " leaves in " << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_report(const fs::path &pairs_csv, const RunConfig &config, std::ostream &out, std::ostream &err) {
  std::vector<MeasurementSeries> series;
  try {
    series = parse_pairs(read_text_file(pairs_csv), pairs_csv.string());
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto report = correlation_report(series);

  std::string csv = std::string(kReportCsvHeader) + "\n";
  std::size_t ok = 0;
  for (const auto &o : report.outcomes) {
    if (!o.result) {
      err << o.label << ": " << o.error << '\n';
      continue;
    }
    ++ok;
    const auto &r = *o.result;
    csv += csv_field(r.label) + ',' + std::to_string(r.n) + ',' + fixed(100.0 * r.r, 4) + ',' + general(r.slope) +
           ',' + general(r.intercept) + ',' + (r.p_value < kPValueFloor ? std::string("<1e-12") : general(r.p_value)) +
           ',' + general(r.sd_diff) + '\n';
  }
  try {
    ensure_dir(config.out_dir);
    write_file_atomic(config.out_dir / "plot_data.json", plot_data_document(report).dump(2) + "\n");
    write_file_atomic(config.csv.value_or(config.out_dir / "correlation.csv"), csv);
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "correlated " << ok << " of " << report.outcomes.size() << " series\n";
  return ok == 0 ? kExitConfig : kExitOk;
}

int cmd_serve(const std::string &bind, const fs::path &store_dir, std::ostream &out, std::ostream &err) {
  std::string host;
  int port = 0;
  try {
    std::tie(host, port) = parse_bind(bind);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::unique_ptr<service::SessionStore> store;
  try {
    ensure_dir(store_dir);
    store = std::make_unique<service::SessionStore>(store_dir);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  // Signals are taken synchronously by this thread; server threads inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  // SO_REUSEADDR only: a port held by another process must fail to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  service::register_routes(server, *store);
  if (port == 0) {
    port = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    port = -1;
  }
  if (port < 0) {
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    err << "error: cannot bind " << bind << '\n';
    return kExitIo;
  }
  out << "listening on " << host << ':' << port << '\n' << std::flush;
  std::thread listener([&] { server.listen_after_bind(); });
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  listener.join();
  store->flush();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  out << "stopped\n";
  return kExitOk;
}

int run(int argc, char **argv) {
  CLI::App app{"Leaf damage quantification"};
  app.require_subcommand(1);

  RunConfig rc;
  std::vector<std::string> inputs;
  std::string channel = "a", polarity, curves, csv;
  std::optional<int> threshold;
  std::optional<std::size_t> min_size;
  std::optional<double> ppcm;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string spec_file, pairs_file, bind = "127.0.0.1:8080", store = "leafscan-store";

  const auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--out", rc.out_dir, "Output directory");
    cmd->add_option("--csv", csv, "CSV output path");
  };

  auto *analyze_cmd = app.add_subcommand("analyze", "Quantify damage on images or directories");
  analyze_cmd->add_option("inputs", inputs, "Image files or directories")->required();
  analyze_cmd->add_option("--channel", channel, "Lab channel to threshold")
      ->check(CLI::IsMember({"L", "a", "b"}, CLI::ignore_case));
  analyze_cmd->add_option("--polarity", polarity, "Which side of the threshold is leaf")
      ->check(CLI::IsMember({"below", "above"}, CLI::ignore_case));
  analyze_cmd->add_option("--threshold", threshold, "Manual threshold")->check(CLI::Range(1, 255));
  analyze_cmd->add_option("--min-size", min_size, "Noise-removal component size (px)");
  analyze_cmd->add_option("--ppcm", ppcm, "Pixels per centimetre")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--curves", curves, "Curve file");
  analyze_cmd->add_option("--jobs", rc.jobs, "Worker threads (0 = all cores)");
  add_common(analyze_cmd);

  auto *synth_cmd = app.add_subcommand("synth", "Generate synthetic leaves with ground truth");
  synth_cmd->add_option("spec", spec_file, "leaf_spec or leaf_template document")->required();
  synth_cmd->add_option("--count", count, "Number of leaves");
  synth_cmd->add_option("--seed", seed, "Base seed");
  synth_cmd->add_option("--out", rc.out_dir, "Output directory");

  auto *report_cmd = app.add_subcommand("report", "Correlate manual and automatic measurements");
  report_cmd->add_option("pairs", pairs_file, "CSV with label,manual,automatic")->required();
  add_common(report_cmd);

  auto *serve_cmd = app.add_subcommand("serve", "Run the HTTP session service");
  serve_cmd->add_option("--bind", bind, "HOST:PORT");
  serve_cmd->add_option("--store", store, "Session store directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (!csv.empty()) {
    rc.csv = csv;
  }
  if (*analyze_cmd) {
    rc.analysis.channel = *parse_channel(channel);
    if (!polarity.empty()) {
      rc.analysis.polarity = parse_polarity(polarity);
    }
    rc.analysis.threshold = threshold;
    rc.analysis.min_size = min_size;
    rc.analysis.pixels_per_cm = ppcm;
    if (!curves.empty()) {
      rc.curves_file = curves;
    }
    return cmd_analyze(inputs, rc, std::cout, std::cerr);
  }
  if (*synth_cmd) {
    return cmd_synth(spec_file, count, seed, rc.out_dir, std::cout, std::cerr);
  }
  if (*report_cmd) {
    return cmd_report(pairs_file, rc, std::cout, std::cerr);
  }
  return cmd_serve(bind, store, std::cout, std::cerr);
}

} // namespace leafscan::cli
