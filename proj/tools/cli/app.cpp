#include "app.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "output.hpp"

namespace dnilab::cli {

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::int64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<std::int64_t> threads;
};

void add_globals(CLI::App& app, GlobalFlags& g) {
  app.add_option("--config", g.config, "JSON config file (defaults apply to missing keys)");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--samples", g.samples, "Monte Carlo path count (mc_samples)");
  app.add_option("--out", g.out, "Output directory (default $DNILAB_OUT_DIR, else .)");
  app.add_option("--tol", g.tol, "Pass/fail tolerance for checks and LGI");
  app.add_option("--threads", g.threads, "Worker count, 0 for all cores");
}

/// "--a.b=v" or "--a.b v" pairs left over by the parser.
std::vector<std::pair<std::string, std::string>> dotted_overrides(
    const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw UsageError("unexpected argument '" + a + "'");
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw UsageError("flag '" + a + "' needs a value");
      out.emplace_back(a.substr(2), extras[++i]);
    }
  }
  return out;
}

SweepConfig build_config(const GlobalFlags& g, const std::vector<std::string>& extras) {
  Json doc = g.config.empty() ? default_config() : load_config_file(g.config);
  for (const auto& [key, value] : dotted_overrides(extras)) apply_override(doc, key, value);
  if (g.seed) doc["seed"] = *g.seed;
  if (g.samples) doc["mc_samples"] = *g.samples;
  if (g.out) doc["out"] = *g.out;
  if (g.tol) doc["tol"] = *g.tol;
  if (g.threads) doc["threads"] = *g.threads;
  if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() < 0) {
    throw UsageError("seed must be nonnegative");
  }
  return parse_config(doc);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Measurement invasiveness and memory experiments on open qubit dynamics", "dnilab");
  app.require_subcommand(1);
  app.allow_extras();
  GlobalFlags globals;
  add_globals(app, globals);

  const std::map<std::string, std::function<RunOutput(const SweepConfig&)>> runners{
      {"coherence", run_coherence}, {"invasiveness", run_invasiveness}, {"lgi", run_lgi},
      {"p3-dump", run_p3_dump},     {"checks", run_checks}};
  const std::map<std::string, std::string> help{
      {"coherence", "Coherence decay d(t): closed form against the engine"},
      {"invasiveness", "Invasiveness I(t, tau) on the time grid"},
      {"lgi", "Leggett-Garg K(t, tau) and optional threshold scan"},
      {"p3-dump", "Full three-measurement tables per grid point"},
      {"checks", "Markovianity, superclassicality, discord and channel checks"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : runners) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->allow_extras();
    sub->fallthrough();
    subs[name] = sub;
  }
  std::string svg_input, svg_x = "t", svg_output;
  std::vector<std::string> svg_y;
  auto* svg = app.add_subcommand("svg", "Line plot of CSV columns as SVG");
  svg->add_option("input", svg_input, "CSV file")->required();
  svg->add_option("--x", svg_x, "Abscissa column");
  svg->add_option("--y", svg_y, "Ordinate columns")->required()->delimiter(',');
  svg->add_option("-o,--output", svg_output, "SVG path (default: input with .svg)");

  const auto start = std::chrono::steady_clock::now();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (svg->parsed()) {
      if (!app.remaining().empty() || !svg->remaining().empty()) {
        throw UsageError("svg: unexpected arguments");
      }
      const auto text = csv_to_svg(read_file(svg_input), svg_x, svg_y);
      if (svg_output.empty()) {
        const auto dot = svg_input.rfind('.');
        svg_output = (dot == std::string::npos ? svg_input : svg_input.substr(0, dot)) + ".svg";
      }
      std::ofstream file(svg_output, std::ios::binary);
      if (!(file << text)) throw IoError("cannot write " + svg_output);
      out << svg_output << '\n';
      return kOk;
    }

    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      auto extras = app.remaining();
      const auto more = sub->remaining();
      extras.insert(extras.end(), more.begin(), more.end());
      const auto config = build_config(globals, extras);
      const auto result = runners.at(name)(config);
      const auto dir = resolve_out_dir(config.out);
      for (const auto& [file, content] : result.files) out << write_output(dir, file, content) << '\n';
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      err << "wall-clock " << elapsed.count() << " s\n";
      if (!result.violations.empty()) {
        for (const auto& v : result.violations) err << "invariant violation: " << v << '\n';
        return kInvariant;
      }
      return kOk;
    }
    return kUsage;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  }
}

}  // namespace dnilab::cli
