// Command line front end: run a test spec, validate one, or re-derive the
// aggregates of an existing report from its rows.
//
// Exit codes: 0 success, 1 bad spec or arguments, 2 internal failure,
// 3 expectation violations (run) or aggregate mismatches (derive).
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atmbench/harness.hpp"

namespace {

using namespace atmbench;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int cmd_validate(const std::string& spec_path) {
  const TestSpec spec = load_spec_file(spec_path);
  std::cout << spec.to_text();
  return 0;
}

int cmd_run(const std::string& spec_path, const std::string& outdir,
            const std::vector<std::string>& formats, std::optional<std::uint64_t> seed,
            std::optional<std::int64_t> repetitions) {
  TestSpec spec = load_spec_file(spec_path);
  if (seed) spec.seed = *seed;
  if (repetitions) {
    if (*repetitions < 1) throw SpecError("spec: repetitions must be at least 1");
    spec.repetitions = *repetitions;
  }

  const std::filesystem::path dir(outdir);
  std::filesystem::create_directories(dir);

  TraceSink sink;
  if (spec.emit_trace) {
    sink = [&](std::int64_t run_id, const Trace& trace) {
      const auto path = dir / (spec.output_basename + ".run" + std::to_string(run_id) + ".trace");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      write_trace(out, trace);
    };
  }

  const MetricReport report = run_suite(spec, sink);

  for (const std::string& fmt : formats) {
    if (fmt == "human")
      write_file(dir / (spec.output_basename + ".txt"), emit_human(report));
    else if (fmt == "csv")
      write_file(dir / (spec.output_basename + ".csv"), emit_csv(report));
    else if (fmt == "records")
      write_file(dir / (spec.output_basename + ".records"), emit_records(report));
  }

  std::cout << "wrote " << report.runs.size() << " runs, " << report.aggregates.size()
            << " aggregates to " << (dir / spec.output_basename).string() << ".{";
  for (std::size_t i = 0; i < formats.size(); ++i)
    std::cout << (i ? "," : "") << (formats[i] == "human" ? "txt" : formats[i]);
  std::cout << "}\n";

  const std::vector<std::string> violations = check_expectations(report);
  for (const std::string& v : violations) std::cerr << v << '\n';
  return violations.empty() ? 0 : 3;
}

bool same_value(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

int cmd_derive(const std::string& records_path) {
  std::ifstream in(records_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + records_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const MetricReport report = parse_records(ss.str());

  const std::vector<AggRow> derived = recompute_aggregates(report.spec, report.runs);
  for (const AggRow& a : derived)
    std::cout << "aggregate metric=" << a.metric << " config=" << a.config
              << " frame_size=" << a.frame_size << " load_fraction=" << format_g17(a.load_fraction)
              << " key=" << a.key << " value=" << format_g17(a.value) << '\n';

  std::vector<std::string> mismatches;
  if (derived.size() != report.aggregates.size())
    mismatches.push_back("aggregate count: stored " + std::to_string(report.aggregates.size()) +
                         ", derived " + std::to_string(derived.size()));
  for (std::size_t i = 0; i < std::min(derived.size(), report.aggregates.size()); ++i) {
    const AggRow& d = derived[i];
    const AggRow& s = report.aggregates[i];
    if (d.metric != s.metric || d.config != s.config || d.frame_size != s.frame_size ||
        !same_value(d.load_fraction, s.load_fraction) || d.key != s.key ||
        !same_value(d.value, s.value))
      mismatches.push_back("aggregate " + std::to_string(i) + ": stored " + s.key + "=" +
                           format_g17(s.value) + ", derived " + d.key + "=" +
                           format_g17(d.value));
  }

  if (mismatches.empty()) {
    std::cerr << "derive: " << derived.size() << " aggregates match the stored report\n";
    return 0;
  }
  for (const std::string& m : mismatches) std::cerr << "derive: " << m << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame-level benchmark harness for cell-switched networks"};
  app.require_subcommand(1);

  std::string spec_path, outdir = ".", records_path;
  std::vector<std::string> formats{"human", "csv", "records"};
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> repetitions;

  CLI::App* run = app.add_subcommand("run", "run a test spec and write the report");
  run->add_option("spec", spec_path, "test spec file")->required();
  run->add_option("-o,--out", outdir, "output directory (default .)");
  run->add_option("--format", formats, "report formats to write")
      ->check(CLI::IsMember({"human", "csv", "records"}));
  run->add_option("--seed", seed, "override the spec seed");
  run->add_option("--repetitions", repetitions, "override the spec repetition count");

  CLI::App* validate = app.add_subcommand("validate", "parse a spec and echo its resolved form");
  validate->add_option("spec", spec_path, "test spec file")->required();

  CLI::App* derive = app.add_subcommand("derive", "recompute a report's aggregates from its rows");
  derive->add_option("records", records_path, "records-format report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(spec_path, outdir, formats, seed, repetitions);
    if (validate->parsed()) return cmd_validate(spec_path);
    if (derive->parsed()) return cmd_derive(records_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
