// polygauss: positivity screening for polynomial-Gaussian kernels.
//
//   polygauss check SPEC      staged non-positivity search
//   polygauss gauss SPEC      symplectic spectrum of the Gaussian part
//   polygauss preorder A B    Gaussian preorder relation
//   polygauss zscan           Z_k(delta) table for the kappa_gamma family
//   polygauss npt SPEC        partial-transpose screening
//   polygauss fixture NAME    emit a named kernel spec
//   polygauss verify SPEC REPORT   re-check a certificate; exit 0 valid, 1 rejected

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "polygauss/pipeline.hpp"

using namespace polygauss;

namespace {

struct Output {
  std::string path;
  std::string format = "json";

  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << text;
  }
  void write(const json& j) const { write(j.dump(2) + "\n"); }
  void require_json(const char* cmd) const {
    if (format != "json") throw input_error(std::string(cmd) + ": --format csv is only available for zscan");
  }
};

std::vector<double> parse_deltas(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    if (s == "inf" || s == "+inf" || s == "infinity") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !std::isfinite(v)) throw input_error("--deltas: cannot parse '" + s + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positivity screening for polynomial-Gaussian integral kernels"};
  app.require_subcommand(1);
  Output out;
  CheckOptions copts;
  std::vector<std::string> delta_items;
  bool timings = false;

  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", out.path, "Write the report to this path instead of stdout");
    sub->add_option("--format", out.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  const auto add_search = [&](CLI::App* sub) {
    sub->add_option("--kmax", copts.kmax, "Largest e_k order in sweeps")->capture_default_str();
    sub->add_option("--trials", copts.trials, "Mercer search trials")->capture_default_str();
    sub->add_option("--seed", copts.seed, "Mercer search seed")->capture_default_str();
  };

  std::string spec_path, spec_b, report_path, fixture_name;
  std::vector<std::size_t> part1;
  ZscanOptions zopts;
  std::vector<double> gamma_range;
  FixtureParams fparams;

  auto* check = app.add_subcommand("check", "Run the staged non-positivity search on a kernel spec");
  check->add_option("spec", spec_path, "Kernel spec (JSON)")->required();
  add_search(check);
  check->add_option("--deltas", delta_items, "Equivalence shifts for the delta stage")->delimiter(',');
  check->add_flag("--timings", timings, "Include per-stage wall times");
  add_output(check);

  auto* gauss = app.add_subcommand("gauss", "Symplectic spectrum and positivity of the Gaussian part");
  gauss->add_option("spec", spec_path, "Kernel spec (JSON)")->required();
  add_output(gauss);

  auto* preorder = app.add_subcommand("preorder", "Preorder relation between the Gaussian parts of two specs");
  preorder->add_option("spec_a", spec_path, "First kernel spec")->required();
  preorder->add_option("spec_b", spec_b, "Second kernel spec")->required();
  add_output(preorder);

  auto* zscan = app.add_subcommand("zscan", "Z_k(delta) thresholds for the kappa_gamma family");
  zscan->add_option("--k", zopts.ks, "Orders k (comma separated)")->delimiter(',');
  zscan->add_option("--deltas", delta_items, "Shifts delta; 'inf' for the large-delta limit")->delimiter(',');
  zscan->add_option("--gamma-range", gamma_range, "Scan range lo,hi for gamma")->delimiter(',')->expected(2);
  add_output(zscan);

  auto* npt = app.add_subcommand("npt", "Partial-transpose screening of a bipartite kernel");
  npt->add_option("spec", spec_path, "Kernel spec with partition")->required();
  npt->add_option("--part1", part1, "1-based indices of the first party (overrides the spec)")->delimiter(',');
  add_search(npt);
  add_output(npt);

  auto* fixture = app.add_subcommand("fixture", "Emit a named kernel spec");
  fixture->add_option("name", fixture_name, "caldeira-n0, caldeira-n1, caldeira-n2 or kappa-gamma-delta")->required();
  fixture->add_option("--beta", fparams.beta, "Oscillator parameter")->capture_default_str();
  fixture->add_option("--gamma", fparams.gamma, "Family parameter gamma")->capture_default_str();
  fixture->add_option("--delta", fparams.delta, "Family shift delta")->capture_default_str();
  add_output(fixture);

  auto* verify = app.add_subcommand("verify", "Re-check the certificate in a check report");
  verify->add_option("spec", spec_path, "Kernel spec the report was produced for")->required();
  verify->add_option("report", report_path, "Report JSON from check")->required();
  add_output(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    CommandResult res;
    if (*check) {
      out.require_json("check");
      if (!delta_items.empty()) copts.deltas = parse_deltas(delta_items);
      copts.timings = timings;
      res = cmd_check(load_spec(spec_path), copts);
    } else if (*gauss) {
      out.require_json("gauss");
      res = cmd_gauss(load_spec(spec_path));
    } else if (*preorder) {
      out.require_json("preorder");
      res = cmd_preorder(load_spec(spec_path), load_spec(spec_b));
    } else if (*zscan) {
      if (!delta_items.empty()) zopts.deltas = parse_deltas(delta_items);
      if (!gamma_range.empty()) {
        zopts.gamma_lo = gamma_range[0];
        zopts.gamma_hi = gamma_range[1];
      }
      const auto rows = run_zscan(zopts);
      if (out.format == "csv") {
        out.write(zscan_csv(rows));
        return kExitUndecided;
      }
      res.report = zscan_json(rows);
    } else if (*npt) {
      out.require_json("npt");
      res = cmd_npt(load_spec(spec_path), part1.empty() ? std::nullopt : std::optional(part1), copts);
    } else if (*fixture) {
      out.require_json("fixture");
      res.report = to_json(make_fixture(fixture_name, fparams));
    } else if (*verify) {
      out.require_json("verify");
      const auto spec = load_spec(spec_path);
      json report;
      try {
        report = json::parse(read_file(report_path));
      } catch (const json::parse_error&) {
        throw input_error("verify: report is not valid JSON");
      }
      if (report.value("checksum", "") != checksum(spec)) throw input_error("verify: report checksum does not match the spec");
      const auto& verdict = report.at("verdict");
      if (verdict.value("result", "") != "NotPSD") throw input_error("verify: report carries no certificate");
      const auto v = verify_certificate(spec, verdict.at("certificate"));
      res.report = {{"command", "verify"}, {"valid", v.valid}, {"reason", v.reason}};
      res.exit_code = v.valid ? 0 : 1;
    }
    out.write(res.report);
    return res.exit_code;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
