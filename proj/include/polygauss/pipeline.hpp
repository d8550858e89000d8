#pragma once

// Command implementations shared by the CLI binary and the tests.  Every
// command returns a JSON report and an exit code:
//   0 undecided / gate passed, 1 certified not PSD (or NPT), 2 input error,
//   3 internal numerical-consistency failure.

#include <chrono>
#include <iomanip>
#include <limits>
#include <sstream>

#include "polygauss/fixtures.hpp"
#include "polygauss/high_precision.hpp"
#include "polygauss/io.hpp"

namespace polygauss {

enum ExitCode : int { kExitUndecided = 0, kExitCertified = 1, kExitInput = 2, kExitNumerical = 3 };

struct CommandResult {
  json report;
  int exit_code = kExitUndecided;
};

struct CheckOptions {
  unsigned kmax = 5;
  unsigned trials = 200;
  std::uint64_t seed = 0;
  std::vector<double> deltas{10, 50, 250};
  double sign_tolerance = 1e-9;
  // The delta stage runs in 320-bit arithmetic, where roundoff sits near 1e-90;
  // 1e-30 keeps a wide margin while resolving e_k far below double precision.
  double hp_sign_tolerance = 1e-30;
  bool timings = false;
  MomentOptions moments{};
};

inline constexpr const char* kUndecidedNote =
    "no certificate of non-positivity was found; this is not a positivity proof";

namespace detail {

inline std::string hp_string(const hp_real& v) {
  std::ostringstream ss;
  ss << std::setprecision(40) << v;
  return ss.str();
}

inline json complex_json(const std::complex<double>& c) { return json::array({c.real(), c.imag()}); }

template <class T>
json reals_json(const std::vector<T>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

inline json spectrum_json(const SymplecticSpectrum<double>& s) { return reals_json(s.mus); }

template <class T>
json sweep_json(const SpectralReport<T>& r) {
  json j{{"kmax", r.kmax},
         {"moments", reals_json(r.moments)},
         {"eks", reals_json(r.eks)},
         {"sign_tolerance", to_double(r.sign_tolerance)}};
  if (r.first_negative) j["first_negative"] = *r.first_negative;
  return j;
}

inline json mercer_json(const MercerCertificate& c) {
  json coeffs = json::array();
  for (const auto& v : c.coeffs) coeffs.push_back(complex_json(v));
  return {{"type", "mercer"},
          {"points", c.points},
          {"coeffs", coeffs},
          {"value", c.value},
          {"scale", c.scale},
          {"trial", c.trial}};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

struct StageResult {
  std::string name;
  std::string status;  // "passed", "certificate" or "skipped"
  json detail = json::object();
  double seconds = 0;
};

struct PipelineReport {
  std::string checksum;
  std::vector<StageResult> stages;
  bool not_psd = false;
  std::string certificate_stage;
  json certificate;
  unsigned kmax = 0;
  unsigned kmax_effective = 0;

  json to_json(bool timings) const {
    json st = json::array();
    for (const auto& s : stages) {
      json e{{"stage", s.name}, {"status", s.status}, {"detail", s.detail}};
      if (timings) e["seconds"] = s.seconds;
      st.push_back(e);
    }
    json j{{"command", "check"}, {"checksum", checksum}, {"stages", st}, {"kmax", kmax}, {"kmax_effective", kmax_effective}};
    if (not_psd) {
      j["verdict"] = {{"result", "NotPSD"}, {"stage", certificate_stage}, {"certificate", certificate}};
    } else {
      j["verdict"] = {{"result", "Undecided"}, {"kmax", kmax_effective}, {"note", kUndecidedNote}};
    }
    return j;
  }

  int exit_code() const { return not_psd ? kExitCertified : kExitUndecided; }
};

/// Stages in order, stopping at the first certificate: self-adjointness, odd
/// degree, Gaussian gate, e_k sweep, Mercer search, delta-scan in 320-bit
/// arithmetic over equivalent Gaussian parts.
inline PipelineReport run_check(const KernelSpec& spec, const CheckOptions& opts = {}) {
  PipelineReport rep;
  rep.checksum = checksum(spec);
  rep.kmax = opts.kmax;
  const auto finish = [&](StageResult s, const detail::Stopwatch& w) {
    s.seconds = w.seconds();
    if (s.status == "certificate") {
      rep.not_psd = true;
      rep.certificate_stage = s.name;
      rep.certificate = s.detail.at("certificate");
    }
    rep.stages.push_back(std::move(s));
    return rep.not_psd;
  };

  {
    detail::Stopwatch w;
    const double defect = self_adjoint_defect(spec.poly);
    if (defect > 1e-10) throw input_error("check: polynomial is not self-adjoint (relative defect " + std::to_string(defect) + ")");
    finish({"self_adjointness", "passed", {{"defect", defect}}}, w);
  }
  const auto k = kernel_from_spec(spec);

  {
    detail::Stopwatch w;
    const auto v = odd_degree_gate(k.poly());
    StageResult s{"odd_degree", "passed", {{"result", to_string(v.kind)}}};
    if (v.kind == OddGateVerdict::Kind::Skipped) s.status = "skipped";
    if (v.kind == OddGateVerdict::Kind::RejectOdd || v.kind == OddGateVerdict::Kind::RejectReducibleOdd) {
      s.status = "certificate";
      s.detail["certificate"] = {{"type", "odd_degree"}, {"witness", v.witness}, {"degree", v.degree}};
    }
    if (finish(std::move(s), w)) return rep;
  }

  {
    detail::Stopwatch w;
    const auto v = gaussian_positive(k.triple());
    StageResult s{"gaussian", "passed",
                  {{"result", v.positive ? "Positive" : "NotPositive"},
                   {"mus", detail::spectrum_json(v.spectrum)},
                   {"max_mu", v.max_mu()}}};
    if (!v.positive) {
      s.status = "certificate";
      s.detail["certificate"] = {{"type", "symplectic"}, {"mus", detail::spectrum_json(v.spectrum)}, {"max_mu", v.max_mu()}};
    }
    if (finish(std::move(s), w)) return rep;
  }

  rep.kmax_effective = clamp_kmax(opts.kmax, *k.poly().degree(), opts.moments);
  {
    detail::Stopwatch w;
    StageResult s{"ek_sweep", "skipped"};
    if (rep.kmax_effective > 0) {
      const auto r = positivity_sweep(k, rep.kmax_effective, opts.moments, opts.sign_tolerance);
      s.status = "passed";
      s.detail = detail::sweep_json(r);
      if (r.certified_not_psd()) {
        s.status = "certificate";
        s.detail["certificate"] = {{"type", "ek"},
                                   {"k", *r.first_negative},
                                   {"moments", detail::reals_json(r.moments)},
                                   {"eks", detail::reals_json(r.eks)},
                                   {"sign_tolerance", opts.sign_tolerance}};
      }
    }
    if (finish(std::move(s), w)) return rep;
  }

  {
    detail::Stopwatch w;
    MercerOptions mo;
    mo.trials = opts.trials;
    mo.seed = opts.seed;
    StageResult s{"mercer", "passed", {{"trials", opts.trials}, {"seed", opts.seed}}};
    if (opts.trials == 0) s.status = "skipped";
    if (const auto c = opts.trials ? mercer_search(k, mo) : std::nullopt) {
      s.status = "certificate";
      s.detail["certificate"] = detail::mercer_json(*c);
    }
    if (finish(std::move(s), w)) return rep;
  }

  {
    detail::Stopwatch w;
    StageResult s{"delta_scan", "passed", {{"deltas", json::array()}, {"sign_tolerance", opts.hp_sign_tolerance}}};
    if (rep.kmax_effective == 0 || opts.deltas.empty()) s.status = "skipped";
    const auto khp = k.cast<hp_real>();
    for (double d : opts.deltas) {
      if (s.status != "passed") break;
      json row{{"delta", d}};
      try {
        const auto shifted = equiv_shift(khp, hp_real(d), opts.moments);
        const auto r = positivity_sweep(shifted, rep.kmax_effective, opts.moments, hp_real(opts.hp_sign_tolerance));
        row["eks"] = detail::reals_json(r.eks);
        if (r.certified_not_psd()) {
          std::vector<std::string> eks;
          for (const auto& e : r.eks) eks.push_back(detail::hp_string(e));
          s.status = "certificate";
          s.detail["certificate"] = {{"type", "ek_shifted"},
                                     {"delta", d},
                                     {"k", *r.first_negative},
                                     {"eks", eks},
                                     {"sign_tolerance", opts.hp_sign_tolerance}};
        }
      } catch (const input_error& e) {
        row["skipped"] = e.what();
      }
      s.detail["deltas"].push_back(row);
    }
    finish(std::move(s), w);
  }
  return rep;
}

struct VerifyResult {
  bool valid = false;
  std::string reason;
};

/// Standalone re-check of a certificate against the spec it was issued for.
inline VerifyResult verify_certificate(const KernelSpec& spec, const json& cert) {
  const auto k = kernel_from_spec(spec);
  const std::string type = cert.value("type", "");
  if (type == "odd_degree") {
    const auto w = cert.at("witness").get<std::vector<std::size_t>>();
    std::vector<std::size_t> idx;
    for (auto i : w) {
      if (i < 1 || i > spec.n) return {false, "witness index out of range"};
      idx.push_back(i - 1);
    }
    const auto r = k.poly().restrict_zero(idx);
    if (r.is_zero()) return {false, "restriction is zero"};
    if (*r.degree() % 2 == 0) return {false, "restriction has even degree"};
    return {true, "restricted polynomial has odd degree " + std::to_string(*r.degree())};
  }
  if (type == "symplectic") {
    const auto v = gaussian_positive(k.triple());
    if (v.positive) return {false, "symplectic spectrum is within the unit bound"};
    return {true, "max mu = " + std::to_string(v.max_mu())};
  }
  if (type == "mercer") {
    MercerCertificate c;
    c.points = cert.at("points").get<std::vector<std::vector<double>>>();
    for (const auto& v : cert.at("coeffs")) c.coeffs.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    for (const auto& p : c.points)
      if (p.size() != spec.n) return {false, "point dimension mismatch"};
    if (!mercer_certificate_valid(k, c)) return {false, "Mercer form is not negative"};
    return {true, "Mercer form is negative"};
  }
  if (type == "ek") {
    const unsigned kk = cert.at("k").get<unsigned>();
    const double tol = cert.at("sign_tolerance").get<double>();
    const auto recorded = cert.at("moments").get<std::vector<double>>();
    if (kk == 0 || kk > recorded.size()) return {false, "k out of range"};
    const auto fresh = moments(k, kk);
    for (unsigned j = 0; j < kk; ++j)
      if (std::abs(fresh[j] - recorded[j]) > 1e-9 * std::max(1.0, std::abs(fresh[j])))
        return {false, "recorded moments do not match the kernel"};
    const auto r = sweep_from_moments(fresh, tol);
    if (!r.certified_not_psd() || *r.first_negative != kk) return {false, "e_k is not below the sign tolerance"};
    return {true, "e_" + std::to_string(kk) + " < 0"};
  }
  if (type == "ek_shifted") {
    const unsigned kk = cert.at("k").get<unsigned>();
    const double d = cert.at("delta").get<double>();
    const double tol = cert.at("sign_tolerance").get<double>();
    const auto khp = k.cast<hp_real>();
    const auto r = positivity_sweep(equiv_shift(khp, hp_real(d)), kk, {}, hp_real(tol));
    if (!r.certified_not_psd() || *r.first_negative != kk) return {false, "shifted e_k is not below the sign tolerance"};
    return {true, "e_" + std::to_string(kk) + " < 0 for the equivalent kernel at delta " + detail::hp_string(hp_real(d))};
  }
  return {false, "unknown certificate type"};
}

inline CommandResult cmd_check(const KernelSpec& spec, const CheckOptions& opts = {}) {
  const auto rep = run_check(spec, opts);
  return {rep.to_json(opts.timings), rep.exit_code()};
}

inline CommandResult cmd_gauss(const KernelSpec& spec) {
  const auto v = gaussian_positive(spec.triple);
  const auto ps = phase_space_form(spec.triple);
  json j{{"command", "gauss"},
         {"checksum", checksum(spec)},
         {"mus", detail::spectrum_json(v.spectrum)},
         {"max_mu", v.max_mu()},
         {"margin", v.margin()},
         {"tolerance", kMuTolerance},
         {"G", detail::matrix_json(ps.G.matrix())},
         {"c_G", ps.c_G},
         {"verdict", v.positive ? "Positive" : "NotPositive"}};
  return {j, v.positive ? kExitUndecided : kExitCertified};
}

inline CommandResult cmd_preorder(const KernelSpec& a, const KernelSpec& b) {
  if (a.n != b.n) throw input_error("preorder: specs have different n");
  const auto leq = preorder_leq(a.triple, b.triple);
  const auto geq = preorder_leq(b.triple, a.triple);
  const bool eq = equiv(a.triple, b.triple);
  if (eq != (leq.holds && geq.holds)) throw numerical_error("preorder: equivalence disagrees with the two-sided preorder");
  const auto witness = [](const PreorderResult<double>& r) {
    return json{{"holds", r.holds}, {"r", r.witness.r}, {"max_mu", r.max_mu()}, {"mus", detail::reals_json(r.witness.spectrum.mus)}};
  };
  std::string rel = eq ? "≈" : leq.holds ? "⪯" : geq.holds ? "⪰" : "incomparable";
  std::string name = eq ? "equivalent" : leq.holds ? "leq" : geq.holds ? "geq" : "incomparable";
  json j{{"command", "preorder"},
         {"checksums", {checksum(a), checksum(b)}},
         {"relation", rel},
         {"relation_name", name},
         {"a_leq_b", witness(leq)},
         {"b_leq_a", witness(geq)}};
  return {j, kExitUndecided};
}

struct ZscanOptions {
  std::vector<unsigned> ks{3};
  std::vector<double> deltas{0, 10, 50, 250};
  double gamma_lo = 0, gamma_hi = 20;
};

struct ZscanRow {
  unsigned k = 0;
  double delta = 0;
  bool infinite = false;
  std::optional<double> z, lo, hi, extrapolated;
};

inline std::vector<ZscanRow> run_zscan(const ZscanOptions& o) {
  DeltaScanOptions dso;
  dso.z.gamma_lo = o.gamma_lo;
  dso.z.gamma_hi = o.gamma_hi;
  const KernelFamily<hp_real> base = fixtures::kappa_gamma_family(hp_real(0));
  std::vector<ZscanRow> rows;
  for (unsigned k : o.ks) {
    if (k < 1 || k > dso.z.moments.max_j) throw input_error("zscan: k must be in 1.." + std::to_string(dso.z.moments.max_j));
    for (double d : o.deltas) {
      ZscanRow row;
      row.k = k;
      row.delta = d;
      row.infinite = std::isinf(d);
      try {
        const auto r = delta_scan(base, k, {d}, dso).rows.front();
        row.z = to_double(r.gamma_root);
        row.lo = to_double(r.lo);
        row.hi = to_double(r.hi);
        if (r.extrapolated) row.extrapolated = to_double(*r.extrapolated);
        if (r.delta_infinite) row.delta = to_double(r.delta);
      } catch (const no_bracket_error&) {
      }
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string zscan_csv(const std::vector<ZscanRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "k,delta,z,lo,hi,extrapolated\n";
  const auto cell = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (const auto& r : rows) {
    out << r.k << ',';
    if (r.infinite) out << "inf";
    else out << r.delta;
    out << ',';
    if (r.z) cell(r.z);
    else out << "no_bracket";
    out << ',';
    cell(r.lo);
    out << ',';
    cell(r.hi);
    out << ',';
    cell(r.extrapolated);
    out << '\n';
  }
  return out.str();
}

inline json zscan_json(const std::vector<ZscanRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j{{"k", r.k}};
    if (r.infinite) {
      j["delta"] = "inf";
      j["delta_proxy"] = r.delta;
    } else {
      j["delta"] = r.delta;
    }
    if (r.z) {
      j["z"] = *r.z;
      j["lo"] = *r.lo;
      j["hi"] = *r.hi;
    } else {
      j["z"] = nullptr;
      j["note"] = "no sign change of e_k on the gamma range";
    }
    if (r.extrapolated) j["extrapolated"] = *r.extrapolated;
    out.push_back(j);
  }
  return {{"command", "zscan"}, {"family", "kappa_gamma_delta"}, {"rows", out}};
}

inline CommandResult cmd_npt(const KernelSpec& spec, std::optional<std::vector<std::size_t>> part1, const CheckOptions& opts = {}) {
  if (!part1) part1 = spec.part1;
  if (!part1) throw input_error("npt: no partition given (spec partition.part1 or --part1)");
  const Bipartition b(spec.n, *part1);
  const auto k = kernel_from_spec(spec);
  NptOptions no;
  no.kmax = opts.kmax;
  no.mercer.trials = opts.trials;
  no.mercer.seed = opts.seed;
  no.moments = opts.moments;
  const auto r = npt_gate(k, b, no);
  json j{{"command", "npt"},
         {"checksum", checksum(spec)},
         {"partition", b.part1()},
         {"verdict", to_string(r.verdict)},
         {"trace_before_normalisation", r.trace_before_normalisation},
         {"pt_max_mu", r.pt_max_mu},
         {"kmax_effective", r.kmax_effective}};
  if (r.npt()) {
    j["stage"] = r.stage;
    if (r.stage == "gaussian") j["certificate"] = {{"type", "symplectic"}, {"max_mu", r.pt_max_mu}, {"of", "partial transpose"}};
    if (r.stage == "ek") j["certificate"] = detail::sweep_json(*r.sweep);
    if (r.stage == "mercer") j["certificate"] = detail::mercer_json(*r.mercer);
  } else {
    j["note"] = "PPT outcome: no NPT certificate; separability is not decided for polynomial-Gaussian states";
  }
  const bool pure_gaussian = k.poly().size() == 1 && *k.poly().degree() == 0;
  if (pure_gaussian && gaussian_positive(k.triple()).positive)
    j["gaussian_separability"] = to_string(gaussian_separability(k.triple(), b));
  return {j, r.npt() ? kExitCertified : kExitUndecided};
}

struct FixtureParams {
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 0.0;
};

inline KernelSpec make_fixture(const std::string& name, const FixtureParams& p) {
  PolyGaussianKernel<double> k;
  if (name == "caldeira-n0" || name == "caldeira-n1" || name == "caldeira-n2") {
    k = fixtures::caldeira(static_cast<unsigned>(name.back() - '0'), p.beta);
  } else if (name == "kappa-gamma-delta") {
    k = fixtures::kappa_gamma_delta(p.gamma, p.delta);
  } else {
    throw input_error("fixture: unknown name '" + name + "' (caldeira-n0, caldeira-n1, caldeira-n2, kappa-gamma-delta)");
  }
  const double tr = trace(k);
  if (std::abs(tr - 1.0) > 1e-9) throw numerical_error("fixture: trace " + std::to_string(tr) + " is not 1");
  return spec_from_kernel(k);
}

}  // namespace polygauss
