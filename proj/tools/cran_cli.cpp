// Command-line front end: region evaluation, quantizer optimization,
// verification campaigns, and constant-gap checks for uplink C-RAN
// compress-and-forward instances. All rates are bits per complex dimension.
//
// Exit codes: 0 success / campaign clean, 1 verification failure, 2 input
// error, 3 enumeration cap exceeded, 4 iteration budget exhausted.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cran/cran.hpp"

namespace fs = std::filesystem;
using cran::Json;

namespace {

struct CommonArgs {
  std::string instance_path;
  std::string random_spec;
  std::string quantizer = "appendixD";
  std::string out_dir = ".";
  double tol = 1e-7;
  int max_iters = 20000;
  bool trace = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_instance) {
  auto* inst = cmd->add_option("--instance", a.instance_path,
                               "instance JSON file");
  auto* rnd = cmd->add_option("--random", a.random_spec,
                              "random instance spec K,L,M,N,snr_db,seed");
  if (needs_instance) {
    inst->excludes(rnd);
    rnd->excludes(inst);
  }
  cmd->add_option("--quantizer", a.quantizer,
                  "appendixD (B = Sigma^-1/2) or file:<path>");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--tol", a.tol, "verification tolerance");
  cmd->add_option("--max-iters", a.max_iters, "solver iteration budget");
  cmd->add_flag("--trace", a.trace, "emit solver trace CSV");
}

cran::NetworkInstance load_instance(const CommonArgs& a) {
  if (!a.random_spec.empty()) {
    std::vector<double> v;
    std::stringstream ss(a.random_spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    if (v.size() != 6)
      throw cran::ParseError("--random expects K,L,M,N,snr_db,seed");
    return cran::random_instance((std::uint64_t)v[5], (int)v[0], (int)v[1],
                                 (int)v[2], (int)v[3], v[4]);
  }
  if (a.instance_path.empty())
    throw cran::ParseError("one of --instance or --random is required");
  Json j = Json::parse(cran::read_file(a.instance_path));
  cran::NetworkInstance inst = cran::instance_from_json(j);
  cran::ValidationReport rep = cran::validate(inst);
  if (!rep.ok()) {
    std::string msg = "instance fails validation:";
    for (const auto& issue : rep.issues) msg += "\n  " + issue.message;
    throw cran::ParseError(msg);
  }
  return inst;
}

cran::QuantizerB load_quantizer(const CommonArgs& a,
                                const cran::NetworkInstance& inst) {
  if (a.quantizer == "appendixD") return cran::half_inverse_noise_quantizer(inst);
  const std::string prefix = "file:";
  if (a.quantizer.rfind(prefix, 0) == 0) {
    Json j = Json::parse(cran::read_file(a.quantizer.substr(prefix.size())));
    cran::QuantizerB b = cran::quantizer_from_json(j, inst);
    if (!cran::quantizer_feasible(inst, b, 1e-7))
      throw cran::ParseError("quantizer violates the Loewner interval");
    return b;
  }
  throw cran::ParseError("--quantizer must be appendixD or file:<path>");
}

void ensure_out_dir(const CommonArgs& a) {
  fs::create_directories(a.out_dir);
}

void write_meta(const CommonArgs& a) {
  Json meta;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  cran::write_file(a.out_dir + "/meta.json", meta.dump(2) + "\n");
}

Json tuple_to_json(const cran::RateFronthaulTuple& t) {
  return Json{{"R_bits_per_complex_dim", t.R}, {"C_bits_per_complex_dim", t.C}};
}

Json certificate_to_json(const cran::DominationCertificate& c) {
  Json j;
  j["case"] = c.case_tag;
  j["mix_param"] = c.mix_param;
  j["ok"] = c.ok;
  j["region_empty"] = c.region_empty;
  j["target"] = tuple_to_json(c.target);
  j["sum_fronthaul_budget"] = c.sum_fronthaul_budget;
  j["rate_slack"] = c.rate_slack;
  j["fronthaul_slack"] = c.fronthaul_slack;
  Json combo = Json::array();
  for (const auto& wp : c.combination)
    combo.push_back(Json{{"weight", wp.weight},
                         {"label", wp.label},
                         {"achieved", tuple_to_json(wp.achieved)}});
  j["combination"] = combo;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_eval_region(const CommonArgs& a) {
  cran::NetworkInstance inst = load_instance(a);
  cran::QuantizerB b = load_quantizer(a, inst);
  ensure_out_dir(a);

  auto jd = cran::jd_constraints(inst, b);
  cran::write_file(a.out_dir + "/jd_constraints.csv",
                   cran::constraints_to_csv(jd));
  cran::SdRegion sd = cran::sd_constraints(inst, b);
  cran::write_file(a.out_dir + "/sd_rate_constraints.csv",
                   cran::constraints_to_csv(sd.rate));
  cran::write_file(a.out_dir + "/sd_fronthaul_usage.csv",
                   cran::constraints_to_csv(sd.fronthaul));
  auto cut = cran::cutset_constraints(inst);
  cran::write_file(a.out_dir + "/cutset_constraints.csv",
                   cran::constraints_to_csv(cut));
  auto gsd = cran::gsd_rates(inst, b, cran::sd_corner_order(inst));

  Json summary;
  summary["units"] = "bits per complex dimension";
  summary["K"] = inst.K;
  summary["L"] = inst.L;
  summary["jd_sum_rate"] = cran::jd_sum_rate_fixed_b(inst, b);
  summary["sd_feasible"] = sd.feasible;
  summary["sd_corner"] = tuple_to_json(gsd);
  cran::write_file(a.out_dir + "/summary.json", summary.dump(2) + "\n");

  if (inst.K == 2) {
    auto pts = cran::two_user_boundary(jd);
    std::ostringstream os;
    os << "R1_bits_per_complex_dim,R2_bits_per_complex_dim\n"
       << std::setprecision(17);
    for (auto& p : pts) os << p.first << ',' << p.second << "\n";
    cran::write_file(a.out_dir + "/boundary.csv", os.str());
  }
  write_meta(a);
  return 0;
}

int cmd_optimize(const CommonArgs& a, const std::string& objective,
                 const std::string& weights, const std::string& fh_weights,
                 double gamma, double csum) {
  cran::NetworkInstance inst = load_instance(a);
  ensure_out_dir(a);
  auto parse_weights = [&](const std::string& s, int n,
                           const char* what) -> std::vector<double> {
    if (s.empty()) return std::vector<double>(n, 1.0);
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    if ((int)v.size() != n)
      throw cran::ParseError(std::string(what) + ": expected " +
                             std::to_string(n) + " entries");
    for (double x : v)
      if (x < 0.0)
        throw cran::ParseError(std::string(what) + ": negative entry");
    return v;
  };

  cran::SolveOptions opt;
  opt.max_iters = a.max_iters;
  opt.record_trace = a.trace;
  cran::SolveResult res;
  if (objective == "jd-weighted") {
    res = cran::maximize_weighted_sum_jd(
        inst, parse_weights(weights, inst.K, "--weights"), opt);
  } else if (objective == "sd-sum") {
    res = cran::maximize_sum_sd_individual(inst, opt);
  } else if (objective == "sd-sum-sumfronthaul") {
    double budget = csum >= 0 ? csum : 0.0;
    res = cran::maximize_sum_sd_sumfronthaul(inst, budget, opt);
  } else if (objective == "rate-fronthaul-tradeoff") {
    double budget = csum >= 0 ? csum : 0.0;
    res = cran::weighted_rate_fronthaul_tradeoff(
        inst, parse_weights(weights, inst.K, "--weights"),
        parse_weights(fh_weights, inst.L, "--fronthaul-weights"), gamma,
        budget, opt);
  } else {
    throw cran::ParseError(
        "--objective must be one of jd-weighted, sd-sum, "
        "sd-sum-sumfronthaul, rate-fronthaul-tradeoff");
  }

  Json j;
  j["units"] = "bits per complex dimension";
  j["objective"] = objective;
  j["value"] = res.value;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["optimality_gap_estimate"] = res.optimality_gap_estimate;
  j["point"] = tuple_to_json(res.point);
  if (!res.C_star.empty()) j["C_star"] = res.C_star;
  Json bstar = Json::array();
  for (const auto& m : res.b_star.B)
    bstar.push_back(cran::quantizer_to_json({{m}})["B"][0]);
  j["B_star"] = bstar;
  double worst = cran::kInf;
  for (double s : res.slacks) worst = std::min(worst, s);
  j["min_constraint_slack"] = worst;
  cran::write_file(a.out_dir + "/solve_result.json", j.dump(2) + "\n");
  if (a.trace)
    cran::write_file(a.out_dir + "/trace.csv", cran::trace_to_csv(res.trace));
  write_meta(a);
  return res.converged ? 0 : 4;
}

int cmd_verify(const CommonArgs& a, const std::string& theorems, int count,
               std::uint64_t seed, int kmax, int lmax) {
  ensure_out_dir(a);
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) {
    return lo + (int)(rng() % (std::uint64_t)(hi - lo + 1));
  };
  const double snrs[3] = {0.0, 10.0, 20.0};

  std::vector<cran::NetworkInstance> instances;
  std::vector<std::vector<cran::QuantizerB>> quantizers;
  for (int i = 0; i < count; ++i) {
    int K = pick(1, kmax), L = pick(1, lmax), M = pick(1, 2), N = pick(1, 2);
    double snr = snrs[rng() % 3];
    std::uint64_t iseed = rng();
    cran::NetworkInstance inst = cran::random_instance(iseed, K, L, M, N, snr);
    std::vector<cran::QuantizerB> bs;
    bs.push_back(cran::half_inverse_noise_quantizer(inst));
    bs.push_back(cran::random_quantizer(inst, rng()));
    instances.push_back(std::move(inst));
    quantizers.push_back(std::move(bs));
  }

  auto wants = [&](const std::string& t) {
    return theorems == "all" || theorems.find(t) != std::string::npos;
  };
  bool corrupt = std::getenv("CRAN_TEST_CORRUPT_F") != nullptr;

  Json report;
  report["seed"] = seed;
  report["instances"] = count;
  int violations = 0;
  fs::create_directories(a.out_dir + "/certificates");

  if (wants("1")) {
    cran::CampaignReport rep;
    int cert_id = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& inst = instances[i];
      double base = inst.K * 2.0;
      std::vector<double> grid = {0.25 * base, 0.75 * base, 1.5 * base,
                                  3.0 * base, 8.0 * base + 4.0 * inst.L};
      auto orders = cran::all_permutations(inst.K);
      for (const auto& b : quantizers[i])
        for (double csum : grid)
          for (const auto& ord : orders) {
            auto cert = cran::theorem1_certificate(inst, b, csum, ord, a.tol);
            cran::campaign_absorb(rep, cert);
            if (!cert.ok)
              cran::write_file(a.out_dir + "/certificates/sum_fronthaul_" +
                                   std::to_string(cert_id++) + ".json",
                               certificate_to_json(cert).dump(2) + "\n");
          }
    }
    violations += rep.failures;
    report["sum_fronthaul_equivalence"] =
        Json{{"runs", rep.runs},
             {"failures", rep.failures},
             {"worst_rate_slack", rep.worst_rate_slack},
             {"worst_fronthaul_slack", rep.worst_fronthaul_slack},
             {"case_histogram", rep.case_histogram}};
  }
  if (wants("2")) {
    cran::CampaignReport rep;
    int cert_id = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      auto orders = cran::all_permutations(instances[i].L);
      for (const auto& b : quantizers[i])
        for (const auto& ord : orders) {
          auto cert = cran::theorem2_certificate(instances[i], b, ord, a.tol);
          cran::campaign_absorb(rep, cert);
          if (!cert.ok)
            cran::write_file(a.out_dir + "/certificates/individual_" +
                                 std::to_string(cert_id++) + ".json",
                             certificate_to_json(cert).dump(2) + "\n");
        }
    }
    violations += rep.failures;
    report["individual_fronthaul_sum_rate"] =
        Json{{"runs", rep.runs},
             {"failures", rep.failures},
             {"worst_rate_slack", rep.worst_rate_slack},
             {"worst_fronthaul_slack", rep.worst_fronthaul_slack},
             {"case_histogram", rep.case_histogram}};
  }
  if (wants("lemmas")) {
    int runs = 0, fails = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& inst = instances[i];
      for (const auto& b : quantizers[i]) {
        cran::SetFunction f =
            cran::f_jd_sumfronthaul(inst, b, inst.K * 1.5);
        if (corrupt) {
          cran::SetFunction raw = f;
          f = cran::SetFunction(inst.K, [raw](cran::Mask T) {
            double s = cran::mask_size(T);
            return raw(T) + s * s;
          });
        }
        auto [g, gplus] =
            cran::g_fronthaul(inst, b, cran::jd_sum_rate_fixed_b(inst, b));
        runs += 3;
        if (!cran::is_submodular(f).ok) ++fails;
        if (!cran::is_supermodular(g).ok) ++fails;
        if (!cran::is_supermodular(gplus).ok) ++fails;
      }
    }
    violations += fails;
    report["set_function_checks"] = Json{{"runs", runs}, {"failures", fails}};
  }
  if (wants("3")) {
    int runs = 0, fails = 0;
    double worst = 0.0;
    for (const auto& inst : instances) {
      auto jd = cran::jd_gap_certificate(inst);
      auto sd = cran::sd_sum_gap_certificate(inst);
      auto gsd = cran::gsd_sumfronthaul_gap_certificate(inst, inst.L * 4.0);
      runs += 3;
      if (!jd.pass) ++fails;
      if (!sd.pass) ++fails;
      if (!gsd.pass) ++fails;
      worst = std::max({worst, jd.worst_gap - jd.eta, sd.worst_gap - sd.eta,
                        gsd.worst_gap - gsd.eta});
    }
    violations += fails;
    report["constant_gap"] = Json{
        {"runs", runs}, {"failures", fails}, {"worst_gap_minus_bound", worst}};
  }

  report["violations"] = violations;
  cran::write_file(a.out_dir + "/report.json", report.dump(2) + "\n");
  write_meta(a);
  return violations == 0 ? 0 : 1;
}

int cmd_gap_check(const CommonArgs& a, double csum) {
  cran::NetworkInstance inst = load_instance(a);
  ensure_out_dir(a);
  double budget = csum >= 0 ? csum : [&] {
    double s = 0.0;
    for (double c : inst.C) s += c;
    return s;
  }();
  auto jd = cran::jd_gap_certificate(inst);
  auto sd = cran::sd_sum_gap_certificate(inst);
  auto gsd = cran::gsd_sumfronthaul_gap_certificate(inst, budget);
  cran::write_file(a.out_dir + "/gap_jd.csv", cran::gap_to_csv(jd));
  cran::write_file(a.out_dir + "/gap_gsd_sumfronthaul.csv",
                   cran::gap_to_csv(gsd));
  Json j;
  j["units"] = "bits per complex dimension";
  j["jd"] = Json{{"worst_gap", jd.worst_gap}, {"eta", jd.eta}, {"pass", jd.pass}};
  j["sd_sum"] =
      Json{{"worst_gap", sd.worst_gap}, {"eta", sd.eta}, {"pass", sd.pass}};
  j["gsd_sum_fronthaul"] = Json{{"worst_gap", gsd.worst_gap},
                                {"eta", gsd.eta},
                                {"pass", gsd.pass},
                                {"budget", budget}};
  cran::write_file(a.out_dir + "/gap_report.json", j.dump(2) + "\n");
  write_meta(a);
  return (jd.pass && sd.pass && gsd.pass) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Uplink C-RAN compress-and-forward rate-fronthaul region toolkit"};
  app.require_subcommand(1);

  CommonArgs eval_args, opt_args, verify_args, gap_args;
  std::string objective = "sd-sum", weights, fh_weights, theorems = "all";
  double gamma = 0.0, csum = -1.0, gap_csum = -1.0, opt_csum = -1.0;
  int count = 100, kmax = 3, lmax = 3;
  std::uint64_t seed = 1;

  CLI::App* ev = app.add_subcommand("eval-region",
                                    "emit constraint tables for one instance");
  add_common(ev, eval_args, true);

  CLI::App* op = app.add_subcommand("optimize", "optimize the quantizers");
  add_common(op, opt_args, true);
  op->add_option("--objective", objective,
                 "jd-weighted | sd-sum | sd-sum-sumfronthaul | "
                 "rate-fronthaul-tradeoff");
  op->add_option("--weights", weights, "user weights, comma separated");
  op->add_option("--fronthaul-weights", fh_weights,
                 "fronthaul weights nu, comma separated");
  op->add_option("--gamma", gamma, "fronthaul price");
  op->add_option("--sum-fronthaul", opt_csum, "total fronthaul budget, bits");

  CLI::App* ve = app.add_subcommand("verify", "run verification campaigns");
  add_common(ve, verify_args, false);
  ve->add_option("--theorems", theorems,
                 "which campaigns: any of 1,2,3,lemmas or all");
  ve->add_option("--count", count, "number of random instances");
  ve->add_option("--seed", seed, "campaign seed");
  ve->add_option("--kmax", kmax, "max users per instance");
  ve->add_option("--lmax", lmax, "max BSs per instance");

  CLI::App* ga = app.add_subcommand("gap-check", "constant-gap certificates");
  add_common(ga, gap_args, true);
  ga->add_option("--sum-fronthaul", gap_csum, "total fronthaul budget, bits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (ev->parsed()) return cmd_eval_region(eval_args);
    if (op->parsed())
      return cmd_optimize(opt_args, objective, weights, fh_weights, gamma,
                          opt_csum);
    if (ve->parsed())
      return cmd_verify(verify_args, theorems, count, seed, kmax, lmax);
    if (ga->parsed()) return cmd_gap_check(gap_args, gap_csum);
  } catch (const cran::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const cran::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
