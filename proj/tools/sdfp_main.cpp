#include <array>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdfp/approach.hpp"
#include "sdfp/certs.hpp"
#include "sdfp/gen.hpp"
#include "sdfp/io.hpp"

namespace {

constexpr int kExitAmbiguous = 64;
constexpr int kExitInput = 65;
constexpr int kExitInvalidCert = 70;

struct CommonOpts {
  double tol = -1;      // witness / verification tolerance (tol.psd, tol.cert)
  double tol_amb = -1;  // decision band
  double tol_rank = -1; // rank cutoff
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--tol", opts->tol, "witness/verification tolerance (default 1e-7)");
  cmd->add_option("--tol-amb", opts->tol_amb, "classification decision band (default 1e-7)");
  cmd->add_option("--tol-rank", opts->tol_rank, "rank cutoff (default 1e-8)");
}

sdfp::Tolerances make_tol(const CommonOpts& opts) {
  sdfp::Tolerances tol;
  if (opts.tol > 0) {
    tol.psd = opts.tol;
    tol.cert = opts.tol;
  }
  if (opts.tol_amb > 0) tol.amb = opts.tol_amb;
  if (opts.tol_rank > 0) tol.rank = opts.tol_rank;
  return tol;
}

int run_classify(const std::vector<std::string>& inputs, const std::string& cert_path,
                 bool json, const sdfp::Tolerances& tol) {
  int last_code = 0;
  bool any_ambiguous = false;
  for (const auto& path : inputs) {
    const sdfp::Problem p = sdfp::io::load_problem(path, tol);
    try {
      const sdfp::ClassificationResult r = sdfp::classify(p, tol);
      if (json) std::cout << sdfp::io::classification_json(path, p, r, tol);
      else std::cout << sdfp::io::classification_report(path, p, r);
      if (!cert_path.empty()) {
        sdfp::io::save_certificate(cert_path, *r.certificate);
        if (!json) std::cout << "certificate: " << cert_path << "\n";
      }
      last_code = sdfp::status_exit_code(r.status);
    } catch (const sdfp::NumericallyAmbiguous& e) {
      if (json) {
        std::cout << "{\n  \"input\": \"" << path << "\",\n  \"status\": \"ambiguous\",\n"
                  << "  \"exit\": " << kExitAmbiguous << "\n}\n";
      } else {
        std::cout << "input: " << path << "\nstatus: NumericallyAmbiguous\nexit: "
                  << kExitAmbiguous << "\ndetail: " << e.what() << "\n";
      }
      any_ambiguous = true;
      last_code = kExitAmbiguous;
    }
  }
  if (inputs.size() > 1) return any_ambiguous ? kExitAmbiguous : 0;
  return last_code;
}

int run_verify(const std::string& problem_path, const std::string& cert_path, double tol_override,
               bool json, const sdfp::Tolerances& tol) {
  const sdfp::Problem p = sdfp::io::load_problem(problem_path, tol);
  const sdfp::Certificate cert = sdfp::io::load_certificate(cert_path);
  const double use_tol = tol_override > 0 ? tol_override : cert.tol;
  const bool ok = sdfp::verify(p, cert, use_tol);
  if (json) {
    std::cout << "{\n  \"problem\": \"" << problem_path << "\",\n  \"certificate\": \""
              << cert_path << "\",\n  \"kind\": \"" << cert.kind() << "\",\n  \"tol\": "
              << sdfp::io::format_real(use_tol) << ",\n  \"valid\": " << (ok ? "true" : "false")
              << "\n}\n";
  } else {
    std::cout << "certificate: " << cert.kind() << "\n"
              << "tol: " << sdfp::io::format_real(use_tol) << "\n"
              << "result: " << (ok ? "valid" : "invalid") << "\n";
  }
  return ok ? 0 : kExitInvalidCert;
}

int run_approach(const std::string& input, double eps, bool json, const sdfp::Tolerances& tol) {
  const sdfp::Problem p = sdfp::io::load_problem(input, tol);
  sdfp::ClassificationResult r;
  try {
    r = sdfp::classify(p, tol);
  } catch (const sdfp::NumericallyAmbiguous& e) {
    std::cerr << "classification is numerically ambiguous: " << e.what() << "\n";
    return kExitAmbiguous;
  }
  if (r.status != sdfp::FeasibilityStatus::WeaklyInfeasible) {
    std::cerr << "refusing: problem classifies " << sdfp::to_string(r.status)
              << ", approach sequences exist only for weakly infeasible problems\n";
    return sdfp::status_exit_code(r.status);
  }
  const sdfp::FPOutput& fp = r.chain.front().fp;
  const sdfp::ApproachSequence seq = sdfp::build_sequence(fp, p, eps, tol);
  if (json) std::cout << sdfp::io::approach_json(input, seq, eps);
  else std::cout << sdfp::io::approach_report(input, seq);
  return 0;
}

int pick_dim(sdfp::FeasibilityStatus st, int n, sdfp::Rng& rng) {
  const int full = sdfp::tri_size(n);
  if (st == sdfp::FeasibilityStatus::WeaklyInfeasible)
    return rng.uniform_int(1, sdfp::max_weakly_infeasible_dim(n));
  return rng.uniform_int(0, full - 1);
}

int run_selftest(int max_n, int seeds, std::uint64_t base_seed, double eps, bool json,
                 const sdfp::Tolerances& tol) {
  using sdfp::FeasibilityStatus;
  const FeasibilityStatus all[] = {
      FeasibilityStatus::StronglyFeasible, FeasibilityStatus::WeaklyFeasible,
      FeasibilityStatus::WeaklyInfeasible, FeasibilityStatus::StronglyInfeasible};

  long total = 0, correct = 0, ambiguous = 0, wrong = 0, seq_fail = 0, bound_fail = 0;
  std::map<int, std::array<long, 3>> per_n; // n -> {correct, ambiguous, wrong}

  for (int n = 2; n <= max_n; ++n) {
    for (const auto st : all) {
      for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = base_seed + 1000003ULL * s + 17ULL * n;
        sdfp::Rng dim_rng(seed ^ (0x5bd1e995ULL * (1 + static_cast<int>(st))));
        const int dim_l = pick_dim(st, n, dim_rng);
        const auto inst = sdfp::generate(st, n, dim_l, seed, tol);
        ++total;
        try {
          const auto r = sdfp::classify(inst.problem, tol);
          if (r.status == st) {
            ++correct;
            ++per_n[n][0];
          } else {
            ++wrong;
            ++per_n[n][2];
            std::printf("MISCLASSIFIED n=%d dim=%d seed=%llu truth=%s got=%s\n", n, dim_l,
                        static_cast<unsigned long long>(seed), sdfp::to_string(st),
                        sdfp::to_string(r.status));
          }
          if (st == FeasibilityStatus::WeaklyInfeasible &&
              r.status == FeasibilityStatus::WeaklyInfeasible) {
            const int m = r.chain.front().fp.m();
            if (m < 1 || m > n - 1) {
              ++bound_fail;
              std::printf("PARTITION BOUND VIOLATED n=%d seed=%llu m=%d\n", n,
                          static_cast<unsigned long long>(seed), m);
            }
            try {
              const auto seq = sdfp::build_sequence(r.chain.front().fp, inst.problem, eps, tol);
              if (!(seq.achieved_dist < eps)) ++seq_fail;
            } catch (const sdfp::Error&) {
              ++seq_fail;
            }
          }
        } catch (const sdfp::NumericallyAmbiguous&) {
          ++ambiguous;
          ++per_n[n][1];
        }
      }
    }
  }

  const double rate = total ? 100.0 * static_cast<double>(correct) / total : 0.0;
  if (json) {
    std::printf("{\n  \"total\": %ld,\n  \"correct\": %ld,\n  \"ambiguous\": %ld,\n"
                "  \"misclassified\": %ld,\n  \"sequence_failures\": %ld,\n"
                "  \"partition_bound_failures\": %ld,\n  \"definitive_correct_pct\": %.2f\n}\n",
                total, correct, ambiguous, wrong, seq_fail, bound_fail, rate);
  } else {
    std::printf("%4s %10s %10s %8s\n", "n", "correct", "ambiguous", "wrong");
    for (const auto& [n, row] : per_n)
      std::printf("%4d %10ld %10ld %8ld\n", n, row[0], row[1], row[2]);
    std::printf("total %ld, correct %ld (%.2f%%), ambiguous %ld, misclassified %ld\n", total,
                correct, rate, ambiguous, wrong);
    std::printf("approach-sequence failures: %ld, partition-bound failures: %ld\n", seq_fail,
                bound_fail);
  }
  const bool ok = wrong == 0 && seq_fail == 0 && bound_fail == 0 && rate >= 95.0;
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"semidefinite feasibility classification, certificates and approach sequences"};
  app.require_subcommand(1);

  CommonOpts copt_classify, copt_verify, copt_approach, copt_selftest;

  auto* classify = app.add_subcommand("classify", "classify one or more problem documents");
  std::vector<std::string> classify_inputs;
  std::string cert_out;
  bool classify_json = false;
  classify->add_option("input", classify_inputs, "problem document(s)")->required();
  classify->add_option("--cert", cert_out, "write the classification certificate here");
  classify->add_flag("--json", classify_json, "machine-readable report");
  add_common(classify, &copt_classify);

  auto* verify = app.add_subcommand("verify", "verify a certificate against a problem");
  std::string verify_problem, verify_cert;
  double verify_tol = -1;
  bool verify_json = false;
  verify->add_option("problem", verify_problem, "problem document")->required();
  verify->add_option("certificate", verify_cert, "certificate file")->required();
  verify->add_option("--tol", verify_tol, "override the certificate's stored tolerance");
  verify->add_flag("--json", verify_json, "machine-readable report");

  auto* approach = app.add_subcommand(
      "approach", "construct an eps-close approach sequence for a weakly infeasible problem");
  std::string approach_input;
  double approach_eps = 1e-4;
  bool approach_json = false;
  approach->add_option("input", approach_input, "problem document")->required();
  approach->add_option("--eps", approach_eps, "distance target (default 1e-4)");
  approach->add_flag("--json", approach_json, "machine-readable report");
  add_common(approach, &copt_approach);

  auto* selftest = app.add_subcommand("selftest", "generator/classifier agreement sweep");
  int st_n = 8, st_seeds = 20;
  std::uint64_t st_seed = 1;
  double st_eps = 1e-4;
  bool st_json = false;
  selftest->add_option("--n", st_n, "largest dimension (default 8)");
  selftest->add_option("--seeds", st_seeds, "seeds per (n, status) cell (default 20)");
  selftest->add_option("--seed", st_seed, "base seed (default 1)");
  selftest->add_option("--eps", st_eps, "approach-sequence target (default 1e-4)");
  selftest->add_flag("--json", st_json, "machine-readable summary");
  add_common(selftest, &copt_selftest);

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed())
      return run_classify(classify_inputs, cert_out, classify_json, make_tol(copt_classify));
    if (verify->parsed())
      return run_verify(verify_problem, verify_cert, verify_tol, verify_json, make_tol(copt_verify));
    if (approach->parsed())
      return run_approach(approach_input, approach_eps, approach_json, make_tol(copt_approach));
    if (selftest->parsed())
      return run_selftest(st_n, st_seeds, st_seed, st_eps, st_json, make_tol(copt_selftest));
  } catch (const sdfp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sdfp::DimensionMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sdfp::NumericallyAmbiguous& e) {
    std::cerr << "ambiguous: " << e.what() << "\n";
    return kExitAmbiguous;
  } catch (const sdfp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
