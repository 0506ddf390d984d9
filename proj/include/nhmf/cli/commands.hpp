#pragma once

#include <string>
#include <vector>

#include "nhmf/cli/config.hpp"
#include "nhmf/cli/output.hpp"

namespace nhmf::cli {

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kUsageError = 2, kNonConvergence = 3 };

/// U, lam1_re, lam1_im, ..., lam4_im in canonical order.
Table exact_sweep_table(const RunConfig& cfg);

/// One row per (U, branch). NonHermitian adds the partner branch column.
Table mf_sweep_table(const RunConfig& cfg, Functional functional);

/// First-excited NHMF point at cfg.u and its conjugate partner, with Fock
/// matrices, their eigenpairs, orbital energies and bond currents.
nlohmann::json case_study_report(const RunConfig& cfg);

/// Exact curves for states 0 and 1 followed by the four mean-field curves.
Table transmission_table(const RunConfig& cfg);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool lower_bound = false;  // pass when measured >= bound instead of <=
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  bool corrupt_gradient = false;  // test hook: perturbs the analytic gradient
};

std::vector<CheckResult> run_verify(const RunConfig& cfg, const VerifyOptions& opt = {});

Table verify_table(const std::vector<CheckResult>& checks);

/// Resolve cfg for the command, run it and write its artifacts. Returns the
/// exit code; library errors propagate to the caller.
int run_command(const std::string& command, RunConfig cfg, const VerifyOptions& opt = {});

/// Map an exception from run_command to an exit code, printing it to stderr.
int exit_code_for_current_exception();

}  // namespace nhmf::cli
