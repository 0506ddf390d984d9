#include "nhmf/cli/commands.hpp"

#include <iostream>

namespace nhmf::cli {

using nlohmann::json;

namespace {

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json mat_json(const Mat2& m) {
  return json::array({json::array({cjson(m(0, 0)), cjson(m(0, 1))}), json::array({cjson(m(1, 0)), cjson(m(1, 1))})});
}

json eigen_json(const Mat2& m) {
  json out = json::array();
  for (const auto& e : eig_small(m)) {
    const Vec2 v = phase_aligned<2>(e.vector);
    out.push_back({{"value", cjson(e.value)}, {"vector", json::array({cjson(v(0)), cjson(v(1))})}});
  }
  return out;
}

json point_json(const ModelParams& p, const StationaryPoint& s) {
  const auto j = bond_current(s.orb, p.t);
  return {{"class", class_name(s.cls)},
          {"chart", chart_name(s.chart)},
          {"orbitals", {{"a", cjson(s.orb.a)}, {"b", cjson(s.orb.b)}, {"c", cjson(s.orb.c)}, {"d", cjson(s.orb.d)}}},
          {"nh_energy", cjson(s.nh_energy)},
          {"hermitian_energy", s.h_energy_at_point},
          {"gamma", s.gamma},
          {"occupied_orbital_energies", {{"up", cjson(s.occ_energies[0])}, {"dn", cjson(s.occ_energies[1])}}},
          {"fock", {{"up", mat_json(s.fock.up)}, {"dn", mat_json(s.fock.dn)}}},
          {"fock_eigenpairs", {{"up", eigen_json(s.fock.up)}, {"dn", eigen_json(s.fock.dn)}}},
          {"bond_current", {{"up", j[0]}, {"dn", j[1]}}},
          {"grad_residual", s.grad_residual},
          {"self_consistency", s.self_consistency}};
}

void maybe_plot(const RunConfig& cfg, const Table& t, const PlotSpec& spec, const std::string& suffix = "") {
  if (cfg.plot) write_text_file(plot_path(cfg.out, suffix), render_svg(t, spec));
}

}  // namespace

Table exact_sweep_table(const RunConfig& cfg) {
  Table t;
  t.command = "exact-sweep";
  t.columns = {"U"};
  for (int k = 1; k <= 4; ++k) {
    t.columns.push_back("lam" + std::to_string(k) + "_re");
    t.columns.push_back("lam" + std::to_string(k) + "_im");
  }
  for (const auto& s : exact_sweep(cfg.model, cfg.u_range->grid())) {
    std::vector<Cell> row{s.params.U};
    for (cplx e : s.eigenvalues()) {
      row.emplace_back(e.real());
      row.emplace_back(e.imag());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table mf_sweep_table(const RunConfig& cfg, Functional functional) {
  const bool nh = functional == Functional::NonHermitian;
  const auto grid = cfg.u_range->grid();
  SweepOptions opt;
  opt.functional = functional;
  opt.search = cfg.search;
  opt.hmf_grid = cfg.hmf_grid;
  const auto branches = sweep_branches(cfg.model, grid, opt);

  Table t;
  t.command = nh ? "nhmf-sweep" : "hmf-sweep";
  t.columns = {"U", "branch_id", "e_re", "e_im", "e_hermitian", "class", "grad_residual", "count"};
  if (nh) t.columns.push_back("partner_branch");
  for (std::size_t b = 0; b < branches.size(); ++b) t.metadata["branch " + std::to_string(b)] = branches[b].label;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::int64_t count = 0;
    for (const auto& br : branches) count += br.points[i].has_value();
    for (std::size_t b = 0; b < branches.size(); ++b) {
      const auto& pt = branches[b].points[i];
      if (!pt) continue;
      std::vector<Cell> row{grid[i], static_cast<std::int64_t>(b), pt->nh_energy.real(), pt->nh_energy.imag(),
                            pt->h_energy_at_point, std::string(class_name(pt->cls)), pt->grad_residual, count};
      if (nh) {
        std::int64_t partner = -1;
        const OrbitalPair target = pt->orb.conj();
        for (std::size_t q = 0; q < branches.size() && partner < 0; ++q) {
          const auto& other = branches[q].points[i];
          if (other && orbital_distance(other->orb, target) <= kPairingTol) partner = static_cast<std::int64_t>(q);
        }
        row.emplace_back(partner);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

json case_study_report(const RunConfig& cfg) {
  const ModelParams p = cfg.model.with_U(*cfg.u);
  const auto pts = find_nhmf_stationary(p, cfg.search);
  const StationaryPoint s = matching_nhmf_point(p, 1, pts);
  json doc = artifact_header("case-study", cfg);
  doc["u"] = p.U;
  const auto exact = exact_spectrum(p).eigenvalues();
  doc["exact_spectrum"] = json::array();
  for (cplx e : exact) doc["exact_spectrum"].push_back(cjson(e));
  doc["exact_first_excited"] = exact[1].real();
  doc["first_excited"] = point_json(p, s);
  for (const auto& q : pts)
    if (orbital_distance(q.orb, s.orb.conj()) <= kPairingTol) {
      doc["partner"] = point_json(p, q);
      break;
    }
  return doc;
}

Table transmission_table(const RunConfig& cfg) {
  const ModelParams p = cfg.model.with_U(*cfg.u);
  const SSPConfig ssp = cfg.ssp();
  std::vector<TransmissionCurve> curves{exact_transmission_curve(p, ssp, 0), exact_transmission_curve(p, ssp, 1)};
  for (auto& c : mf_transmission_curves(p, ssp, cfg.search)) curves.push_back(std::move(c));

  Table t;
  t.command = "transmission";
  t.columns = {"E", "curve_label", "r_re", "r_im", "T", "flagged"};
  for (const auto& c : curves) {
    t.metadata["shift " + c.state_label] = format_double(c.shift);
    for (const auto& s : c.points)
      t.rows.push_back({s.energy, c.state_label, s.r.real(), s.r.imag(), s.T,
                        static_cast<std::int64_t>(s.branch_flag ? 0 : 1)});
  }
  return t;
}

Table verify_table(const std::vector<CheckResult>& checks) {
  Table t;
  t.command = "verify";
  t.columns = {"check", "passed", "measured", "relation", "bound", "detail"};
  for (const auto& c : checks)
    t.rows.push_back({c.name, static_cast<std::int64_t>(c.passed), c.measured, std::string(c.lower_bound ? ">=" : "<="),
                      c.bound, c.detail});
  return t;
}

int run_command(const std::string& command, RunConfig cfg, const VerifyOptions& opt) {
  cfg.resolve(command);
  if (command == "exact-sweep") {
    const Table t = exact_sweep_table(cfg);
    emit_table(t, cfg);
    maybe_plot(cfg, t, {"Exact eigenvalues", "U", {"lam1_re", "lam2_re", "lam3_re", "lam4_re"}, "", "", "U", "E"});
    return kOk;
  }
  if (command == "hmf-sweep" || command == "nhmf-sweep") {
    const bool nh = command == "nhmf-sweep";
    const Table t = mf_sweep_table(cfg, nh ? Functional::NonHermitian : Functional::Hermitian);
    emit_table(t, cfg);
    maybe_plot(cfg, t, {nh ? "NHMF energies (real part)" : "HMF energies", "U", {}, "e_re", "branch_id", "U", "Re E"});
    if (nh) {
      maybe_plot(cfg, t, {"NHMF energies (imaginary part)", "U", {}, "e_im", "branch_id", "U", "Im E"}, "-imag");
      maybe_plot(cfg, t, {"Hermitian energy at NHMF points", "U", {}, "e_hermitian", "branch_id", "U", "E^H"},
                 "-hermitian");
    }
    return kOk;
  }
  if (command == "case-study") {
    const std::string text = case_study_report(cfg).dump(2) + "\n";
    if (cfg.out.empty()) std::cout << text;
    else write_text_file(cfg.out, text);
    return kOk;
  }
  if (command == "transmission") {
    const Table t = transmission_table(cfg);
    emit_table(t, cfg);
    maybe_plot(cfg, t, {"Transmission", "E", {}, "T", "curve_label", "E", "T"});
    return kOk;
  }
  if (command == "verify") {
    const auto checks = run_verify(cfg, opt);
    bool ok = true;
    for (const auto& c : checks) {
      ok = ok && c.passed;
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << format_double(c.measured)
                << (c.lower_bound ? " >= " : " <= ") << format_double(c.bound)
                << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
    }
    if (!cfg.out.empty()) emit_table(verify_table(checks), cfg);
    return ok ? kOk : kInvariantFailure;
  }
  throw ConfigError("unknown command " + command);
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (last residual " << format_double(e.residual()) << ")\n";
    return kNonConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  }
}

}  // namespace nhmf::cli
